#include "cli.hpp"

#include "stabkit/errors.hpp"
#include "stabkit/gallery.hpp"
#include "stabkit/io.hpp"
#include "stabkit/metrics.hpp"
#include "stabkit/polytope.hpp"
#include "stabkit/slope.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace stabkit::cli {

namespace {

using nlohmann::json;
using Handler = std::function<Output(const json&, const CommandOptions&)>;

std::string rat(const Rational& q) { return to_string(q); }

Rational parse_c(const std::string& s) {
    try {
        return parse_rational(s);
    } catch (const InputError& e) {
        throw InputError(std::string("bad value for c: ") + e.what(), "/options/c");
    }
}

bool flow_agrees(StabilityClass cls, FlowStatus status) {
    switch (cls) {
    case StabilityClass::Stable:
    case StabilityClass::Polystable: return status == FlowStatus::Balanced;
    case StabilityClass::Unstable: return status == FlowStatus::Escaped;
    case StabilityClass::StrictlySemistable: return status == FlowStatus::Stalled;
    }
    return false;
}

FlowConfig flow_config(const json& input, const CommandOptions& opt) {
    FlowConfig cfg = flow_config_from_json(input.is_object() && input.contains("flow") ? input["flow"] : json());
    if (opt.tol) cfg.tol = *opt.tol;
    if (opt.max_iters) cfg.max_iters = *opt.max_iters;
    cfg.validate();
    return cfg;
}

// ------------------------------------------------------------- torus --

Output cmd_hm(const json& in, const CommandOptions& opt) {
    const WeightSystem ws = weight_system_from_json(in);
    const Verdict v = hm_classify(ws);
    json out{{"verdict", to_json(v)}};
    if (opt.brute_bound) {
        const Verdict b = brute_force_1ps(ws, *opt.brute_bound);
        out["brute_force"] = to_json(b);
        out["agree"] = b.cls == v.cls;
    }
    return {out, {}};
}

Output cmd_hypersurface(const json& in, const CommandOptions&) {
    const Hypersurface h = hypersurface_from_json(in);
    return {{{"verdict", to_json(hypersurface_newton(h.degree, h.nvars, h.monomials))}}, {}};
}

// ------------------------------------------------------------ points --

json points_row(const PointConfig& c, const FlowConfig& cfg, FlowResult* keep = nullptr) {
    const PointsVerdict v = classify_points(c);
    FlowResult res = flow_to_zero(PointsProblem(c), cfg);
    json row{{"classification", to_json(v)}, {"flow", to_json(res)}, {"agree", flow_agrees(v.cls, res.status)}};
    if (keep) *keep = std::move(res);
    return row;
}

Output cmd_points_classify(const json& in, const CommandOptions&) {
    return {{{"classification", to_json(classify_points(point_config_from_json(in)))}}, {}};
}

Output cmd_points_balance(const json& in, const CommandOptions& opt) {
    FlowResult res;
    json row = points_row(point_config_from_json(in), flow_config(in, opt), &res);
    return {row, trace_csv(res)};
}

Output cmd_points_suite(const json& in, const CommandOptions& opt) {
    if (opt.count < 0) throw InputError("count must be nonnegative", "/options/count");
    const FlowConfig cfg = flow_config(in, opt);
    std::mt19937_64 rng(opt.seed);
    std::vector<PointConfig> configs;
    for (int i = 0; i < opt.count; ++i) configs.push_back(random_point_config(rng, opt.max_total, opt.max_multiplicity));
    std::vector<json> rows(configs.size());
    run_indexed(configs.size(), Exec::Parallel, [&](std::size_t i) {
        const PointsVerdict v = classify_points(configs[i]);
        const FlowResult res = flow_to_zero(PointsProblem(configs[i]), cfg);
        rows[i] = {{"index", i},
                   {"multiplicities", configs[i].multiplicities},
                   {"class", to_string(v.cls)},
                   {"flow_status", to_string(res.status)},
                   {"final_moment_norm", res.final_moment_norm},
                   {"agree", flow_agrees(v.cls, res.status)}};
    });
    int agree = 0;
    std::ostringstream csv;
    csv << "index,class,flow_status,agree\n";
    for (const auto& r : rows) {
        agree += r["agree"].get<bool>();
        csv << r["index"].get<std::size_t>() << ',' << r["class"].get<std::string>() << ','
            << r["flow_status"].get<std::string>() << ',' << (r["agree"].get<bool>() ? 1 : 0) << '\n';
    }
    return {{{"rows", rows}, {"agreement", agree}, {"total", rows.size()}}, csv.str()};
}

// -------------------------------------------------------------- flow --

Output cmd_flow(const json& in, const CommandOptions& opt) {
    const auto p = problem_from_json(in);
    const FlowResult res = flow_to_zero(*p, flow_config(in, opt));
    return {{{"kind", p->kind()}, {"flow", to_json(res)}}, trace_csv(res)};
}

// ------------------------------------------------------------ metric --

Output cmd_metric_balance(const json& in, const CommandOptions& opt) {
    if (opt.r < 1) throw InputError("--r must be a positive integer", "/options/r");
    if (opt.anderson < 0) throw InputError("anderson depth must be nonnegative", "/options/anderson");
    const RadialPotential phi = potential_from_json(in);
    MetricOptions mo;
    mo.anderson_depth = opt.anderson;
    const BalanceResult res = balance_iterate(phi, opt.r, opt.tol.value_or(1e-8), opt.max_iters.value_or(500), mo);
    const BergmanProfile b = bergman(*res.potential, gram(*res.potential, opt.r, mo), opt.r, mo);
    json out{{"r", opt.r},
             {"iterations", res.iterations},
             {"residual", res.residual},
             {"converged", res.converged},
             {"residual_trace", res.residual_trace},
             {"bergman", to_json(b)},
             {"distance_to_round", potential_distance(*res.potential, RadialPotential::round(), mo)}};
    return {out, bergman_csv(b)};
}

// ------------------------------------------------------------- slope --

json family_summary(const SlopeFamily& f) {
    return {{"params", f.params},
            {"description", f.h.description},
            {"n", f.h.n},
            {"a0", rat(f.h.a0)},
            {"a1", rat(f.h.a1)},
            {"mu", rat(mu(f.h))},
            {"epsilon", rat(f.hs.epsilon)},
            {"a0x", to_json(f.hs.a0x)},
            {"a1x", to_json(f.hs.a1x)}};
}

Output cmd_slope_classify(const json& in, const CommandOptions& opt) {
    if (opt.samples < 1) throw InputError("samples must be positive", "/options/samples");
    const SlopeFamily f = family_from_json(in);
    const SlopeVerdict v = slope_classify(f.h, f.hs);
    json series = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "c,mu_c,c_exact,mu_c_exact\n";
    for (int k = 1; k <= opt.samples; ++k) {
        const Rational c = f.hs.epsilon * Rational(k) / Rational(opt.samples);
        const Rational m = mu_c(f.hs, c);
        series.push_back({{"c", rat(c)}, {"mu_c", rat(m)}});
        csv << to_double(c) << ',' << to_double(m) << ',' << rat(c) << ',' << rat(m) << '\n';
    }
    return {{{"family", family_summary(f)}, {"verdict", to_json(v)}, {"mu_c", series}}, csv.str()};
}

json weights_to_json(const TestConfigWeights& w, const SlopeFamily& f, const Rational& c) {
    json out{{"n", f.h.n}, {"a0", rat(f.h.a0)}, {"a1", rat(f.h.a1)}, {"c", rat(c)}};
    if (w.is_table()) {
        json rows = json::array();
        for (const auto& row : w.table) {
            json byk = json::array();
            for (const auto& [k, v] : row.by_k) byk.push_back({k.str(), rat(v)});
            rows.push_back({{"r", row.r.str()}, {"h0", rat(row.h0)}, {"by_k", byk}});
        }
        out["mode"] = "table";
        out["table"] = rows;
    } else {
        json seq = json::array();
        for (const auto& [r, v] : w.sequence) seq.push_back({r.str(), rat(v)});
        out["mode"] = "sequence";
        out["sequence"] = seq;
    }
    return out;
}

Rational json_rational(const json& j, const std::string& ptr) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (!j.is_string()) throw InputError("expected an integer or a \"p/q\" string", ptr);
    try {
        return parse_rational(j.get<std::string>());
    } catch (const InputError& e) {
        throw InputError(e.what(), ptr);
    }
}

Integer json_integer(const json& j, const std::string& ptr) {
    const Rational q = json_rational(j, ptr);
    if (denominator_of(q) != 1) throw InputError("expected an integer", ptr);
    return numerator_of(q);
}

std::vector<std::pair<Integer, Rational>> json_pairs(const json& j, const std::string& ptr) {
    if (!j.is_array()) throw InputError("expected an array of [index, value] pairs", ptr);
    std::vector<std::pair<Integer, Rational>> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = ptr + "/" + std::to_string(i);
        if (!j[i].is_array() || j[i].size() != 2) throw InputError("expected an [index, value] pair", p);
        out.push_back({json_integer(j[i][0], p + "/0"), json_rational(j[i][1], p + "/1")});
    }
    return out;
}

std::pair<TestConfigWeights, HilbertData> weights_from_json(const json& j) {
    if (!j.is_object()) throw InputError("weights file must be an object", "");
    HilbertData h;
    if (!j.contains("n") || !j["n"].is_number_integer()) throw InputError("n must be an integer", "/n");
    h.n = j["n"].get<int>();
    if (!j.contains("a0")) throw InputError("missing field 'a0'", "/a0");
    if (!j.contains("a1")) throw InputError("missing field 'a1'", "/a1");
    h.a0 = json_rational(j["a0"], "/a0");
    h.a1 = json_rational(j["a1"], "/a1");
    h.validate();
    TestConfigWeights w;
    if (j.contains("table")) {
        const auto& t = j["table"];
        if (!t.is_array() || t.empty()) throw InputError("table must be a nonempty array", "/table");
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string p = "/table/" + std::to_string(i);
            if (!t[i].is_object() || !t[i].contains("r") || !t[i].contains("h0") || !t[i].contains("by_k"))
                throw InputError("table row needs r, h0 and by_k", p);
            w.table.push_back({json_integer(t[i]["r"], p + "/r"), json_rational(t[i]["h0"], p + "/h0"),
                               json_pairs(t[i]["by_k"], p + "/by_k")});
        }
    } else {
        if (!j.contains("sequence")) throw InputError("missing field 'sequence'", "/sequence");
        w.sequence = json_pairs(j["sequence"], "/sequence");
        if (w.sequence.empty()) throw InputError("weight sequence must be nonempty", "/sequence");
    }
    return {w, h};
}

json df_to_json(const DfResult& d) {
    json out{{"df", rat(d.df)}, {"sign", sign(d.df)}};
    if (d.b0) out["b0"] = rat(*d.b0);
    if (d.b1) out["b1"] = rat(*d.b1);
    if (d.leading) out["leading"] = rat(*d.leading);
    return out;
}

TestConfigWeights family_weights(const SlopeFamily& f, const Rational& c, const CommandOptions& opt) {
    if (opt.r_min < 1 || opt.r_max < opt.r_min) throw InputError("need 1 <= r_min <= r_max", "/options/r_min");
    if (opt.k_max <= 0) return normal_cone_weights(f, c, opt.r_min, opt.r_max);
    std::vector<Integer> ks;
    for (int k = 1; k <= opt.k_max; ++k) ks.push_back(k);
    return normal_cone_table(f, c, admissible_r(c, opt.r_min, opt.r_max), ks);
}

Output cmd_weights(const json& in, const CommandOptions& opt) {
    const SlopeFamily f = family_from_json(in);
    const Rational c = parse_c(opt.c);
    const TestConfigWeights w = family_weights(f, c, opt);
    std::ostringstream csv;
    if (w.is_table()) {
        csv << "r,k,w\n";
        for (const auto& row : w.table)
            for (const auto& [k, v] : row.by_k) csv << row.r << ',' << k << ',' << rat(v) << '\n';
    } else {
        csv << "r,w_r\n";
        for (const auto& [r, v] : w.sequence) csv << r << ',' << rat(v) << '\n';
    }
    return {weights_to_json(w, f, c), csv.str()};
}

Output cmd_slope_weights(const json& in, const CommandOptions& opt) {
    const SlopeFamily f = family_from_json(in);
    const Rational c = parse_c(opt.c);
    const auto rs = admissible_r(c, opt.r_min, opt.r_max);
    const TestConfigWeights w = normal_cone_weights(f, c, opt.r_min, opt.r_max);
    const auto [b0, b1] = trapezium_asymptotics(f.hs, c);
    json rows = json::array();
    std::ostringstream csv;
    csv << "r,w_r,predicted,difference\n";
    for (const auto& [r, v] : w.sequence) {
        Rational rn = 1;
        for (int i = 0; i < f.h.n; ++i) rn *= Rational(r);
        const Rational pred = b0 * rn * Rational(r) + b1 * rn;
        rows.push_back({{"r", r.str()}, {"w", rat(v)}, {"predicted", rat(pred)}, {"difference", rat(v - pred)}});
        csv << r << ',' << rat(v) << ',' << rat(pred) << ',' << rat(v - pred) << '\n';
    }
    return {{{"family", family_summary(f)}, {"c", rat(c)}, {"trapezium", {{"b0", rat(b0)}, {"b1", rat(b1)}}}, {"weights", rows}},
            csv.str()};
}

Output cmd_slope_df(const json& in, const CommandOptions& opt) {
    const SlopeFamily f = family_from_json(in);
    const Rational c = parse_c(opt.c);
    const DfResult d = df_invariant(family_weights(f, c, opt), f.h);
    const Rational gap = mu_c(f.hs, c) - mu(f.h);
    return {{{"family", family_summary(f)},
             {"c", rat(c)},
             {"df", df_to_json(d)},
             {"mu_c", rat(mu_c(f.hs, c))},
             {"mu_c_minus_mu", rat(gap)},
             {"sign_agrees", sign(d.df) == sign(gap)}},
            {}};
}

Output cmd_slope_chow(const json& in, const CommandOptions& opt) {
    const SlopeFamily f = family_from_json(in);
    const Rational c = parse_c(opt.c);
    if (denominator_of(c) != 1) throw InputError("Chow slopes need integral c", "/options/c");
    const ChowVerdict v = chow_compare(f, static_cast<int>(numerator_of(c)));
    return {{{"family", family_summary(f)},
             {"c", rat(c)},
             {"ch_c", v.ch_c ? json(rat(*v.ch_c)) : json(nullptr)},
             {"ch_x", rat(v.ch_x)},
             {"destabilising", v.destabilising},
             {"equal", v.equal}},
            {}};
}

Output cmd_slope_sheaf(const json& in, const CommandOptions&) {
    const SheafData s = sheaf_from_json(in);
    const SheafVerdict v = sheaf_verdict(s);
    json rows = json::array();
    for (std::size_t i = 0; i < s.subsheaves.size(); ++i)
        rows.push_back({{"name", s.subsheaves[i].first},
                        {"gieseker", to_string(v.gieseker_order[i])},
                        {"slope", to_string(v.slope_order[i])}});
    return {{{"gieseker", to_string(v.gieseker)}, {"slope", to_string(v.slope)}, {"subsheaves", rows}}, {}};
}

Output cmd_df(const json& in, const CommandOptions&) {
    // Accepts the output of `weights` as written, envelope included.
    const bool wrapped = in.is_object() && in.contains("schema_version") && in.contains("result");
    const auto [w, h] = weights_from_json(wrapped ? in["result"] : in);
    return {df_to_json(df_invariant(w, h)), {}};
}

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table{
        {"hm", cmd_hm},
        {"hypersurface", cmd_hypersurface},
        {"points classify", cmd_points_classify},
        {"points balance", cmd_points_balance},
        {"points suite", cmd_points_suite},
        {"flow", cmd_flow},
        {"metric balance", cmd_metric_balance},
        {"slope classify", cmd_slope_classify},
        {"slope weights", cmd_slope_weights},
        {"slope df", cmd_slope_df},
        {"slope chow", cmd_slope_chow},
        {"slope sheaf", cmd_slope_sheaf},
        {"weights", cmd_weights},
        {"df", cmd_df},
    };
    return table;
}

json error_json(const std::string& kind, const std::string& message, const std::string& pointer) {
    return {{"kind", kind}, {"message", message}, {"pointer", pointer}};
}

Output cmd_batch(const json& manifest, const CommandOptions& base) {
    if (!manifest.is_object()) throw InputError("batch manifest must be an object", "");
    if (!manifest.contains("subcommand") || !manifest["subcommand"].is_string())
        throw InputError("batch needs a subcommand string", "/subcommand");
    const std::string command = manifest["subcommand"];
    if (command == "batch" || !handlers().count(command))
        throw InputError("unsupported batch subcommand '" + command + "'", "/subcommand");
    const CommandOptions opt = options_from_json(manifest.value("options", json::object()), base);
    const json inputs = manifest.value("inputs", json::array());
    if (!inputs.is_array()) throw InputError("inputs must be an array", "/inputs");
    std::vector<json> rows(inputs.size());
    run_indexed(inputs.size(), Exec::Parallel, [&](std::size_t i) {
        json row{{"index", i}};
        try {
            const json in = inputs[i].is_string() ? read_json_file(inputs[i].get<std::string>()) : inputs[i];
            row["ok"] = true;
            row["result"] = execute(command, in, opt).payload;
        } catch (const InputError& e) {
            row["ok"] = false;
            row["error"] = error_json("input", e.what(), e.pointer());
        } catch (const NumericalError& e) {
            row["ok"] = false;
            row["error"] = error_json("numerical", e.what(), "");
        } catch (const std::exception& e) {
            row["ok"] = false;
            row["error"] = error_json("input", e.what(), "");
        }
        rows[i] = std::move(row);
    });
    std::size_t ok = 0;
    for (const auto& r : rows) ok += r["ok"].get<bool>();
    return {{{"subcommand", command}, {"rows", rows}, {"succeeded", ok}, {"failed", rows.size() - ok}}, {}};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << text;
}

} // namespace

CommandOptions options_from_json(const json& j, CommandOptions o) {
    if (!j.is_object()) throw InputError("options must be an object", "/options");
    auto get_int = [&](const char* key, int& target) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_integer()) throw InputError(std::string(key) + " must be an integer", std::string("/options/") + key);
        target = j[key].get<int>();
    };
    if (j.contains("tol")) {
        if (!j["tol"].is_number()) throw InputError("tol must be a number", "/options/tol");
        o.tol = j["tol"].get<double>();
    }
    if (j.contains("max_iters")) {
        int v = 0;
        get_int("max_iters", v);
        o.max_iters = v;
    }
    if (j.contains("brute")) {
        int v = 0;
        get_int("brute", v);
        o.brute_bound = v;
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw InputError("seed must be a nonnegative integer", "/options/seed");
        o.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("c")) {
        if (j["c"].is_number_integer()) o.c = std::to_string(j["c"].get<long long>());
        else if (j["c"].is_string()) o.c = j["c"].get<std::string>();
        else throw InputError("c must be an integer or a \"p/q\" string", "/options/c");
    }
    get_int("r", o.r);
    get_int("anderson", o.anderson);
    get_int("r_min", o.r_min);
    get_int("r_max", o.r_max);
    get_int("k_max", o.k_max);
    get_int("samples", o.samples);
    get_int("count", o.count);
    get_int("max_total", o.max_total);
    get_int("max_multiplicity", o.max_multiplicity);
    return o;
}

Output execute(const std::string& command, const json& input, const CommandOptions& opt) {
    if (command == "batch") return cmd_batch(input, opt);
    const auto it = handlers().find(command);
    if (it == handlers().end()) throw InputError("unknown command '" + command + "'");
    return it->second(input, opt);
}

std::vector<std::string> commands() {
    std::vector<std::string> out;
    for (const auto& [k, v] : handlers()) out.push_back(k);
    out.push_back("batch");
    return out;
}

json envelope(const std::string& command, const CommandOptions& opt, json result) {
    return {{"schema_version", schema_version}, {"command", command}, {"seed", opt.seed}, {"result", std::move(result)}};
}

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability computations: weight polytopes, moment-map flows, balanced metrics, slopes"};
    app.name("stabkit");
    app.require_subcommand(1);
    app.fallthrough();

    CommandOptions opt;
    std::string json_path, csv_path, input_path;
    app.add_option("--json", json_path, "Write the JSON payload to this file instead of stdout");
    app.add_option("--csv", csv_path, "Write the plot-ready CSV series to this file");
    app.add_option("--seed", opt.seed, "Seed for randomized suites (recorded in the output)");
    app.add_option_function<double>("--tol", [&](double t) { opt.tol = t; }, "Convergence tolerance override");
    app.add_option_function<int>("--max-iters", [&](int m) { opt.max_iters = m; }, "Iteration cap override");

    std::string command;
    auto with_input = [&](CLI::App* sub, const std::string& name) {
        sub->add_option("input", input_path, "Input JSON file")->required();
        sub->callback([&command, name] { command = name; });
    };
    auto with_family = [&](CLI::App* sub, const std::string& name) {
        sub->add_option("--family", input_path, "Family JSON file")->required();
        sub->callback([&command, name] { command = name; });
    };
    auto weight_range = [&](CLI::App* sub) {
        sub->add_option("--c", opt.c, "Rational parameter c, as p/q");
        sub->add_option("--r-min", opt.r_min, "Smallest r");
        sub->add_option("--r-max", opt.r_max, "Largest r");
    };

    auto* hm = app.add_subcommand("hm", "Hilbert-Mumford verdict for a torus weight system");
    with_input(hm, "hm");
    hm->add_option_function<int>("--brute", [&](int b) { opt.brute_bound = b; }, "Cross-check by enumerating 1-PS up to this bound");

    with_input(app.add_subcommand("hypersurface", "Newton polytope verdict for a hypersurface"), "hypersurface");

    auto* points = app.add_subcommand("points", "Weighted points on P^1");
    points->require_subcommand(1);
    with_input(points->add_subcommand("classify", "Multiplicity rule"), "points classify");
    with_input(points->add_subcommand("balance", "Moment-map flow with the verdict alongside"), "points balance");
    auto* suite = points->add_subcommand("suite", "Seeded random configurations: verdict vs flow");
    suite->add_option("--count", opt.count, "Number of configurations");
    suite->add_option("--max-total", opt.max_total, "Bound on total multiplicity");
    suite->add_option("--max-multiplicity", opt.max_multiplicity, "Bound on each multiplicity");
    suite->callback([&] { command = "points suite"; });

    with_input(app.add_subcommand("flow", "Moment-map flow for a JSON instance"), "flow");

    auto* metric = app.add_subcommand("metric", "Balanced metrics on (P^1, O(r))");
    metric->require_subcommand(1);
    auto* balance = metric->add_subcommand("balance", "Iterate the T-operator from a potential");
    balance->add_option("--r", opt.r, "Power r of O(1)")->required();
    balance->add_option("--phi", input_path, "Potential JSON file")->required();
    balance->add_option("--anderson", opt.anderson, "Anderson mixing depth (0 for plain iteration)");
    balance->callback([&] { command = "metric balance"; });

    auto* slope = app.add_subcommand("slope", "Exact slope calculators");
    slope->require_subcommand(1);
    auto* sc = slope->add_subcommand("classify", "Slope verdict over c in (0, epsilon]");
    with_family(sc, "slope classify");
    sc->add_option("--samples", opt.samples, "Number of c samples in the mu_c series");
    auto* sw = slope->add_subcommand("weights", "Normal-cone weights against the trapezium prediction");
    with_family(sw, "slope weights");
    weight_range(sw);
    auto* sd = slope->add_subcommand("df", "Futaki invariant from normal-cone weights");
    with_family(sd, "slope df");
    weight_range(sd);
    sd->add_option("--k-max", opt.k_max, "Use the (r, k) table with k = 1..k_max");
    auto* sch = slope->add_subcommand("chow", "Chow slope at integral c");
    with_family(sch, "slope chow");
    sch->add_option("--c", opt.c, "Integral c");
    with_input(slope->add_subcommand("sheaf", "Gieseker and slope comparison"), "slope sheaf");

    auto* weights = app.add_subcommand("weights", "Write a normal-cone weight file for df");
    with_family(weights, "weights");
    weight_range(weights);
    weights->add_option("--k-max", opt.k_max, "Emit the (r, k) table with k = 1..k_max");

    with_input(app.add_subcommand("df", "Futaki invariant from a weight file"), "df");
    with_input(app.add_subcommand("batch", "Run one subcommand over a list of inputs"), "batch");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", error_json("usage", e.what(), "")}}.dump() << '\n';
        return BadInput;
    }

    try {
        const json input = input_path.empty() ? json::object() : read_json_file(input_path);
        Output o = execute(command, input, opt);
        const std::string text = envelope(command, opt, std::move(o.payload)).dump(2) + "\n";
        if (json_path.empty()) out << text;
        else write_file(json_path, text);
        if (!csv_path.empty()) {
            if (o.csv.empty()) throw InputError("'" + command + "' has no CSV series");
            write_file(csv_path, o.csv);
        }
        return Ok;
    } catch (const InputError& e) {
        err << json{{"error", error_json("input", e.what(), e.pointer())}}.dump() << '\n';
        return BadInput;
    } catch (const UnsupportedOperation& e) {
        err << json{{"error", error_json("input", e.what(), "")}}.dump() << '\n';
        return BadInput;
    } catch (const NumericalError& e) {
        err << json{{"error", error_json("numerical", e.what(), "")}}.dump() << '\n';
        return NumericalAbort;
    } catch (const json::exception& e) {
        err << json{{"error", error_json("input", e.what(), "")}}.dump() << '\n';
        return BadInput;
    }
}

} // namespace stabkit::cli
