#include "stabkit/io.hpp"

#include "stabkit/errors.hpp"

#include <sstream>

namespace stabkit {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    if (!j.is_object()) throw InputError("expected a JSON object", "");
    if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'", std::string("/") + key);
    return j[key];
}

int int_value(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_number_integer()) throw InputError("expected an integer", ptr);
    return j.get<int>();
}

LatticePoint lattice_point(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_array()) throw InputError("expected an integer vector", ptr);
    LatticePoint p;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_integer()) throw InputError("expected an integer", ptr + "/" + std::to_string(i));
        p.push_back(j[i].get<std::int64_t>());
    }
    return p;
}

std::vector<LatticePoint> lattice_points(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_array()) throw InputError("expected an array of integer vectors", ptr);
    std::vector<LatticePoint> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(lattice_point(j[i], ptr + "/" + std::to_string(i)));
    return out;
}

} // namespace

WeightSystem weight_system_from_json(const nlohmann::json& j) {
    WeightSystem ws;
    ws.dim = int_value(field(j, "dim"), "/dim");
    ws.weights = lattice_points(field(j, "weights"), "/weights");
    if (ws.weights.empty()) throw InputError("weight list must be nonempty", "/weights");
    for (std::size_t i = 0; i < ws.weights.size(); ++i)
        if (static_cast<int>(ws.weights[i].size()) != ws.dim)
            throw InputError("weight has the wrong dimension", "/weights/" + std::to_string(i));
    if (j.contains("support")) {
        const auto& s = j["support"];
        if (!s.is_array()) throw InputError("support must be an array of indices", "/support");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string ptr = "/support/" + std::to_string(i);
            const int k = int_value(s[i], ptr);
            if (k < 0 || k >= static_cast<int>(ws.weights.size())) throw InputError("support index out of range", ptr);
            ws.support.push_back(k);
        }
    } else {
        for (std::size_t i = 0; i < ws.weights.size(); ++i) ws.support.push_back(static_cast<int>(i));
    }
    ws.validate();
    return ws;
}

nlohmann::json to_json(const WeightSystem& ws) {
    return {{"dim", ws.dim}, {"weights", ws.weights}, {"support", ws.support}};
}

nlohmann::json to_json(const Verdict& v) {
    return {{"class", to_string(v.cls)},
            {"witness", v.witness ? nlohmann::json(*v.witness) : nlohmann::json(nullptr)},
            {"weight", v.weight ? nlohmann::json(*v.weight) : nlohmann::json(nullptr)}};
}

Hypersurface hypersurface_from_json(const nlohmann::json& j) {
    Hypersurface h;
    h.degree = int_value(field(j, "degree"), "/degree");
    h.nvars = int_value(field(j, "nvars"), "/nvars");
    h.monomials = lattice_points(field(j, "monomials"), "/monomials");
    for (std::size_t i = 0; i < h.monomials.size(); ++i)
        if (static_cast<int>(h.monomials[i].size()) != h.nvars)
            throw InputError("monomial has the wrong number of exponents", "/monomials/" + std::to_string(i));
    return h;
}

FlowConfig flow_config_from_json(const nlohmann::json& j, FlowConfig base) {
    if (j.is_null()) return base;
    if (!j.is_object()) throw InputError("flow options must be an object", "/flow");
    auto number = [&](const char* key, double& target) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) throw InputError(std::string(key) + " must be a number", std::string("/flow/") + key);
        target = j[key].get<double>();
    };
    number("tol", base.tol);
    number("initial_step", base.initial_step);
    number("backtrack", base.backtrack);
    number("divergence_threshold", base.divergence_threshold);
    number("max_step", base.max_step);
    if (j.contains("max_iters")) base.max_iters = int_value(j["max_iters"], "/flow/max_iters");
    if (j.contains("stall_window")) base.stall_window = int_value(j["stall_window"], "/flow/stall_window");
    base.validate();
    return base;
}

nlohmann::json to_json(const FlowResult& r) {
    nlohmann::json out{{"status", to_string(r.status)},
                       {"iterations", r.iterations},
                       {"final_moment_norm", r.final_moment_norm},
                       {"displacement", r.displacement},
                       {"escaped", r.escape.escaped},
                       {"escape_detail", r.escape.detail},
                       {"escape_witness", r.escape.witness},
                       {"note", r.note}};
    if (r.final_state) out["final_state"] = r.final_state->state_json();
    return out;
}

std::string trace_csv(const FlowResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "iter,moment_norm,step\n";
    for (const auto& t : r.trace) os << t.iter << ',' << t.moment_norm << ',' << t.step << '\n';
    return os.str();
}

nlohmann::json to_json(const BergmanProfile& b) {
    return {{"r", b.r}, {"integral", b.integral()}, {"min", b.min()}, {"max", b.max()}, {"nodes", b.u.size()}};
}

std::string bergman_csv(const BergmanProfile& b) {
    std::ostringstream os;
    os.precision(17);
    os << "u,theta,bergman,rho\n";
    for (std::size_t i = 0; i < b.u.size(); ++i)
        os << b.u[i] << ',' << b.theta[i] << ',' << b.value[i] << ',' << b.rho[i] << '\n';
    return os.str();
}

} // namespace stabkit
