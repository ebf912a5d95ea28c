#include "stabkit/slope.hpp"

#include "stabkit/errors.hpp"
#include "stabkit/parallel.hpp"

#include <algorithm>

namespace stabkit {

namespace {

Integer choose2(const Integer& m) { return m * (m - 1) / 2; }

bool is_integral(const Rational& q) { return denominator_of(q) == 1; }

Rational rational_from_json(const nlohmann::json& j, const std::string& ptr) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const InputError& e) {
            throw InputError(e.what(), ptr);
        }
    }
    throw InputError("expected an integer or a \"p/q\" string", ptr);
}

RationalPoly poly_from_json(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_array()) throw InputError("expected an array of coefficients, lowest degree first", ptr);
    std::vector<Rational> c;
    for (std::size_t i = 0; i < j.size(); ++i) c.push_back(rational_from_json(j[i], ptr + "/" + std::to_string(i)));
    return RationalPoly(std::move(c));
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'", "");
    return j[key];
}

int int_field(const nlohmann::json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_number_integer()) throw InputError(std::string(key) + " must be an integer", std::string("/") + key);
    return v.get<int>();
}

bool bool_field(const nlohmann::json& j, const char* key, bool def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_boolean()) throw InputError(std::string(key) + " must be a boolean", std::string("/") + key);
    return j[key].get<bool>();
}

RationalPoly slope_integrand(const HilbertSamuelData& hs) {
    return hs.a1x + hs.a0x.derivative() * Rational(1, 2);
}

// A rational strictly inside the k-th gap between consecutive roots of p on
// (0, eps): exactly k roots lie in (0, point] and p(point) != 0.
Rational point_in_gap(const RationalPoly& p, const std::vector<RationalPoly>& sturm, const RootInterval& left,
                      const RootInterval& right, int k) {
    auto valid = [&](const Rational& x) {
        return x > left.lo && x < right.hi && p(x) != 0 && count_roots(sturm, Rational(0), x) == k;
    };
    if (left.hi <= right.lo) {
        const Rational s = simplest_between(left.hi, right.lo);
        if (valid(s)) return s;
    }
    Rational lo = left.lo, hi = right.hi;
    for (int it = 0; it < 400; ++it) {
        const Rational mid = (lo + hi) / 2;
        const int cnt = count_roots(sturm, Rational(0), mid);
        if (cnt < k || (cnt == k && p(mid) == 0)) lo = mid;
        else if (cnt > k) hi = mid;
        else return mid;
    }
    throw NumericalError("could not separate roots");
}

} // namespace

// ------------------------------------------------------------------ data --

void HilbertData::validate() const {
    if (n < 1) throw InputError("dimension must be at least 1", "/n");
    if (a0 <= 0) throw InputError("a0 must be positive", "/a0");
}

void HilbertSamuelData::validate(const HilbertData& h) const {
    h.validate();
    if (a0x(Rational(0)) != h.a0) throw InputError("a0(0) differs from a0", "/a0x");
    if (a1x(Rational(0)) != h.a1) throw InputError("a1(0) differs from a1", "/a1x");
    if (epsilon <= 0) throw InputError("epsilon must be positive", "/epsilon");
    if (a0x.degree() > 0 && !isolate_roots(a0x, Rational(0), epsilon).empty())
        throw InputError("a0(x) must be positive on [0, epsilon)", "/a0x");
}

SlopeFamily curve_point_family(int genus, int degree) {
    if (genus < 0) throw InputError("genus must be nonnegative", "/genus");
    if (degree < 1) throw InputError("degree must be positive", "/degree");
    SlopeFamily f;
    f.name = "curve";
    f.params = {{"family", "curve"}, {"genus", genus}, {"degree", degree}};
    f.h = {1, Rational(degree), Rational(1 - genus), "genus " + std::to_string(genus) + " curve, degree " + std::to_string(degree)};
    f.hs.a0x = RationalPoly({Rational(degree), Rational(-1)});
    f.hs.a1x = RationalPoly::constant(Rational(1 - genus));
    f.hs.epsilon = degree;
    // L^r(-d r p) has degree 0: generated by sections only when trivial.
    f.hs.saturated_at_epsilon = genus == 0;
    f.hs.contraction_at_epsilon = genus == 0;
    const Integer g = genus, d = degree;
    const bool canonical = genus >= 2 && degree == 2 * genus - 2;
    f.hs.exact_h0 = [g, d, canonical](const Integer& j, const Integer& r) -> Integer {
        const Integer D = d * r - j;
        if (D < 0) return 0;
        if (D > 2 * g - 2) return D + 1 - g;
        // L = K: h0(K) = g, and K is base point free.
        if (canonical && r == 1 && j <= 1) return g - j;
        throw InputError("section count of a special divisor is not determined by the degree");
    };
    return f;
}

SlopeFamily p1_point_family() {
    SlopeFamily f = curve_point_family(0, 1);
    f.name = "p1";
    f.params = {{"family", "p1"}};
    f.h.description = "P^1 with O(1), a point";
    return f;
}

SlopeFamily blowup_p2_family(int a, int b) {
    if (!(a > b && b > 0)) throw InputError("need a > b > 0", "/a");
    SlopeFamily f;
    f.name = "blowup_p2";
    f.params = {{"family", "blowup_p2"}, {"a", a}, {"b", b}};
    const Rational A = a, B = b;
    f.h = {2, (A * A - B * B) / 2, (3 * A - B) / 2,
           "Bl_p P^2 with " + std::to_string(a) + "H - " + std::to_string(b) + "E, Z = E"};
    // (a^2 - (b + x)^2) / 2 and (3a - b - x) / 2
    f.hs.a0x = RationalPoly({(A * A - B * B) / 2, -B, Rational(-1, 2)});
    f.hs.a1x = RationalPoly({(3 * A - B) / 2, Rational(-1, 2)});
    f.hs.epsilon = A - B;
    // L - (a-b)E = a(H - E) is base point free.
    f.hs.saturated_at_epsilon = true;
    f.hs.contraction_at_epsilon = false;
    const Integer ai = a, bi = b;
    // Plane curves of degree m with multiplicity >= k at p: C(m+2,2) - C(k+1,2) for 0 <= k <= m+1.
    f.hs.exact_h0 = [ai, bi](const Integer& j, const Integer& r) -> Integer {
        const Integer m = ai * r, k = bi * r + j;
        if (k > m + 1) return 0;
        return choose2(m + 2) - choose2(k + 1);
    };
    return f;
}

SlopeFamily rescale(const SlopeFamily& f, int m) {
    if (m < 1) throw InputError("rescaling power must be positive", "/rescale");
    SlopeFamily g = f;
    const Rational M = m;
    Rational mn = 1;
    for (int i = 0; i < f.h.n; ++i) mn *= M;
    g.h.a0 = f.h.a0 * mn;
    g.h.a1 = f.h.a1 * mn / M;
    g.hs.a0x = f.hs.a0x.scale_variable(1 / M) * mn;
    g.hs.a1x = f.hs.a1x.scale_variable(1 / M) * (mn / M);
    g.hs.epsilon = f.hs.epsilon * M;
    if (f.hs.exact_h0) {
        const SectionCounter inner = f.hs.exact_h0;
        const Integer mi = m;
        g.hs.exact_h0 = [inner, mi](const Integer& j, const Integer& r) { return inner(j, mi * r); };
    }
    g.params["rescale"] = m * (f.params.contains("rescale") ? f.params["rescale"].get<int>() : 1);
    return g;
}

SlopeFamily family_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("family must be an object", "");
    const auto& kind = require(j, "family");
    if (!kind.is_string()) throw InputError("family must be a string", "/family");
    const std::string k = kind;
    SlopeFamily f;
    if (k == "curve") f = curve_point_family(int_field(j, "genus"), int_field(j, "degree"));
    else if (k == "p1") f = p1_point_family();
    else if (k == "blowup_p2") f = blowup_p2_family(int_field(j, "a"), int_field(j, "b"));
    else if (k == "raw") {
        f.name = "raw";
        f.params = j;
        f.h.n = int_field(j, "n");
        f.h.a0 = rational_from_json(require(j, "a0"), "/a0");
        f.h.a1 = rational_from_json(require(j, "a1"), "/a1");
        f.h.description = j.value("description", std::string("raw data"));
        f.hs.a0x = poly_from_json(require(j, "a0x"), "/a0x");
        f.hs.a1x = poly_from_json(require(j, "a1x"), "/a1x");
        f.hs.epsilon = rational_from_json(require(j, "epsilon"), "/epsilon");
        f.hs.saturated_at_epsilon = bool_field(j, "saturated", false);
        f.hs.contraction_at_epsilon = bool_field(j, "contraction", false);
    } else {
        throw InputError("unknown family '" + k + "'", "/family");
    }
    if (j.contains("rescale")) {
        if (!j["rescale"].is_number_integer()) throw InputError("rescale must be an integer", "/rescale");
        f = rescale(f, j["rescale"].get<int>());
    }
    f.hs.validate(f.h);
    return f;
}

// ----------------------------------------------------------------- slopes --

Rational mu(const HilbertData& h) {
    h.validate();
    return h.a1 / h.a0;
}

Rational mu_c(const HilbertSamuelData& hs, const Rational& c) {
    if (c <= 0 || c > hs.epsilon) throw InputError("c must lie in (0, epsilon]", "/c");
    const Rational den = hs.a0x.integrate(Rational(0), c);
    if (den <= 0) throw InputError("∫ a0 vanishes on [0, c]", "/c");
    return slope_integrand(hs).integrate(Rational(0), c) / den;
}

std::string to_string(SlopeClass c) {
    switch (c) {
    case SlopeClass::Stable: return "Stable";
    case SlopeClass::Semistable: return "Semistable";
    case SlopeClass::Unstable: return "Unstable";
    }
    return "?";
}

SlopeVerdict slope_classify(const HilbertData& h, const HilbertSamuelData& hs) {
    hs.validate(h);
    SlopeVerdict v;
    const Rational m = mu(h);
    v.numerator = hs.a0x.antiderivative() * m - slope_integrand(hs).antiderivative();
    const Rational eps = hs.epsilon;
    if (v.numerator.is_zero()) {
        v.identically_equal = true;
        v.equality_at_epsilon = true;
        v.cls = SlopeClass::Semistable;
        v.polystable = hs.saturated_at_epsilon && hs.contraction_at_epsilon;
        return v;
    }
    // N(0) = 0; work with N / c, which has the same sign for c > 0.
    const RationalPoly M = v.numerator.divmod(RationalPoly::monomial(1)).first;
    v.equalities = M.degree() > 0 ? isolate_roots(M, Rational(0), eps) : std::vector<RootInterval>{};
    const auto sturm = sturm_sequence(M);
    std::vector<RootInterval> bounds;
    bounds.push_back({Rational(0), Rational(0)});
    bounds.insert(bounds.end(), v.equalities.begin(), v.equalities.end());
    bounds.push_back({eps, eps});
    const Rational at_eps = v.numerator(eps);
    v.equality_at_epsilon = at_eps == 0;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const Rational w = point_in_gap(M, sturm, bounds[k], bounds[k + 1], static_cast<int>(k));
        if (M(w) < 0) {
            DestabilizingInterval d;
            d.lower = bounds[k];
            d.upper = bounds[k + 1];
            d.witness = w;
            d.includes_epsilon = k + 2 == bounds.size() && hs.saturated_at_epsilon && at_eps < 0;
            v.intervals.push_back(d);
        }
    }
    if (!v.intervals.empty()) v.cls = SlopeClass::Unstable;
    else if (!v.equalities.empty()) v.cls = SlopeClass::Semistable;
    else if (v.equality_at_epsilon && hs.saturated_at_epsilon) {
        v.cls = SlopeClass::Semistable;
        v.polystable = hs.contraction_at_epsilon;
    } else {
        v.cls = SlopeClass::Stable;
    }
    return v;
}

// ------------------------------------------------------------------- chow --

Rational chow_slope(const std::vector<Integer>& h0_list, const HilbertSamuelData& hs) {
    const Rational c = static_cast<long long>(h0_list.size());
    if (h0_list.empty()) throw InputError("Chow slope needs c >= 1", "/c");
    if (c > hs.epsilon) throw InputError("c exceeds epsilon", "/c");
    Integer s = 0;
    for (const auto& h : h0_list) s += h;
    return Rational(s) / hs.a0x.integrate(Rational(0), c);
}

Rational chow_mu(const HilbertData& h, const Integer& N) {
    h.validate();
    return Rational(N + 1) / h.a0;
}

ChowVerdict chow_compare(const SlopeFamily& f, int c) {
    if (!f.hs.exact_h0) throw InputError("family has no section counts", "/family");
    if (c < 0) throw InputError("c must be nonnegative", "/c");
    ChowVerdict v;
    v.ch_x = chow_mu(f.h, f.hs.exact_h0(0, 1) - 1);
    if (c == 0) return v;
    std::vector<Integer> h0;
    for (int i = 1; i <= c; ++i) h0.push_back(f.hs.exact_h0(i, 1));
    v.ch_c = chow_slope(h0, f.hs);
    v.destabilising = *v.ch_c > v.ch_x;
    v.equal = *v.ch_c == v.ch_x;
    return v;
}

// ---------------------------------------------------------------- weights --

Integer normal_cone_weight(const HilbertSamuelData& hs, const Rational& c, const Integer& r) {
    if (!hs.exact_h0) throw InputError("normal-cone weights need exact section counts", "/family");
    if (c < 0 || c > hs.epsilon) throw InputError("c must lie in [0, epsilon]", "/c");
    if (r < 1) throw InputError("r must be positive", "/r");
    const Rational cr = c * Rational(r);
    if (!is_integral(cr)) throw InputError("c r must be an integer", "/c");
    const Integer n = numerator_of(cr);
    Integer w = 0;
    for (Integer j = 1; j <= n; ++j) w += hs.exact_h0(j, r);
    return w - n * hs.exact_h0(0, r);
}

std::pair<Rational, Rational> trapezium_asymptotics(const HilbertSamuelData& hs, const Rational& c) {
    const Rational z = 0;
    return {hs.a0x.integrate(z, c) - c * hs.a0x(z), slope_integrand(hs).integrate(z, c) - c * hs.a1x(z)};
}

std::vector<Integer> admissible_r(const Rational& c, int r_min, int r_max) {
    std::vector<Integer> out;
    for (int r = std::max(1, r_min); r <= r_max; ++r)
        if (is_integral(c * r)) out.push_back(r);
    return out;
}

TestConfigWeights normal_cone_weights(const SlopeFamily& f, const Rational& c, int r_min, int r_max) {
    const auto rs = admissible_r(c, r_min, r_max);
    TestConfigWeights w;
    w.sequence.resize(rs.size());
    run_indexed(rs.size(), Exec::Parallel, [&](std::size_t i) {
        w.sequence[i] = {rs[i], Rational(normal_cone_weight(f.hs, c, rs[i]))};
    });
    return w;
}

TestConfigWeights normal_cone_table(const SlopeFamily& f, const Rational& c, const std::vector<Integer>& r_list,
                                    const std::vector<Integer>& k_list) {
    if (!f.hs.exact_h0) throw InputError("normal-cone weights need exact section counts", "/family");
    TestConfigWeights w;
    w.table.resize(r_list.size());
    run_indexed(r_list.size(), Exec::Parallel, [&](std::size_t i) {
        const Integer& r = r_list[i];
        const Rational hr = Rational(f.hs.exact_h0(0, r));
        const Rational wr = Rational(normal_cone_weight(f.hs, c, r));
        auto& row = w.table[i];
        row.r = r;
        row.h0 = hr;
        for (const Integer& k : k_list) {
            const Rational hrk = Rational(f.hs.exact_h0(0, r * k));
            const Rational wrk = Rational(normal_cone_weight(f.hs, c, r * k));
            // SL-normalised weight on det H0(L^{rk})* ⊗ det S^k H0(L^r).
            row.by_k.push_back({k, Rational(k) * wr * hrk / hr - wrk});
        }
    });
    return w;
}

RationalPoly exact_fit(const std::vector<std::pair<Rational, Rational>>& points, int deg) {
    if (deg < 0) throw InputError("degree must be nonnegative");
    if (points.size() < static_cast<std::size_t>(deg) + 1)
        throw InputError("underdetermined fit: need " + std::to_string(deg + 1) + " samples, got " +
                         std::to_string(points.size()));
    const auto m = static_cast<std::size_t>(deg) + 1;
    RationalPoly p;
    for (std::size_t i = 0; i < m; ++i) {
        RationalPoly basis = RationalPoly::constant(points[i].second);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const Rational d = points[i].first - points[j].first;
            if (d == 0) throw InputError("fit samples must be distinct");
            basis *= RationalPoly({-points[j].first / d, 1 / d});
        }
        p += basis;
    }
    for (const auto& [x, y] : points)
        if (p(x) != y)
            throw InputError("samples do not lie on a polynomial of degree " + std::to_string(deg) +
                             " (at " + to_string(x) + ")");
    return p;
}

DfResult df_invariant(const TestConfigWeights& w, const HilbertData& h) {
    h.validate();
    DfResult res;
    const int n = h.n;
    const Rational a0sq = h.a0 * h.a0;
    if (!w.is_table()) {
        std::vector<std::pair<Rational, Rational>> pts;
        for (const auto& [r, wr] : w.sequence) pts.push_back({Rational(r), wr});
        const RationalPoly p = exact_fit(pts, n + 1);
        res.b0 = p.coefficient(n + 1);
        res.b1 = p.coefficient(n);
        res.df = (*res.b1 * h.a0 - *res.b0 * h.a1) / a0sq;
        return res;
    }
    // a_{n+1}(r) h(r) / r^n = a0 w(r) - b0 r h(r) has degree n with leading coefficient a0^2 F1.
    std::vector<std::pair<Rational, Rational>> pts;
    for (const auto& row : w.table) {
        std::vector<std::pair<Rational, Rational>> byk;
        for (const auto& [k, v] : row.by_k) byk.push_back({Rational(k), v});
        const Rational lead = exact_fit(byk, n + 1).coefficient(n + 1);
        Rational rn = 1;
        for (int i = 0; i < n; ++i) rn *= Rational(row.r);
        pts.push_back({Rational(row.r), lead * row.h0 / rn});
    }
    const Rational top = exact_fit(pts, n).coefficient(n);
    res.leading = top / h.a0;
    res.df = top / a0sq;
    return res;
}

std::pair<Rational, Rational> hilbert_samuel_from_counts(const SlopeFamily& f, const Rational& x, int r_min,
                                                         int samples) {
    if (!f.hs.exact_h0) throw InputError("family has no section counts", "/family");
    std::vector<std::pair<Rational, Rational>> pts;
    for (int r = std::max(1, r_min); static_cast<int>(pts.size()) < samples; ++r) {
        const Rational j = x * r;
        if (!is_integral(j)) continue;
        pts.push_back({Rational(r), Rational(f.hs.exact_h0(numerator_of(j), r))});
    }
    const RationalPoly p = exact_fit(pts, f.h.n);
    return {p.coefficient(f.h.n), p.coefficient(f.h.n - 1)};
}

// ----------------------------------------------------------------- sheaves --

std::string to_string(Ordering o) {
    switch (o) {
    case Ordering::Less: return "less";
    case Ordering::Equal: return "equal";
    case Ordering::Greater: return "greater";
    }
    return "?";
}

namespace {

void require_monic(const RationalPoly& p, const char* which) {
    if (p.is_zero() || p.leading() != 1)
        throw InputError(std::string(which) + " must be monic (a reduced Hilbert polynomial)");
}

SlopeClass classify_orders(const std::vector<Ordering>& o) {
    if (std::find(o.begin(), o.end(), Ordering::Greater) != o.end()) return SlopeClass::Unstable;
    if (std::find(o.begin(), o.end(), Ordering::Equal) != o.end()) return SlopeClass::Semistable;
    return SlopeClass::Stable;
}

} // namespace

Ordering gieseker_compare(const RationalPoly& pF, const RationalPoly& pE) {
    require_monic(pF, "p_F");
    require_monic(pE, "p_E");
    const RationalPoly d = pE - pF;
    if (d.is_zero()) return Ordering::Equal;
    return d.leading() > 0 ? Ordering::Less : Ordering::Greater;
}

Ordering slope_compare(const RationalPoly& pF, const RationalPoly& pE) {
    require_monic(pF, "p_F");
    require_monic(pE, "p_E");
    if (pF.degree() != pE.degree()) throw InputError("slope comparison needs polynomials of equal degree");
    const int k = pE.degree() - 1;
    const Rational f = pF.coefficient(k), e = pE.coefficient(k);
    if (f == e) return Ordering::Equal;
    return f < e ? Ordering::Less : Ordering::Greater;
}

SheafVerdict sheaf_verdict(const SheafData& s) {
    SheafVerdict v;
    for (const auto& [name, pF] : s.subsheaves) {
        v.gieseker_order.push_back(gieseker_compare(pF, s.pE));
        v.slope_order.push_back(slope_compare(pF, s.pE));
    }
    v.gieseker = classify_orders(v.gieseker_order);
    v.slope = classify_orders(v.slope_order);
    return v;
}

SheafData sheaf_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("sheaf data must be an object", "");
    SheafData s;
    s.pE = poly_from_json(require(j, "pE"), "/pE");
    const auto& subs = require(j, "subsheaves");
    if (!subs.is_array()) throw InputError("subsheaves must be an array", "/subsheaves");
    for (std::size_t i = 0; i < subs.size(); ++i) {
        const std::string ptr = "/subsheaves/" + std::to_string(i);
        if (!subs[i].is_object() || !subs[i].contains("pF")) throw InputError("subsheaf needs pF", ptr);
        s.subsheaves.push_back({subs[i].value("name", "F" + std::to_string(i)), poly_from_json(subs[i]["pF"], ptr + "/pF")});
    }
    return s;
}

// ------------------------------------------------------------------- json --

nlohmann::json to_json(const RootInterval& r) {
    if (r.exact()) return to_string(r.lo);
    return {{"lo", to_string(r.lo)}, {"hi", to_string(r.hi)}};
}

nlohmann::json to_json(const RationalPoly& p) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : p.coefficients()) a.push_back(to_string(c));
    return a;
}

nlohmann::json to_json(const SlopeVerdict& v) {
    nlohmann::json iv = nlohmann::json::array();
    for (const auto& d : v.intervals)
        iv.push_back({{"lower", to_json(d.lower)},
                      {"upper", to_json(d.upper)},
                      {"includes_epsilon", d.includes_epsilon},
                      {"witness", to_string(d.witness)}});
    nlohmann::json eq = nlohmann::json::array();
    for (const auto& r : v.equalities) eq.push_back(to_json(r));
    return {{"class", to_string(v.cls)},
            {"destabilizing", iv},
            {"equalities", eq},
            {"equality_at_epsilon", v.equality_at_epsilon},
            {"identically_equal", v.identically_equal},
            {"polystable", v.polystable},
            {"numerator", to_json(v.numerator)}};
}

} // namespace stabkit
