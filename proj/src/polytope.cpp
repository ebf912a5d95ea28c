#include "stabkit/polytope.hpp"

#include "stabkit/errors.hpp"
#include "stabkit/exact_lp.hpp"
#include "stabkit/rational.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace stabkit {

namespace {

std::int64_t dot(const LatticePoint& a, const LatticePoint& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::int64_t sup_norm(const LatticePoint& v) {
    std::int64_t s = 0;
    for (auto x : v) s = std::max<std::int64_t>(s, x < 0 ? -x : x);
    return s;
}

std::int64_t min_pairing(const std::vector<LatticePoint>& ms, const LatticePoint& v) {
    std::int64_t best = dot(ms.front(), v);
    for (const auto& m : ms) best = std::min(best, dot(m, v));
    return best;
}

std::int64_t max_pairing(const std::vector<LatticePoint>& ms, const LatticePoint& v) {
    std::int64_t best = dot(ms.front(), v);
    for (const auto& m : ms) best = std::max(best, dot(m, v));
    return best;
}

// Visits the primitive vectors of sup-norm exactly s in lexicographic order
// until `pred` accepts one.
template <class Pred>
std::optional<LatticePoint> search_shell(int dim, std::int64_t s, bool sum_zero, Pred&& pred) {
    LatticePoint v(static_cast<std::size_t>(dim), -s);
    while (true) {
        if (sup_norm(v) == s && (!sum_zero || std::accumulate(v.begin(), v.end(), std::int64_t{0}) == 0) &&
            is_primitive(v) && pred(v))
            return v;
        int i = dim - 1;
        while (i >= 0 && v[static_cast<std::size_t>(i)] == s) {
            v[static_cast<std::size_t>(i)] = -s;
            --i;
        }
        if (i < 0) return std::nullopt;
        ++v[static_cast<std::size_t>(i)];
    }
}

// Smallest sup-norm first, then lexicographically smallest.
template <class Pred>
std::optional<LatticePoint> search_shells(int dim, std::int64_t max_norm, bool sum_zero, Pred&& pred) {
    for (std::int64_t s = 1; s <= max_norm; ++s)
        if (auto v = search_shell(dim, s, sum_zero, pred)) return v;
    return std::nullopt;
}

// Integral primitive multiple of a rational vector.
LatticePoint clear_denominators(const std::vector<Rational>& q) {
    Integer lcm = 1;
    for (const auto& x : q) {
        const Integer d = denominator_of(x);
        lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    LatticePoint out;
    out.reserve(q.size());
    Integer g = 0;
    std::vector<Integer> ints;
    for (const auto& x : q) {
        ints.push_back(numerator_of(x * lcm));
        g = boost::multiprecision::gcd(g, ints.back());
    }
    for (auto& x : ints) out.push_back((g == 0 ? x : Integer(x / g)).convert_to<std::int64_t>());
    return out;
}

// Some v with <m_k, v> >= rhs_k for every supported weight, from the LP in
// split variables v = v+ - v- with surplus columns.
std::optional<LatticePoint> lp_direction(const std::vector<LatticePoint>& ms, int dim,
                                         const std::vector<Rational>& rhs) {
    const std::size_t k = ms.size();
    const std::size_t d = static_cast<std::size_t>(dim);
    RationalMatrix A(k, std::vector<Rational>(2 * d + k, Rational(0)));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            A[i][j] = ms[i][j];
            A[i][d + j] = -ms[i][j];
        }
        A[i][2 * d + i] = -1;
    }
    auto x = find_nonnegative_solution(A, rhs);
    if (!x) return std::nullopt;
    std::vector<Rational> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = (*x)[j] - (*x)[d + j];
    return clear_denominators(v);
}

int rank_of(const std::vector<LatticePoint>& ms, int dim) {
    std::vector<std::vector<Rational>> M;
    for (const auto& m : ms) M.emplace_back(m.begin(), m.end());
    int rank = 0;
    for (int c = 0; c < dim && rank < static_cast<int>(M.size()); ++c) {
        std::size_t piv = static_cast<std::size_t>(rank);
        while (piv < M.size() && M[piv][static_cast<std::size_t>(c)] == 0) ++piv;
        if (piv == M.size()) continue;
        std::swap(M[piv], M[static_cast<std::size_t>(rank)]);
        const auto& P = M[static_cast<std::size_t>(rank)];
        for (std::size_t i = static_cast<std::size_t>(rank) + 1; i < M.size(); ++i) {
            if (M[i][static_cast<std::size_t>(c)] == 0) continue;
            const Rational f = M[i][static_cast<std::size_t>(c)] / P[static_cast<std::size_t>(c)];
            for (std::size_t j = 0; j < static_cast<std::size_t>(dim); ++j) M[i][j] -= f * P[j];
        }
        ++rank;
    }
    return rank;
}

struct HullPosition {
    StabilityClass cls;
    // LP-derived direction bounding the witness search (Unstable / StrictlySemistable).
    std::optional<LatticePoint> direction;
};

HullPosition locate_origin(const std::vector<LatticePoint>& ms, int dim) {
    const std::size_t k = ms.size();
    const std::size_t d = static_cast<std::size_t>(dim);

    // 0 in hull: lambda >= 0, sum lambda m = 0, sum lambda = 1.
    RationalMatrix A(d + 1, std::vector<Rational>(k, Rational(0)));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < d; ++j) A[j][i] = ms[i][j];
        A[d][i] = 1;
    }
    std::vector<Rational> b(d + 1, Rational(0));
    b[d] = 1;
    auto lambda = find_nonnegative_solution(A, b);
    if (!lambda) {
        auto v = lp_direction(ms, dim, std::vector<Rational>(k, Rational(1)));
        return {StabilityClass::Unstable, v};
    }

    // 0 in the relative interior iff every index carries positive mass in
    // some convex combination hitting 0.
    std::vector<bool> positive(k, false);
    for (std::size_t i = 0; i < k; ++i)
        if ((*lambda)[i] > 0) positive[i] = true;
    for (std::size_t i = 0; i < k; ++i) {
        if (positive[i]) continue;
        RationalMatrix Ai(d + 1, std::vector<Rational>(k, Rational(0)));
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j) Ai[j][c] = ms[c][j];
        Ai[d][i] = 1;
        auto mu = find_nonnegative_solution(Ai, b);
        if (!mu) {
            std::vector<Rational> rhs(k, Rational(0));
            rhs[i] = 1;
            return {StabilityClass::StrictlySemistable, lp_direction(ms, dim, rhs)};
        }
        for (std::size_t c = 0; c < k; ++c)
            if ((*mu)[c] > 0) positive[c] = true;
    }
    return {rank_of(ms, dim) == dim ? StabilityClass::Stable : StabilityClass::Polystable, std::nullopt};
}

} // namespace

std::string to_string(StabilityClass c) {
    switch (c) {
    case StabilityClass::Stable: return "Stable";
    case StabilityClass::Polystable: return "Polystable";
    case StabilityClass::StrictlySemistable: return "StrictlySemistable";
    case StabilityClass::Unstable: return "Unstable";
    }
    return "?";
}

StabilityClass parse_stability_class(const std::string& s) {
    for (auto c : {StabilityClass::Stable, StabilityClass::Polystable, StabilityClass::StrictlySemistable,
                   StabilityClass::Unstable})
        if (to_string(c) == s) return c;
    throw InputError("unknown stability class '" + s + "'");
}

bool operator==(const Verdict& a, const Verdict& b) {
    return a.cls == b.cls && a.witness == b.witness && a.weight == b.weight;
}

bool is_primitive(const OnePS& v) {
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x);
    return g == 1;
}

OnePS make_primitive(OnePS v) {
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x);
    if (g > 1)
        for (auto& x : v) x /= g;
    return v;
}

void WeightSystem::validate() const {
    if (dim < 1) throw InputError("dim must be positive", "/dim");
    if (weights.empty()) throw InputError("weights must be nonempty", "/weights");
    std::set<LatticePoint> seen;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (static_cast<int>(weights[i].size()) != dim)
            throw InputError("weight has wrong dimension", "/weights/" + std::to_string(i));
        if (!seen.insert(weights[i]).second)
            throw InputError("duplicate weight", "/weights/" + std::to_string(i));
    }
    if (support.empty()) throw InputError("support must be nonempty", "/support");
    std::set<int> sup;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const int s = support[i];
        if (s < 0 || s >= static_cast<int>(weights.size()))
            throw InputError("support index out of range", "/support/" + std::to_string(i));
        if (!sup.insert(s).second) throw InputError("duplicate support index", "/support/" + std::to_string(i));
    }
}

std::vector<LatticePoint> WeightSystem::supported_weights() const {
    std::vector<LatticePoint> out;
    out.reserve(support.size());
    for (int s : support) out.push_back(weights[static_cast<std::size_t>(s)]);
    return out;
}

std::int64_t ops_weight(const WeightSystem& ws, const OnePS& v) {
    ws.validate();
    if (static_cast<int>(v.size()) != ws.dim) throw InputError("1-PS has wrong dimension");
    return min_pairing(ws.supported_weights(), v);
}

Verdict hm_classify(const WeightSystem& ws) {
    ws.validate();
    const auto ms = ws.supported_weights();
    const HullPosition pos = locate_origin(ms, ws.dim);
    Verdict out;
    out.cls = pos.cls;
    if (pos.cls == StabilityClass::Unstable) {
        const std::int64_t bound = sup_norm(*pos.direction);
        out.witness = search_shells(ws.dim, bound, false, [&](const LatticePoint& v) { return min_pairing(ms, v) > 0; });
        out.weight = min_pairing(ms, *out.witness);
    } else if (pos.cls == StabilityClass::StrictlySemistable) {
        const std::int64_t bound = sup_norm(*pos.direction);
        out.witness = search_shells(ws.dim, bound, false, [&](const LatticePoint& v) {
            return min_pairing(ms, v) == 0 && max_pairing(ms, v) > 0;
        });
        out.weight = 0;
    }
    return out;
}

WeightSystem translate_weights(const WeightSystem& ws, const LatticePoint& chi) {
    if (static_cast<int>(chi.size()) != ws.dim) throw InputError("character has wrong dimension");
    WeightSystem out = ws;
    for (auto& w : out.weights)
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= chi[j];
    return out;
}

Verdict hypersurface_newton(int degree, int nvars, const std::vector<LatticePoint>& support) {
    if (degree < 1) throw InputError("degree must be positive", "/degree");
    if (nvars < 2) throw InputError("need at least two variables", "/nvars");
    if (support.empty()) throw InputError("monomial list must be nonempty", "/monomials");
    std::set<LatticePoint> seen;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const auto& a = support[i];
        const std::string ptr = "/monomials/" + std::to_string(i);
        if (static_cast<int>(a.size()) != nvars) throw InputError("exponent vector has wrong length", ptr);
        std::int64_t total = 0;
        for (auto e : a) {
            if (e < 0) throw InputError("negative exponent", ptr);
            total += e;
        }
        if (total != degree) throw InputError("exponent vector has wrong total degree", ptr);
        if (!seen.insert(a).second) throw InputError("duplicate monomial", ptr);
    }

    // Centre the support and drop the last coordinate: an isomorphism of the
    // sum-zero sublattice onto Z^(nvars-1).
    const int n = nvars - 1;
    WeightSystem ws;
    ws.dim = n;
    for (const auto& a : support) {
        LatticePoint w(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(nvars) * a[static_cast<std::size_t>(j)] - degree;
        ws.weights.push_back(std::move(w));
    }
    ws.support.resize(support.size());
    std::iota(ws.support.begin(), ws.support.end(), 0);

    const HullPosition pos = locate_origin(ws.weights, n);
    Verdict out;
    out.cls = pos.cls;
    if (!pos.direction) return out;

    // Lift the reduced direction u to v in Z^nvars with v_i - v_n = nvars * u_i,
    // a positive multiple of u on the sum-zero sublattice.
    const LatticePoint& u = *pos.direction;
    const std::int64_t usum = std::accumulate(u.begin(), u.end(), std::int64_t{0});
    LatticePoint lifted(static_cast<std::size_t>(nvars));
    for (int j = 0; j < n; ++j) lifted[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(nvars) * u[static_cast<std::size_t>(j)] - usum;
    lifted[static_cast<std::size_t>(n)] = -usum;
    const std::int64_t bound = sup_norm(make_primitive(lifted));

    if (out.cls == StabilityClass::Unstable) {
        out.witness = search_shells(nvars, bound, true, [&](const LatticePoint& v) { return min_pairing(support, v) > 0; });
        out.weight = min_pairing(support, *out.witness);
    } else {
        out.witness = search_shells(nvars, bound, true, [&](const LatticePoint& v) {
            return min_pairing(support, v) == 0 && max_pairing(support, v) > 0;
        });
        out.weight = 0;
    }
    return out;
}

Verdict brute_force_1ps(const WeightSystem& ws, int bound) {
    ws.validate();
    if (bound < 1) throw InputError("bound must be at least 1");
    const auto ms = ws.supported_weights();
    std::optional<LatticePoint> boundary;
    bool any_zero = false;
    for (std::int64_t s = 1; s <= bound; ++s) {
        std::optional<LatticePoint> hit = search_shell(ws.dim, s, false, [&](const LatticePoint& v) {
            const std::int64_t rho = min_pairing(ms, v);
            if (rho > 0) return true;
            if (rho == 0) {
                any_zero = true;
                if (!boundary && max_pairing(ms, v) > 0) boundary = v;
            }
            return false;
        });
        if (hit) return {StabilityClass::Unstable, hit, min_pairing(ms, *hit)};
    }
    if (!any_zero) return {StabilityClass::Stable, std::nullopt, std::nullopt};
    if (!boundary) return {StabilityClass::Polystable, std::nullopt, std::nullopt};
    return {StabilityClass::StrictlySemistable, boundary, 0};
}

} // namespace stabkit
