#pragma once

#include "stabkit/rational.hpp"
#include "stabkit/rational_poly.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stabkit {

/// h0(L^r) = a0 r^n + a1 r^(n-1) + ...
struct HilbertData {
    int n = 1;
    Rational a0 = 1;
    Rational a1 = 0;
    std::string description;

    void validate() const;
};

/// Exact h0(I_Z^j (r)) for j >= 0, r >= 1; j = 0 gives h0(L^r). Throws
/// InputError outside the range where the count is known exactly.
using SectionCounter = std::function<Integer(const Integer& j, const Integer& r)>;

/// h0(I_Z^{xr}(r)) = a0(x) r^n + a1(x) r^(n-1) + ... on 0 <= x <= epsilon.
struct HilbertSamuelData {
    RationalPoly a0x;
    RationalPoly a1x;
    Rational epsilon;
    /// I_Z^{εr}(r) is generated by global sections, so c = ε is admissible.
    bool saturated_at_epsilon = false;
    /// The c = ε degeneration is pulled back from a contraction.
    bool contraction_at_epsilon = false;
    SectionCounter exact_h0;

    void validate(const HilbertData& h) const;
};

struct SlopeFamily {
    std::string name;
    HilbertData h;
    HilbertSamuelData hs;
    nlohmann::json params;
};

/// A point on a smooth curve of genus g polarised in degree d.
SlopeFamily curve_point_family(int genus, int degree);
SlopeFamily p1_point_family();
/// The exceptional curve E on Bl_p P^2 with L = aH - bE, a > b > 0.
SlopeFamily blowup_p2_family(int a, int b);
/// L -> L^m.
SlopeFamily rescale(const SlopeFamily& f, int m);
SlopeFamily family_from_json(const nlohmann::json& j);

Rational mu(const HilbertData& h);
/// ∫_0^c (a1 + a0'/2) / ∫_0^c a0.
Rational mu_c(const HilbertSamuelData& hs, const Rational& c);

enum class SlopeClass { Stable, Semistable, Unstable };
std::string to_string(SlopeClass c);

/// Maximal open c-interval (lower, upper) on which μ_c > μ(X). Endpoints are
/// 0, ε or isolated roots.
struct DestabilizingInterval {
    RootInterval lower;
    RootInterval upper;
    /// c = ε itself is admissible and destabilising.
    bool includes_epsilon = false;
    /// A rational c inside with μ_c > μ(X).
    Rational witness;
};

struct SlopeVerdict {
    SlopeClass cls = SlopeClass::Stable;
    std::vector<DestabilizingInterval> intervals;
    /// Roots of μ(X)∫a0 - ∫(a1 + a0'/2) in (0, ε).
    std::vector<RootInterval> equalities;
    bool equality_at_epsilon = false;
    bool identically_equal = false;
    bool polystable = false;
    /// μ(X) ∫_0^c a0 - ∫_0^c (a1 + a0'/2) as a polynomial in c.
    RationalPoly numerator;
};

SlopeVerdict slope_classify(const HilbertData& h, const HilbertSamuelData& hs);

/// Σ_{i<=c} h0(I_Z^i(1)) / ∫_0^c a0.
Rational chow_slope(const std::vector<Integer>& h0_list, const HilbertSamuelData& hs);
/// (N + 1) / a0 for X in P^N.
Rational chow_mu(const HilbertData& h, const Integer& N);

struct ChowVerdict {
    std::optional<Rational> ch_c;
    Rational ch_x;
    /// Ch_c > Ch(X).
    bool destabilising = false;
    bool equal = false;
};

/// Chow slope of the family at integral c using its section counts; c = 0 passes trivially.
ChowVerdict chow_compare(const SlopeFamily& f, int c);

/// w_r = Σ_{j=1}^{cr} h0(I_Z^j(r)) - cr h0(L^r), the weight on the top
/// exterior power of the central fibre of the deformation to the normal cone.
Integer normal_cone_weight(const HilbertSamuelData& hs, const Rational& c, const Integer& r);

/// Coefficients of r^{n+1} and r^n in w_r:
/// ∫_0^c a0 - c a0(0) and ∫_0^c (a1 + a0'/2) - c a1(0).
std::pair<Rational, Rational> trapezium_asymptotics(const HilbertSamuelData& hs, const Rational& c);

/// Either a weight sequence w_r, or a table w_{r,k} of weights on
/// det H0(L^{rk})* ⊗ det S^k H0(L^r) for the SL-normalised action, each row
/// carrying h0(L^r).
struct TestConfigWeights {
    std::vector<std::pair<Integer, Rational>> sequence;
    struct Row {
        Integer r;
        Rational h0;
        std::vector<std::pair<Integer, Rational>> by_k;
    };
    std::vector<Row> table;

    bool is_table() const { return !table.empty(); }
};

/// Values of r in [r_min, r_max] with cr integral.
std::vector<Integer> admissible_r(const Rational& c, int r_min, int r_max);
TestConfigWeights normal_cone_weights(const SlopeFamily& f, const Rational& c, int r_min, int r_max);
TestConfigWeights normal_cone_table(const SlopeFamily& f, const Rational& c, const std::vector<Integer>& r_list,
                                    const std::vector<Integer>& k_list);

struct DfResult {
    /// Coefficient F1 in w(r) / (r h(r)) = F0 + F1 / r + ...
    Rational df;
    /// Leading coefficients of w_r (sequence mode).
    std::optional<Rational> b0, b1;
    /// a_{n+1,n} (table mode).
    std::optional<Rational> leading;
};

DfResult df_invariant(const TestConfigWeights& w, const HilbertData& h);

/// Polynomial of degree <= deg through the points; every point must lie on it.
RationalPoly exact_fit(const std::vector<std::pair<Rational, Rational>>& points, int deg);

/// Leading two coefficients of r -> h0(I_Z^{xr}(r)) from the exact counts.
std::pair<Rational, Rational> hilbert_samuel_from_counts(const SlopeFamily& f, const Rational& x, int r_min, int samples);

enum class Ordering { Less, Equal, Greater };
std::string to_string(Ordering o);

/// Eventual comparison of p_F(r) with p_E(r) for monic polynomials.
Ordering gieseker_compare(const RationalPoly& pF, const RationalPoly& pE);
/// Comparison of a1/a0 (second coefficient of the monic polynomials).
Ordering slope_compare(const RationalPoly& pF, const RationalPoly& pE);

struct SheafData {
    RationalPoly pE;
    std::vector<std::pair<std::string, RationalPoly>> subsheaves;
};

struct SheafVerdict {
    SlopeClass gieseker = SlopeClass::Stable;
    SlopeClass slope = SlopeClass::Stable;
    std::vector<Ordering> gieseker_order, slope_order;
};

SheafVerdict sheaf_verdict(const SheafData& s);
SheafData sheaf_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SlopeVerdict& v);
nlohmann::json to_json(const RootInterval& r);
nlohmann::json to_json(const RationalPoly& p);

} // namespace stabkit
