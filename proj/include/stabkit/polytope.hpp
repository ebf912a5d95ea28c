#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stabkit {

using LatticePoint = std::vector<std::int64_t>;

/// Weights of a torus representation together with the indices of the
/// weight spaces in which a given vector has nonzero components.
struct WeightSystem {
    int dim = 0;
    std::vector<LatticePoint> weights;
    std::vector<int> support;

    /// Throws InputError when an invariant is violated.
    void validate() const;
    std::vector<LatticePoint> supported_weights() const;
};

enum class StabilityClass { Stable, Polystable, StrictlySemistable, Unstable };

std::string to_string(StabilityClass c);
StabilityClass parse_stability_class(const std::string& s);

/// A one-parameter subgroup, written as a primitive integral vector.
using OnePS = LatticePoint;

struct Verdict {
    StabilityClass cls = StabilityClass::Stable;
    std::optional<OnePS> witness;
    std::optional<std::int64_t> weight;
};

bool operator==(const Verdict& a, const Verdict& b);

/// rho(ws, v) = min over supported weights m of <m, v>.
std::int64_t ops_weight(const WeightSystem& ws, const OnePS& v);

/// Classifies by the position of 0 relative to the hull of supported weights.
Verdict hm_classify(const WeightSystem& ws);

/// Shifts every weight by -chi.
WeightSystem translate_weights(const WeightSystem& ws, const LatticePoint& chi);

/// Torus verdict of a hypersurface with the given monomial support, in the
/// given coordinates. Witnesses live in Z^nvars with zero coordinate sum and
/// their weight is min <alpha, v> over the support.
Verdict hypersurface_newton(int degree, int nvars, const std::vector<LatticePoint>& support);

/// Verdict from enumerating every primitive v with |v|_inf <= bound.
Verdict brute_force_1ps(const WeightSystem& ws, int bound);

/// gcd of the entries is 1 and v != 0.
bool is_primitive(const OnePS& v);
OnePS make_primitive(OnePS v);

} // namespace stabkit
