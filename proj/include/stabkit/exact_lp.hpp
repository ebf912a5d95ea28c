#pragma once

#include "stabkit/rational.hpp"

#include <optional>
#include <vector>

namespace stabkit {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Finds some x >= 0 with A x = b, or nullopt if none exists.
/// Two-phase simplex in exact arithmetic with Bland's pivoting rule.
std::optional<std::vector<Rational>> find_nonnegative_solution(const RationalMatrix& A,
                                                               const std::vector<Rational>& b);

} // namespace stabkit
