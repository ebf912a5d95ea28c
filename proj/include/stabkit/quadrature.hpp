#pragma once

#include <vector>

namespace stabkit {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre_unit(int order);

/// Values of P_0..P_n at y together with derivatives up to `deriv` in y:
/// out[k][n] = d^k P_n / dy^k.
std::vector<std::vector<double>> legendre_table(int n, double y, int deriv);

} // namespace stabkit
