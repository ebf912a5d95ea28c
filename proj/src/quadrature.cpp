#include "stabkit/quadrature.hpp"

#include "stabkit/errors.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace stabkit {

namespace {

// Returns {P_n(y), P_n'(y)}.
std::pair<double, double> legendre_with_derivative(std::size_t n, double y) {
    double p0 = 1, p1 = y;
    for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * double(k) - 1) * y * p1 - (double(k) - 1) * p0) / double(k);
        p0 = p1;
        p1 = p2;
    }
    const double dp = double(n) * (y * p1 - p0) / (y * y - 1);
    return {p1, dp};
}

} // namespace

GaussRule gauss_legendre_unit(int order) {
    if (order < 1) throw InputError("quadrature order must be positive");
    const auto n = static_cast<std::size_t>(order);
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double y = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre_with_derivative(n, y);
            const double dy = p / dp;
            y -= dy;
            if (std::abs(dy) < 1e-16) break;
        }
        const double dp = legendre_with_derivative(n, y).second;
        const double w = 1.0 / ((1 - y * y) * dp * dp);
        rule.nodes[i] = 0.5 * (1 - y);
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = 0.5 * (1 + y);
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

std::vector<std::vector<double>> legendre_table(int n, double y, int deriv) {
    const auto N = static_cast<std::size_t>(n) + 1;
    std::vector<std::vector<double>> out(static_cast<std::size_t>(deriv) + 1, std::vector<double>(N, 0.0));
    for (int k = 0; k <= deriv; ++k) {
        auto& P = out[static_cast<std::size_t>(k)];
        const auto* Q = k > 0 ? &out[static_cast<std::size_t>(k) - 1] : nullptr;
        P[0] = k == 0 ? 1.0 : 0.0;
        if (N > 1) P[1] = k == 0 ? y : (k == 1 ? 1.0 : 0.0);
        // (m+1) P_{m+1} = (2m+1)(y P_m)^{(k)} - m P_{m-1}^{(k)}, (y P)^{(k)} = y P^{(k)} + k P^{(k-1)}
        for (std::size_t m = 1; m + 1 < N; ++m) {
            const double yp = y * P[m] + (Q ? double(k) * (*Q)[m] : 0.0);
            P[m + 1] = ((2.0 * double(m) + 1) * yp - double(m) * P[m - 1]) / double(m + 1);
        }
    }
    return out;
}

} // namespace stabkit
