#include "stabkit/exact_lp.hpp"

#include <stdexcept>

namespace stabkit {

std::optional<std::vector<Rational>> find_nonnegative_solution(const RationalMatrix& A,
                                                               const std::vector<Rational>& b) {
    const std::size_t m = A.size();
    if (b.size() != m) throw std::invalid_argument("find_nonnegative_solution: row count mismatch");
    const std::size_t n = m == 0 ? 0 : A[0].size();
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("find_nonnegative_solution: ragged matrix");
    if (m == 0) return std::vector<Rational>(n, Rational(0));

    // Tableau columns: n structural, m artificial, then rhs.
    const std::size_t cols = n + m;
    std::vector<std::vector<Rational>> T(m, std::vector<Rational>(cols + 1, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
        const bool flip = b[i] < 0;
        for (std::size_t j = 0; j < n; ++j) T[i][j] = flip ? Rational(-A[i][j]) : A[i][j];
        T[i][n + i] = 1;
        T[i][cols] = flip ? Rational(-b[i]) : b[i];
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    // Phase-one objective: minimize the sum of artificials. Reduced costs
    // for the nonbasic columns are minus the column sums.
    std::vector<Rational> cost(cols + 1, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= cols; ++j)
            if (j < n || j == cols) cost[j] -= T[i][j];

    auto pivot = [&](std::size_t r, std::size_t c) {
        const Rational p = T[r][c];
        for (auto& x : T[r]) x /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || T[i][c] == 0) continue;
            const Rational f = T[i][c];
            for (std::size_t j = 0; j <= cols; ++j) T[i][j] -= f * T[r][j];
        }
        if (cost[c] != 0) {
            const Rational f = cost[c];
            for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * T[r][j];
        }
        basis[r] = c;
    };

    while (true) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (T[i][enter] <= 0) continue;
            const Rational ratio = T[i][cols] / T[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break;  // cannot happen in phase one (bounded below by 0)
        pivot(leave, enter);
    }

    // -cost[cols] is the optimal sum of artificials.
    if (cost[cols] != 0) return std::nullopt;

    std::vector<Rational> x(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = T[i][cols];
    return x;
}

} // namespace stabkit
