#pragma once

#include "stabkit/rational.hpp"

#include <initializer_list>
#include <optional>
#include <vector>

namespace stabkit {

/// Univariate polynomial with exact rational coefficients, lowest degree
/// first. Always normalized: no trailing zero coefficients, so the zero
/// polynomial has an empty coefficient list and degree -1.
class RationalPoly {
public:
    RationalPoly() = default;
    RationalPoly(std::initializer_list<Rational> coeffs);
    explicit RationalPoly(std::vector<Rational> coeffs);

    static RationalPoly constant(const Rational& c) { return RationalPoly({c}); }
    static RationalPoly monomial(int degree, const Rational& c = 1);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<Rational>& coefficients() const { return coeffs_; }
    Rational coefficient(int k) const;
    Rational leading() const;

    Rational operator()(const Rational& x) const;
    double eval(double x) const;

    RationalPoly derivative() const;
    /// Antiderivative vanishing at 0.
    RationalPoly antiderivative() const;
    /// Exact definite integral over [a, b].
    Rational integrate(const Rational& a, const Rational& b) const;
    /// p(s * x).
    RationalPoly scale_variable(const Rational& s) const;
    /// p(x + t).
    RationalPoly shift_variable(const Rational& t) const;
    RationalPoly monic() const;

    RationalPoly& operator+=(const RationalPoly& o);
    RationalPoly& operator-=(const RationalPoly& o);
    RationalPoly& operator*=(const RationalPoly& o);
    RationalPoly& operator*=(const Rational& s);

    friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) { return a += b; }
    friend RationalPoly operator-(RationalPoly a, const RationalPoly& b) { return a -= b; }
    friend RationalPoly operator*(RationalPoly a, const RationalPoly& b) { return a *= b; }
    friend RationalPoly operator*(RationalPoly a, const Rational& s) { return a *= s; }
    friend RationalPoly operator*(const Rational& s, RationalPoly a) { return a *= s; }
    RationalPoly operator-() const;
    friend bool operator==(const RationalPoly& a, const RationalPoly& b) { return a.coeffs_ == b.coeffs_; }

    /// Euclidean division: *this = q * divisor + r with deg r < deg divisor.
    std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& divisor) const;

    std::string to_string(char var = 'x') const;

private:
    void normalize();
    std::vector<Rational> coeffs_;
};

RationalPoly gcd(RationalPoly a, RationalPoly b);

/// Open-closed interval (lo, hi] known to contain exactly one root, or a
/// degenerate interval lo == hi holding an exact rational root.
struct RootInterval {
    Rational lo;
    Rational hi;
    bool exact() const { return lo == hi; }
};

/// Sturm sequence of p (p, p', then negated remainders).
std::vector<RationalPoly> sturm_sequence(const RationalPoly& p);

/// Number of distinct real roots of p in (a, b]. p must be nonzero.
int count_roots(const std::vector<RationalPoly>& sturm, const Rational& a, const Rational& b);

/// Isolates the distinct real roots of p in the open interval (a, b),
/// refining each to width <= `width` or to an exact rational root.
/// Roots are returned in increasing order.
std::vector<RootInterval> isolate_roots(const RationalPoly& p, const Rational& a, const Rational& b,
                                        const Rational& width = Rational(1, 1 << 30));

} // namespace stabkit
