#include "stabkit/rational_poly.hpp"

#include "stabkit/errors.hpp"

#include <algorithm>
#include <sstream>

namespace stabkit {

RationalPoly::RationalPoly(std::initializer_list<Rational> coeffs) : coeffs_(coeffs) { normalize(); }

RationalPoly::RationalPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

RationalPoly RationalPoly::monomial(int degree, const Rational& c) {
    std::vector<Rational> v(static_cast<std::size_t>(degree) + 1, Rational(0));
    v.back() = c;
    return RationalPoly(std::move(v));
}

void RationalPoly::normalize() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPoly::coefficient(int k) const {
    if (k < 0 || k > degree()) return 0;
    return coeffs_[static_cast<std::size_t>(k)];
}

Rational RationalPoly::leading() const { return coeffs_.empty() ? Rational(0) : coeffs_.back(); }

Rational RationalPoly::operator()(const Rational& x) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double RationalPoly::eval(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
    return acc;
}

RationalPoly RationalPoly::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<Rational> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<long>(k);
    return RationalPoly(std::move(d));
}

RationalPoly RationalPoly::antiderivative() const {
    if (coeffs_.empty()) return {};
    std::vector<Rational> a(coeffs_.size() + 1, Rational(0));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) a[k + 1] = coeffs_[k] / static_cast<long>(k + 1);
    return RationalPoly(std::move(a));
}

Rational RationalPoly::integrate(const Rational& a, const Rational& b) const {
    const RationalPoly F = antiderivative();
    return F(b) - F(a);
}

RationalPoly RationalPoly::scale_variable(const Rational& s) const {
    std::vector<Rational> v(coeffs_);
    Rational pw = 1;
    for (auto& c : v) {
        c *= pw;
        pw *= s;
    }
    return RationalPoly(std::move(v));
}

RationalPoly RationalPoly::shift_variable(const Rational& t) const {
    // Horner in the polynomial ring: acc = acc * (x + t) + c
    RationalPoly acc;
    const RationalPoly xt({t, Rational(1)});
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc *= xt;
        acc += RationalPoly::constant(*it);
    }
    return acc;
}

RationalPoly RationalPoly::monic() const {
    if (is_zero()) return {};
    RationalPoly r(*this);
    r *= Rational(1) / leading();
    return r;
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Rational(0));
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    normalize();
    return *this;
}

RationalPoly& RationalPoly::operator-=(const RationalPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Rational(0));
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    normalize();
    return *this;
}

RationalPoly& RationalPoly::operator*=(const RationalPoly& o) {
    if (is_zero() || o.is_zero()) {
        coeffs_.clear();
        return *this;
    }
    std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
    coeffs_ = std::move(r);
    normalize();
    return *this;
}

RationalPoly& RationalPoly::operator*=(const Rational& s) {
    for (auto& c : coeffs_) c *= s;
    normalize();
    return *this;
}

RationalPoly RationalPoly::operator-() const {
    RationalPoly r(*this);
    r *= Rational(-1);
    return r;
}

std::pair<RationalPoly, RationalPoly> RationalPoly::divmod(const RationalPoly& divisor) const {
    if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> rem(coeffs_);
    const int dd = divisor.degree();
    const int nd = degree();
    if (nd < dd) return {RationalPoly(), *this};
    std::vector<Rational> q(static_cast<std::size_t>(nd - dd + 1), Rational(0));
    const Rational lead = divisor.leading();
    for (int k = nd - dd; k >= 0; --k) {
        const Rational c = rem[static_cast<std::size_t>(k + dd)] / lead;
        q[static_cast<std::size_t>(k)] = c;
        if (c == 0) continue;
        for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= c * divisor.coeffs_[static_cast<std::size_t>(j)];
    }
    return {RationalPoly(std::move(q)), RationalPoly(std::move(rem))};
}

std::string RationalPoly::to_string(char var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Rational& c = coeffs_[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        if (!first) os << (c > 0 ? " + " : " - ");
        else if (c < 0) os << "-";
        first = false;
        const Rational a = abs(c);
        if (k == 0 || a != 1) os << stabkit::to_string(a);
        if (k >= 1) os << (a != 1 ? "*" : "") << var;
        if (k >= 2) os << "^" << k;
    }
    return os.str();
}

RationalPoly gcd(RationalPoly a, RationalPoly b) {
    while (!b.is_zero()) {
        auto r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

std::vector<RationalPoly> sturm_sequence(const RationalPoly& p) {
    std::vector<RationalPoly> seq;
    if (p.is_zero()) return seq;
    seq.push_back(p);
    RationalPoly d = p.derivative();
    if (d.is_zero()) return seq;
    seq.push_back(d);
    while (true) {
        const auto& a = seq[seq.size() - 2];
        const auto& b = seq.back();
        RationalPoly r = a.divmod(b).second;
        if (r.is_zero()) break;
        seq.push_back(-r);
    }
    return seq;
}

namespace {

int sign_changes(const std::vector<RationalPoly>& seq, const Rational& x) {
    int changes = 0;
    int last = 0;
    for (const auto& s : seq) {
        const int sg = s(x).sign();
        if (sg == 0) continue;
        if (last != 0 && sg != last) ++changes;
        last = sg;
    }
    return changes;
}

} // namespace

int count_roots(const std::vector<RationalPoly>& sturm, const Rational& a, const Rational& b) {
    if (sturm.empty()) throw std::domain_error("Sturm count of the zero polynomial");
    if (b <= a) return 0;
    return sign_changes(sturm, a) - sign_changes(sturm, b);
}

namespace {

// Largest |leading coefficient| after clearing denominators: any rational
// root p/q in lowest terms has q dividing it.
Integer integer_leading(const RationalPoly& p) {
    Integer lcm = 1;
    for (const auto& c : p.coefficients()) {
        const Integer d = denominator_of(c);
        lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    Integer lead = numerator_of(p.leading() * lcm);
    return lead < 0 ? Integer(-lead) : lead;
}

} // namespace

std::vector<RootInterval> isolate_roots(const RationalPoly& p, const Rational& a, const Rational& b,
                                        const Rational& width) {
    std::vector<RootInterval> out;
    if (p.is_zero()) throw std::domain_error("root isolation of the zero polynomial");
    if (p.degree() <= 0 || b <= a) return out;

    // Square-free part keeps every root simple for the bisection below.
    const RationalPoly g = gcd(p, p.derivative());
    const RationalPoly sq = g.degree() > 0 ? p.divmod(g).first : p;
    const auto sturm = sturm_sequence(sq);
    const Integer lead = integer_leading(sq);
    const Rational rational_width = Rational(1, 2 * lead * lead);
    const Rational target = std::min(width, rational_width);

    // Work on (a, b): count on (a, b] and drop a root sitting exactly at b.
    struct Pending {
        Rational lo, hi;
    };
    std::vector<Pending> stack{{a, b}};
    std::vector<RootInterval> found;
    while (!stack.empty()) {
        Pending cur = stack.back();
        stack.pop_back();
        int n = count_roots(sturm, cur.lo, cur.hi);
        if (cur.hi == b && sq(b) == 0) --n;
        if (n <= 0) continue;
        if (n == 1) {
            Rational lo = cur.lo, hi = cur.hi;
            if (hi == b && sq(b) == 0) {
                // shrink away from the excluded endpoint first
                Rational mid = (lo + hi) / 2;
                while (count_roots(sturm, lo, mid) == 0) {
                    lo = mid;
                    mid = (lo + hi) / 2;
                }
                hi = mid;
            }
            bool exact = false;
            while (hi - lo > target) {
                const Rational mid = (lo + hi) / 2;
                if (sq(mid) == 0) {
                    lo = hi = mid;
                    exact = true;
                    break;
                }
                if (count_roots(sturm, lo, mid) == 1) hi = mid;
                else lo = mid;
            }
            if (!exact) {
                const Rational cand = simplest_between(lo, hi);
                if (cand > lo && sq(cand) == 0) {
                    lo = hi = cand;
                } else if (hi != b && sq(hi) == 0) {
                    lo = hi;
                }
            }
            // keep returned intervals within the requested width
            while (!(lo == hi) && hi - lo > width) {
                const Rational mid = (lo + hi) / 2;
                if (count_roots(sturm, lo, mid) == 1) hi = mid;
                else lo = mid;
            }
            found.push_back({lo, hi});
            continue;
        }
        const Rational mid = (cur.lo + cur.hi) / 2;
        stack.push_back({mid, cur.hi});
        stack.push_back({cur.lo, mid});
    }
    std::sort(found.begin(), found.end(), [](const RootInterval& x, const RootInterval& y) { return x.hi < y.hi; });
    return found;
}

} // namespace stabkit
