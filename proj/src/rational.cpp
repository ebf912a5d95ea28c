#include "stabkit/rational.hpp"

#include "stabkit/errors.hpp"

#include <cctype>

namespace stabkit {

namespace {

Integer parse_integer(std::string_view s, std::string_view whole) {
    if (s.empty()) throw InputError("empty integer in rational '" + std::string(whole) + "'");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw InputError("malformed rational '" + std::string(whole) + "'");
    Integer value = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw InputError("malformed rational '" + std::string(whole) + "'");
        value = value * 10 + (s[i] - '0');
    }
    return neg ? Integer(-value) : value;
}

} // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
    Integer p = parse_integer(text.substr(0, slash), text);
    Integer q = parse_integer(text.substr(slash + 1), text);
    if (q == 0) throw InputError("zero denominator in rational '" + std::string(text) + "'");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    return Rational(p, q);
}

std::string to_string(const Rational& q) {
    const Integer d = denominator_of(q);
    if (d == 1) return numerator_of(q).str();
    return numerator_of(q).str() + "/" + d.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

// Continued-fraction descent: both endpoints share integer parts until they
// split, at which point the smallest integer in range closes the expansion.
Rational simplest_between(Rational lo, Rational hi) {
    if (lo > hi) std::swap(lo, hi);
    if (lo <= 0 && hi >= 0) return Rational(0);
    if (hi < 0) return -simplest_between(-hi, -lo);

    // 0 < lo <= hi
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    Integer fl = numerator(lo) / denominator(lo);  // floor for positive values
    if (Rational(fl) == lo) return lo;
    if (Rational(fl + 1) <= hi) return Rational(fl + 1);
    // lo and hi share floor fl: recurse on reciprocals of fractional parts.
    Rational rest = simplest_between(1 / (hi - fl), 1 / (lo - fl));
    return Rational(fl) + 1 / rest;
}

} // namespace stabkit
