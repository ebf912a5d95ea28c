#include "doctest.h"

#include "stabkit/errors.hpp"
#include "stabkit/rational.hpp"
#include "stabkit/rational_poly.hpp"

#include <cmath>

using namespace stabkit;

TEST_CASE("parse and print rationals") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-4") == Rational(-4));
    CHECK(parse_rational(" 7/-14 ") == Rational(-1, 2));
    CHECK(to_string(Rational(-3, 9)) == "-1/3");
    CHECK(to_string(Rational(5)) == "5");
    CHECK_THROWS_AS(parse_rational("1/0"), InputError);
    CHECK_THROWS_AS(parse_rational("1.5"), InputError);
    CHECK_THROWS_AS(parse_rational(""), InputError);
}

TEST_CASE("simplest rational in an interval") {
    CHECK(simplest_between(Rational(1, 3), Rational(1, 2)) == Rational(1, 2));
    CHECK(simplest_between(Rational(3, 10), Rational(2, 5)) == Rational(1, 3));
    CHECK(simplest_between(Rational(-5, 7), Rational(-2, 3)) == Rational(-2, 3));
    CHECK(simplest_between(Rational(-1), Rational(2)) == 0);
    CHECK(simplest_between(Rational(7, 3), Rational(7, 3)) == Rational(7, 3));

    // brute-force oracle: scan denominators upward
    for (int a = 1; a < 30; ++a)
        for (int b = a + 1; b < 40; b += 3) {
            const Rational lo(a, 17), hi(b, 19);
            if (lo > hi) continue;
            Rational expect;
            bool found = false;
            for (int q = 1; q < 400 && !found; ++q)
                for (int p = 0; p < 400; ++p) {
                    const Rational x(p, q);
                    if (x >= lo && x <= hi) {
                        expect = x;
                        found = true;
                        break;
                    }
                }
            REQUIRE(found);
            CHECK(simplest_between(lo, hi) == expect);
        }
}

TEST_CASE("polynomial arithmetic") {
    const RationalPoly p({1, -3, 2});  // (1-x)(1-2x)
    const RationalPoly q({-1, 1});
    CHECK(p.degree() == 2);
    CHECK(p(Rational(1, 2)) == 0);
    CHECK((p * q).degree() == 3);
    auto [quo, rem] = p.divmod(q);
    CHECK(rem.is_zero());
    CHECK(quo == RationalPoly({-1, 2}));
    CHECK(p.derivative() == RationalPoly({-3, 4}));
    CHECK(p.antiderivative().derivative() == p);
    CHECK(p.integrate(0, 1) == Rational(1) - Rational(3, 2) + Rational(2, 3));
    CHECK(p.scale_variable(2)(Rational(1, 4)) == 0);
    CHECK(p.shift_variable(1)(Rational(-1, 2)) == 0);
    CHECK(gcd(p * q, q * q) == RationalPoly({1, -2, 1}));
    CHECK((p - p).is_zero());
    CHECK(RationalPoly({0, 0, 0}).degree() == -1);
    CHECK(p.to_string() == "2*x^2 - 3*x + 1");
}

TEST_CASE("Sturm root isolation") {
    // (x - 1/3)(x - 2)(x^2 - 2)
    const RationalPoly p = RationalPoly({Rational(-1, 3), 1}) * RationalPoly({-2, 1}) * RationalPoly({-2, 0, 1});
    const auto sturm = sturm_sequence(p);
    CHECK(count_roots(sturm, -10, 10) == 4);
    CHECK(count_roots(sturm, 0, 1) == 1);
    const auto roots = isolate_roots(p, -10, 10, Rational(1, 1000000));
    REQUIRE(roots.size() == 4);
    CHECK(to_double(roots[0].lo) <= -std::sqrt(2.0));
    CHECK(to_double(roots[0].hi) >= -std::sqrt(2.0));
    CHECK(roots[1].exact());
    CHECK(roots[1].lo == Rational(1, 3));
    CHECK(!roots[2].exact());
    CHECK(roots[2].hi - roots[2].lo <= Rational(1, 1000000));
    CHECK(roots[3].lo == 2);

    // open interval: root at the right endpoint is excluded
    CHECK(isolate_roots(p, 0, 2).size() == 2);
    // repeated roots are reported once
    const RationalPoly sq = RationalPoly({-1, 1}) * RationalPoly({-1, 1});
    CHECK(isolate_roots(sq, 0, 5).size() == 1);
}
