#include "doctest.h"

#include "stabkit/errors.hpp"
#include "stabkit/metrics.hpp"
#include "stabkit/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace stabkit;

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
double integrate01(F f) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
}

// Hand-derived bump data: φ = a 4u(1-u), ρ = 1 + 4a - 24a u(1-u).
double bump_phi(double a, double u) { return 4 * a * u * (1 - u); }
double bump_rho(double a, double u) { return 1 + 4 * a - 24 * a * u * (1 - u); }
double bump_x(double a, double u) { return u + 4 * a * u * (1 - u) * (1 - 2 * u); }

// Forces the product-grid code path for a radial potential.
class Unsymmetric final : public MetricPotential {
public:
    explicit Unsymmetric(RadialPotential p) : p_(std::move(p)) {}
    std::unique_ptr<MetricPotential> clone() const override { return std::make_unique<Unsymmetric>(*this); }
    bool radial() const override { return false; }
    PotentialSample sample(double u, double t) const override { return p_.sample(u, t); }
    nlohmann::json to_json() const override { return p_.to_json(); }

private:
    RadialPotential p_;
};

CMatrix random_pd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = {g(rng), g(rng)};
    return A * A.adjoint() + CMatrix::Identity(n, n) * double(n);
}

CMatrix random_unitary(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = {g(rng), g(rng)};
    return Eigen::HouseholderQR<CMatrix>(A).householderQ();
}

double max_relative(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::abs(b[i]));
    return m;
}

// K-energy from the symplectic potential g(x) = x t - ψ(t) of a bump metric.
double toric_k_energy(double a) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto x1 = [a](double u) { return bump_rho(a, u); };
    auto log_profile = [&](double u) { return std::log(u * (1 - u) * x1(u)) * x1(u); };
    auto g = [&](double u) {
        const double x = bump_x(a, u);
        return (x * std::log(u / (1 - u)) + std::log1p(-u) - bump_phi(a, u)) * x1(u);
    };
    return pi * (ts.integrate(log_profile, 0.0, 1.0) - 2 * ts.integrate(g, 0.0, 1.0));
}

} // namespace

TEST_CASE("Gauss-Legendre rule on the unit interval") {
    const GaussRule g = gauss_legendre_unit(10);
    for (int k = 0; k < 20; ++k) {
        double s = 0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
        CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(gauss_legendre_unit(0), InputError);
}

TEST_CASE("round Gram equals the Beta integrals") {
    for (int r = 1; r <= 24; ++r) {
        const CMatrix G = gram(RadialPotential::round(), r);
        const CMatrix B = round_gram(r);
        for (int i = 0; i <= r; ++i)
            CHECK(std::abs(G(i, i) - B(i, i)) <= 1e-13 * B(i, i).real());
    }
    const CMatrix G1 = gram(RadialPotential::round(), 1);
    CHECK(G1(0, 0).real() == doctest::Approx(0.5));
    CHECK(std::abs(G1(0, 0) - G1(1, 1)) < 1e-15);
}

TEST_CASE("perturbed Gram against adaptive quadrature") {
    const double a = 0.3;
    const int r = 12;
    const CMatrix G = gram(RadialPotential::bump(a), r);
    for (int i = 0; i <= r; ++i) {
        const double oracle = integrate01([&](double u) {
            return std::pow(u, i) * std::pow(1 - u, r - i) * std::exp(-r * bump_phi(a, u)) * bump_rho(a, u);
        });
        CHECK(std::abs(G(i, i).real() - oracle) <= 1e-12 * oracle);
    }
}

TEST_CASE("symmetry forces a diagonal Gram") {
    const RadialPotential phi = RadialPotential::mode(0.2, 1);
    const int r = 6;
    const CMatrix G1 = gram(phi, r);
    const CMatrix G2 = gram(Unsymmetric(phi), r);
    const double scale = G2.cwiseAbs().maxCoeff();
    for (int i = 0; i <= r; ++i)
        for (int j = 0; j <= r; ++j) {
            if (i != j) CHECK(std::abs(G2(i, j)) < 1e-14 * scale);
            else CHECK(std::abs(G2(i, i) - G1(i, i)) < 1e-13 * G1(i, i).real());
        }
    // not the round Gram
    CHECK(std::abs(G1(0, 0) - G1(r, r)) > 1e-3 * G1(0, 0).real());
}

TEST_CASE("Bergman function of the round metric is constant") {
    for (int r : {1, 5, 12, 24}) {
        const BergmanProfile B = bergman(RadialPotential::round(), round_gram(r), r);
        CHECK(B.min() == doctest::Approx(r + 1).epsilon(1e-12));
        CHECK(B.max() == doctest::Approx(r + 1).epsilon(1e-12));
        CHECK(B.integral() == doctest::Approx(r + 1).epsilon(1e-12));
    }
}

TEST_CASE("trace identity for radial and induced metrics") {
    std::mt19937_64 rng(11);
    for (int r : {3, 6, 10}) {
        const RadialPotential phi = RadialPotential::bump(0.3);
        const BergmanProfile B = bergman(phi, gram(phi, r), r);
        CHECK(std::abs(B.integral() - (r + 1)) < 1e-9);
        CHECK(B.min() > 0);

        const FubiniStudyPotential fs = induced_potential(r, random_pd(rng, r + 1));
        CHECK_FALSE(fs.radial());
        const BergmanProfile Bf = bergman(fs, gram(fs, r), r);
        CHECK(std::abs(Bf.integral() - (r + 1)) < 1e-9);
        CHECK(Bf.min() > 0);
    }
}

TEST_CASE("Bergman value at the origin against a 1D oracle") {
    const double a = 0.3;
    const int r = 12;
    const RadialPotential phi = RadialPotential::bump(a);
    const CMatrix G = gram(phi, r);
    const double g00 = integrate01([&](double u) {
        return std::pow(1 - u, r) * std::exp(-r * bump_phi(a, u)) * bump_rho(a, u);
    });
    CHECK(bergman_at(phi, G, r, 0.0) == doctest::Approx(1.0 / g00).epsilon(1e-11));
    const BergmanProfile B = bergman(phi, G, r);
    CHECK(B.max() - B.min() > 1.0);
}

TEST_CASE("Bergman function does not depend on the basis") {
    std::mt19937_64 rng(5);
    const int r = 5;
    for (int trial = 0; trial < 3; ++trial) {
        const FubiniStudyPotential phi = induced_potential(r, random_pd(rng, r + 1));
        const CMatrix G = gram(phi, r);
        const CMatrix U = random_unitary(rng, r + 1);
        const CMatrix C = U * random_pd(rng, r + 1);
        const BergmanProfile b0 = bergman(phi, G, r);
        const BergmanProfile bU = bergman(phi, U * G * U.adjoint(), U, r);
        const BergmanProfile bC = bergman(phi, C * G * C.adjoint(), C, r);
        CHECK(max_relative(bU.value, b0.value) < 1e-12);
        CHECK(max_relative(bC.value, b0.value) < 1e-11);
    }
}

TEST_CASE("ill-conditioned and malformed Gram matrices") {
    const int r = 3;
    CMatrix G = round_gram(r);
    G(2, 2) *= 1e-14;
    CHECK_THROWS_AS(bergman(RadialPotential::round(), G, r), NumericalError);
    CMatrix H = round_gram(r);
    H(0, 1) = 0.1;
    CHECK_THROWS_AS(bergman(RadialPotential::round(), H, r), InputError);
    CHECK_THROWS_AS(bergman(RadialPotential::round(), round_gram(2), r), InputError);
    CHECK_THROWS_AS(gram(RadialPotential::bump(0.6), 4), InputError);
    CHECK_THROWS_AS(gram(RadialPotential::round(), 0), InputError);
}

TEST_CASE("round Gram is a fixed point of T") {
    for (int r = 1; r <= 24; ++r) {
        const CMatrix G = normalize_det(round_gram(r));
        const CMatrix T = t_operator(r, G);
        CHECK(balance_residual(G, T) < 1e-10);
        CHECK((T - G).cwiseAbs().maxCoeff() < 1e-10 * G.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("T is projectively invariant") {
    std::mt19937_64 rng(3);
    const int r = 4;
    const CMatrix G = random_pd(rng, r + 1);
    const CMatrix T1 = t_operator(r, G);
    const CMatrix T2 = t_operator(r, 3.7 * G);
    CHECK((T1 - T2).cwiseAbs().maxCoeff() < 1e-12 * T1.cwiseAbs().maxCoeff());
    CHECK(std::abs(std::log(std::abs(T1.determinant()))) < 1e-10);
}

TEST_CASE("balance iteration") {
    SUBCASE("round start converges at once") {
        const BalanceResult b = balance_iterate(RadialPotential::round(), 10);
        CHECK(b.converged);
        CHECK(b.iterations == 1);
    }
    SUBCASE("plain and mixed iterations reach the same balanced metric") {
        const RadialPotential phi0 = RadialPotential::bump(0.3);
        MetricOptions plain;
        plain.anderson_depth = 0;
        const BalanceResult a = balance_iterate(phi0, 8, 1e-8, 500);
        const BalanceResult b = balance_iterate(phi0, 8, 1e-8, 500, plain);
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(a.residual <= 1e-8);
        CHECK(a.iterations < b.iterations);
        CHECK(potential_distance(*a.potential, *b.potential) < 1e-6);
        // a symmetric start balances to the round metric
        CHECK(potential_distance(*a.potential, RadialPotential::round()) < 1e-6);
    }
    SUBCASE("balanced limit has constant Bergman function") {
        const int r = 6;
        const BalanceResult b = balance_iterate(RadialPotential::mode(0.2, 1), r, 1e-11, 500);
        REQUIRE(b.converged);
        const BergmanProfile B = bergman(*b.potential, gram(*b.potential, r), r);
        CHECK(B.max() / B.min() - 1 < 1e-8);
        CHECK(B.min() == doctest::Approx(r + 1).epsilon(1e-8));
    }
    SUBCASE("iteration limit reports the last residual") {
        const BalanceResult b = balance_iterate(RadialPotential::bump(0.3), 12, 1e-14, 3);
        CHECK_FALSE(b.converged);
        CHECK(b.iterations == 3);
        CHECK(b.residual == b.residual_trace.back());
        CHECK(b.residual > 1e-14);
    }
}

TEST_CASE("serial and parallel kernels agree") {
    std::mt19937_64 rng(9);
    MetricOptions serial;
    serial.exec = Exec::Serial;
    const int r = 7;
    const FubiniStudyPotential phi = induced_potential(r, random_pd(rng, r + 1));
    const CMatrix Gp = gram(phi, r), Gs = gram(phi, r, serial);
    CHECK((Gp - Gs).cwiseAbs().maxCoeff() < 1e-14 * Gs.cwiseAbs().maxCoeff());
    const BergmanProfile Bp = bergman(phi, Gs, r), Bs = bergman(phi, Gs, r, serial);
    CHECK(max_relative(Bp.value, Bs.value) < 1e-14);
}

TEST_CASE("scalar curvature") {
    const CurvatureProfile round = curvature(RadialPotential::round());
    for (double s : round.value) CHECK(s == doctest::Approx(2 * pi).epsilon(1e-13));
    for (const RadialPotential& phi : {RadialPotential::bump(0.3), RadialPotential::mode(0.05, 3)}) {
        const CurvatureProfile c = curvature(phi);
        CHECK(c.integral() == doctest::Approx(conventions::mean_curvature).epsilon(1e-10));
        CHECK(c.mean == doctest::Approx(conventions::mean_curvature).epsilon(1e-10));
    }
}

TEST_CASE("curvature agrees with the Bergman subleading term") {
    // B_r - r = s/2π + a/r + O(1/r^2); Richardson extrapolation from r = 40, 80.
    const RadialPotential phi = RadialPotential::bump(0.05);
    const CurvatureProfile c = curvature(phi);
    const BergmanProfile b40 = bergman(phi, gram(phi, 40), 40);
    const BergmanProfile b80 = bergman(phi, gram(phi, 80), 80);
    double err = 0;
    for (std::size_t k = 0; k < c.value.size(); ++k) {
        const double est = 2 * (b80.value[k] - 80) - (b40.value[k] - 40);
        err = std::max(err, std::abs(est - c.value[k] / (2 * pi)));
    }
    CHECK(err < 5e-3);
}

TEST_CASE("expansion fit") {
    const ExpansionFit round = expansion_check(RadialPotential::round(), {8, 12, 16});
    for (std::size_t k = 0; k < round.c0.size(); ++k) {
        CHECK(round.c0[k] == doctest::Approx(1).epsilon(1e-12));
        CHECK(round.c1[k] == doctest::Approx(1).epsilon(1e-12));
    }
    const ExpansionFit small = expansion_check(RadialPotential::bump(0.03), {12, 16, 20});
    CHECK(small.c0_min >= 0.98);
    CHECK(small.c0_max <= 1.02);
    CHECK(small.c1_relative_error <= 0.1);
    const ExpansionFit zero = expansion_check(RadialPotential::bump(0.3) * 0.0, {12, 16, 20});
    CHECK(zero.c1_relative_error < 1e-12);
    CHECK_THROWS_AS(expansion_check(RadialPotential::round(), {12, 16}), InputError);
}

TEST_CASE("K-energy") {
    const RadialPotential phi = RadialPotential::bump(0.1);
    SUBCASE("constant and closed paths") {
        CHECK(k_energy({RadialPotential::round(), RadialPotential::round()}) == 0.0);
        auto path = linear_path(phi, 10);
        for (int i = 9; i >= 0; --i) path.push_back(phi * (i / 10.0));
        CHECK(std::abs(k_energy(path)) < 1e-14);
    }
    SUBCASE("agrees with the symplectic-potential formula") {
        for (double a : {0.05, 0.1, 0.2}) {
            const double oracle = toric_k_energy(a) - toric_k_energy(0);
            const double m = k_energy(linear_path(RadialPotential::bump(a), 200));
            CHECK(m == doctest::Approx(oracle).epsilon(1e-5));
        }
    }
    SUBCASE("path independence") {
        const RadialPotential detour = RadialPotential::mode(0.05, 4);
        std::vector<RadialPotential> curved;
        const int n = 200;
        for (int i = 0; i <= n; ++i) {
            const double t = double(i) / n;
            curved.push_back(phi * t + detour * (t * (1 - t)));
        }
        const double a = k_energy(linear_path(phi, n)), b = k_energy(curved);
        CHECK(std::abs(a - b) < 1e-5 * std::abs(a));
    }
    SUBCASE("nonnegative and quadratic in the amplitude") {
        const double m1 = k_energy(linear_path(RadialPotential::bump(0.01), 50));
        const double m2 = k_energy(linear_path(RadialPotential::bump(0.02), 50));
        CHECK(m1 > 0);
        CHECK(m2 / m1 == doctest::Approx(4).epsilon(0.02));
    }
    SUBCASE("rate matches finite differences to second order") {
        auto M = [&](double t) { return k_energy(linear_path(phi * t, 400)); };
        const double rate = k_energy_rate(phi * 0.5, phi);
        const double e1 = std::abs((M(0.5 + 0.1) - M(0.5 - 0.1)) / 0.2 - rate);
        const double e2 = std::abs((M(0.5 + 0.05) - M(0.5 - 0.05)) / 0.1 - rate);
        CHECK(e2 < e1);
        CHECK(e1 / e2 == doctest::Approx(4).epsilon(0.1));
    }
}

TEST_CASE("rotation weight vanishes") {
    CHECK(std::abs(k_energy_rate(RadialPotential::round(), RadialPotential::mode(1.0, 1))) < 1e-8);
    for (const RadialPotential& phi : {RadialPotential::bump(0.3), RadialPotential::mode(0.05, 3)})
        CHECK(std::abs(futaki_rotation(phi)) < 1e-8);
}

TEST_CASE("potential JSON") {
    const RadialPotential b = potential_from_json({{"family", "bump"}, {"amplitude", 0.2}});
    CHECK(b.coefficients() == RadialPotential::bump(0.2).coefficients());
    std::vector<double> u, v;
    for (int i = 0; i <= 20; ++i) {
        u.push_back(i / 20.0);
        v.push_back(bump_phi(0.2, u.back()));
    }
    const RadialPotential f = potential_from_json({{"nodes", u}, {"values", v}, {"degree", 4}});
    CHECK(potential_distance(f, b) < 1e-12);
    try {
        potential_from_json({{"legendre", {0.1, "x"}}});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(e.pointer() == "/legendre/1");
    }
    CHECK_THROWS_AS(potential_from_json({{"family", "bump"}, {"amplitude", 0.7}}), InputError);
    CHECK_THROWS_AS(potential_from_json({{"family", "cone"}}), InputError);
}
