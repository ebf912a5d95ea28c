#pragma once

#include "stabkit/parallel.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

namespace stabkit {

using CMatrix = Eigen::MatrixXcd;

/// Normalisations for (P^1, O(1)). Everything below is expressed in
/// u = |z|^2 / (1 + |z|^2), which is also the moment coordinate of the
/// round metric. The round area form is du dθ / 2π.
namespace conventions {
/// ω lies in c1(O(1)).
inline constexpr double area = 1.0;
/// s = -curvature_scale * Φ''(x) for the toric profile Φ.
inline constexpr double curvature_scale = std::numbers::pi;
/// Mean scalar curvature; with these units B_r = r + s / 2π + O(1/r).
inline constexpr double mean_curvature = 2.0 * std::numbers::pi;
} // namespace conventions

/// Values of a potential φ and the density ρ = ω_φ / ω_FS at a point.
struct PotentialSample {
    double phi = 0;
    double rho = 1;
};

/// A bounded potential φ with the metric e^{-φ} h_FS on O(1).
class MetricPotential {
public:
    virtual ~MetricPotential() = default;
    virtual std::unique_ptr<MetricPotential> clone() const = 0;
    /// Invariant under z -> e^{iθ} z.
    virtual bool radial() const = 0;
    virtual PotentialSample sample(double u, double theta) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

/// S^1-invariant potential given as a Legendre series in y = 2u - 1.
class RadialPotential final : public MetricPotential {
public:
    RadialPotential() = default;
    explicit RadialPotential(std::vector<double> legendre);

    static RadialPotential round() { return RadialPotential(); }
    /// ε 4u(1-u).
    static RadialPotential bump(double amplitude);
    /// ε P_l(1 - 2u), the l-th zonal harmonic.
    static RadialPotential mode(double amplitude, int l = 1);
    /// Least-squares Legendre fit of node values.
    static RadialPotential fit(const std::vector<double>& u, const std::vector<double>& values, int degree);

    std::unique_ptr<MetricPotential> clone() const override { return std::make_unique<RadialPotential>(*this); }
    bool radial() const override { return true; }
    PotentialSample sample(double u, double theta) const override;
    nlohmann::json to_json() const override;

    const std::vector<double>& coefficients() const { return c_; }
    /// φ and its u-derivatives up to order 4.
    std::array<double, 5> jet(double u) const;
    /// Moment coordinate x(u) = u + u(1-u) φ'(u).
    double moment(double u) const;
    /// Scalar curvature in the conventions above.
    double curvature(double u) const;

    RadialPotential operator+(const RadialPotential& o) const;
    RadialPotential operator*(double s) const;

private:
    std::vector<double> c_;
};

/// Potential induced by a Hermitian form on H^0(O(k)):
/// φ = (1/k) log( v* H v / (1 + |z|^2)^k ), v = (1, z, ..., z^k).
class FubiniStudyPotential final : public MetricPotential {
public:
    FubiniStudyPotential(int k, CMatrix H);

    std::unique_ptr<MetricPotential> clone() const override { return std::make_unique<FubiniStudyPotential>(*this); }
    bool radial() const override { return diagonal_; }
    PotentialSample sample(double u, double theta) const override;
    nlohmann::json to_json() const override;

    int degree() const { return k_; }
    const CMatrix& form() const { return H_; }

private:
    int k_;
    CMatrix H_;
    bool diagonal_;
};

struct MetricOptions {
    int radial_order = 64;
    /// Angular trapezium nodes for non-radial integrals; 0 selects max(32, 4(r+1)).
    int angular_nodes = 0;
    Exec exec = Exec::Parallel;
    /// History length of the Anderson mixing in balance_iterate; 0 iterates T directly.
    int anderson_depth = 5;
};

/// L^2 Gram matrix of 1, z, ..., z^r for h = e^{-rφ} h_FS^r and ω_φ.
CMatrix gram(const MetricPotential& phi, int r, const MetricOptions& opt = {});
/// Closed form for φ = 0: diag(B(i+1, r-i+1)).
CMatrix round_gram(int r);

struct BergmanProfile {
    int r = 0;
    std::vector<double> u, theta, weight;
    /// B_r at the nodes and ω_φ / ω_FS there.
    std::vector<double> value, rho;

    /// Σ w ρ B over the nodes, i.e. ∫ B_r ω_φ.
    double integral() const;
    double min() const;
    double max() const;
};

/// Bergman function for the sections basis[a] = Σ_i basis(a, i) z^i with
/// Gram matrix G in that basis. The default basis is the monomials.
BergmanProfile bergman(const MetricPotential& phi, const CMatrix& G, int r, const MetricOptions& opt = {});
BergmanProfile bergman(const MetricPotential& phi, const CMatrix& G, const CMatrix& basis, int r,
                       const MetricOptions& opt = {});
/// B_r at a single point.
double bergman_at(const MetricPotential& phi, const CMatrix& G, int r, double u, double theta = 0);

/// Scales G to determinant one.
CMatrix normalize_det(const CMatrix& G);
/// Gram of the Fubini-Study metric induced by G, normalized to determinant one.
CMatrix t_operator(int r, const CMatrix& G, const MetricOptions& opt = {});
/// max |M - I/(r+1)| for M = L^{-1} T L^{-*} scaled to trace one, G = L L*.
double balance_residual(const CMatrix& G, const CMatrix& TG);
/// Potential of the metric induced by G (the pull-back of the FS metric, divided by r).
FubiniStudyPotential induced_potential(int r, const CMatrix& G);

struct BalanceResult {
    CMatrix gram;
    std::unique_ptr<MetricPotential> potential;
    int iterations = 0;
    double residual = 0;
    bool converged = false;
    std::vector<double> residual_trace;
};

BalanceResult balance_iterate(const MetricPotential& phi0, int r, double tol = 1e-8, int max_iter = 500,
                              const MetricOptions& opt = {});

/// sup |φ - ψ| over the quadrature nodes after removing the mean difference.
double potential_distance(const MetricPotential& a, const MetricPotential& b, const MetricOptions& opt = {});

struct CurvatureProfile {
    std::vector<double> u, weight, value, rho;
    double mean = 0;
    /// ∫ s ω_φ.
    double integral() const;
};

CurvatureProfile curvature(const RadialPotential& phi, const MetricOptions& opt = {});

struct ExpansionFit {
    std::vector<int> r;
    std::vector<double> u;
    std::vector<double> c0, c1;
    /// s / 2π at the same nodes.
    std::vector<double> predicted;
    double c0_min = 0, c0_max = 0;
    /// max |c1 - s/2π| / max |s/2π|.
    double c1_relative_error = 0;
};

ExpansionFit expansion_check(const RadialPotential& phi, const std::vector<int>& r_list,
                             const MetricOptions& opt = {});

/// d/dt of the K-energy along φ_t with velocity dphi, evaluated at phi.
double k_energy_rate(const RadialPotential& phi, const RadialPotential& dphi, const MetricOptions& opt = {});
/// Midpoint-rule integral of the rate along a path starting at the round metric.
double k_energy(const std::vector<RadialPotential>& path, const MetricOptions& opt = {});
/// Straight path 0 -> phi with n steps.
std::vector<RadialPotential> linear_path(const RadialPotential& phi, int steps);
/// ∫ (x - 1/2)(s - s0) ω_φ, the weight of the rotation action.
double futaki_rotation(const RadialPotential& phi, const MetricOptions& opt = {});

/// Potential from JSON: {"family": "round" | "bump" | "mode", "amplitude", "l"},
/// {"legendre": [...]}, or {"nodes": [...], "values": [...], "degree"}.
RadialPotential potential_from_json(const nlohmann::json& j);

} // namespace stabkit
