#pragma once

#include "stabkit/flow.hpp"
#include "stabkit/polytope.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <complex>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace stabkit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// ---------------------------------------------------------------- points --

/// Weighted distinct points on the unit sphere (the Riemann sphere P^1).
struct PointConfig {
    std::vector<Eigen::Vector3d> points;
    std::vector<int> multiplicities;

    int total() const;
    void validate() const;
};

struct PointsVerdict {
    StabilityClass cls = StabilityClass::Stable;
    /// Index of the point carrying more than half the mass (Unstable only).
    std::optional<int> offending;
};

PointsVerdict classify_points(const PointConfig& c);

class PointsProblem final : public MomentProblem {
public:
    explicit PointsProblem(PointConfig c);

    std::unique_ptr<MomentProblem> clone() const override { return std::make_unique<PointsProblem>(*this); }
    std::string kind() const override { return "points"; }
    int lie_dim() const override { return 3; }
    Eigen::VectorXd moment() const override;
    /// k part: rotation vector; ik part w: boost towards w with rapidity 2|w|.
    void act(const Eigen::VectorXd& xi) override;
    bool has_norm_functional() const override { return true; }
    double norm_functional(const Eigen::VectorXd& v, double t) const override;
    /// Cross-ratios of consecutive point quadruples (real and imaginary parts).
    std::vector<double> conserved() const override;
    /// Collision of points: the largest cluster closer than 1e-6.
    EscapeReport escape_report(const MomentProblem& start) const override;
    nlohmann::json state_json() const override;

    const PointConfig& config() const { return c_; }

private:
    PointConfig c_;
};

std::unique_ptr<MomentProblem> points_problem(const PointConfig& c);

/// Stereographic coordinate of a unit vector (projection from the north pole).
cplx stereographic(const Eigen::Vector3d& p);
cplx cross_ratio(cplx a, cplx b, cplx c, cplx d);

// ------------------------------------------------------------------- hom --

/// A in Hom(C^r, C^n) stored as an n x r matrix, r < n, under GL(r) acting
/// on the right. Moment coordinates of A*A - I.
class HomProblem final : public MomentProblem {
public:
    /// Singular values below this fraction of the largest count as zero.
    static constexpr double rank_tolerance = 1e-12;

    explicit HomProblem(CMatrix A);

    std::unique_ptr<MomentProblem> clone() const override { return std::make_unique<HomProblem>(*this); }
    std::string kind() const override { return "hom"; }
    int lie_dim() const override;
    Eigen::VectorXd moment() const override;
    void act(const Eigen::VectorXd& xi) override;
    bool has_norm_functional() const override { return true; }
    double norm_functional(const Eigen::VectorXd& v, double t) const override;
    /// Rank of A.
    std::vector<double> conserved() const override;
    nlohmann::json state_json() const override;

    const CMatrix& matrix() const { return A_; }

private:
    CMatrix A_;
};

std::unique_ptr<MomentProblem> hom_problem(const CMatrix& A);

/// A (A*A)^{-1/2}, the isometry closest to a full-rank A.
CMatrix polar_isometry(const CMatrix& A);

// --------------------------------------------------------------- adjoint --

/// n x n complex matrix under conjugation; moment 1/2 [A, A*].
class AdjointProblem final : public MomentProblem {
public:
    explicit AdjointProblem(CMatrix A);

    std::unique_ptr<MomentProblem> clone() const override { return std::make_unique<AdjointProblem>(*this); }
    std::string kind() const override { return "adjoint"; }
    int lie_dim() const override;
    Eigen::VectorXd moment() const override;
    void act(const Eigen::VectorXd& xi) override;
    bool has_norm_functional() const override { return true; }
    double norm_functional(const Eigen::VectorXd& v, double t) const override;
    /// Characteristic polynomial coefficients, real and imaginary parts.
    std::vector<double> conserved() const override;
    /// Flags a limit whose Jordan type differs from the start.
    EscapeReport escape_report(const MomentProblem& start) const override;
    nlohmann::json state_json() const override;

    const CMatrix& matrix() const { return A_; }

private:
    CMatrix A_;
};

std::unique_ptr<MomentProblem> adjoint_problem(const CMatrix& A);

/// Coefficients c_0..c_n of det(t I - A), c_n = 1.
std::vector<cplx> characteristic_polynomial(const CMatrix& A);

// ------------------------------------------------------------- hyperbola --

/// (x, y) in C^2 under lambda . (x, y) = (lambda x, lambda^-1 y), moment
/// (|x|^2 - |y|^2 + a) / 2.
class HyperbolaProblem final : public MomentProblem {
public:
    HyperbolaProblem(cplx x, cplx y, double a);

    std::unique_ptr<MomentProblem> clone() const override { return std::make_unique<HyperbolaProblem>(*this); }
    std::string kind() const override { return "hyperbola"; }
    int lie_dim() const override { return 1; }
    Eigen::VectorXd moment() const override;
    void act(const Eigen::VectorXd& xi) override;
    bool has_norm_functional() const override { return true; }
    double norm_functional(const Eigen::VectorXd& v, double t) const override;
    /// Real and imaginary parts of xy.
    std::vector<double> conserved() const override;
    EscapeReport escape_report(const MomentProblem& start) const override;
    nlohmann::json state_json() const override;

    cplx x() const { return x_; }
    cplx y() const { return y_; }
    double shift() const { return a_; }

private:
    cplx x_, y_;
    double a_;
};

std::unique_ptr<MomentProblem> hyperbola_problem(cplx x, cplx y, double a);

/// Whether the C*-orbit of (x, y) meets the zero set of the shifted moment.
bool hyperbola_orbit_has_zero(cplx x, cplx y, double a);

// ------------------------------------------------------------ utilities --

/// Orthonormal basis of n x n Hermitian matrices under <X, Y> = tr(XY).
std::vector<CMatrix> hermitian_basis(int n);
Eigen::VectorXd hermitian_coordinates(const CMatrix& H, const std::vector<CMatrix>& basis);
CMatrix from_coordinates(const Eigen::VectorXd& c, const std::vector<CMatrix>& basis);

PointConfig random_point_config(std::mt19937_64& rng, int max_total, int max_multiplicity);
CMatrix random_complex_matrix(std::mt19937_64& rng, int rows, int cols);

/// Builds an instance from { "kind": ..., payload }. Throws InputError with a
/// JSON pointer on schema violations.
std::unique_ptr<MomentProblem> problem_from_json(const nlohmann::json& j);
PointConfig point_config_from_json(const nlohmann::json& j, const std::string& pointer = "");
nlohmann::json to_json(const PointsVerdict& v);

} // namespace stabkit
