#include "stabkit/metrics.hpp"

#include "stabkit/errors.hpp"
#include "stabkit/parallel.hpp"
#include "stabkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace stabkit {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;
constexpr std::size_t chunk_size = 16;

struct Node {
    double u, theta, weight;
};

int angular_count(const MetricOptions& opt, int r) {
    return opt.angular_nodes > 0 ? opt.angular_nodes : std::max(32, 4 * (r + 1));
}

std::vector<Node> make_nodes(const MetricOptions& opt, int angular) {
    const GaussRule g = gauss_legendre_unit(opt.radial_order);
    std::vector<Node> nodes;
    nodes.reserve(g.nodes.size() * static_cast<std::size_t>(angular));
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (int j = 0; j < angular; ++j)
            nodes.push_back({g.nodes[i], 2 * pi * j / angular, g.weights[i] / angular});
    return nodes;
}

// sqrt(C(r, i)) for i = 0..r.
std::vector<double> binomial_roots(int r) {
    std::vector<double> d(static_cast<std::size_t>(r) + 1);
    for (int i = 0; i <= r; ++i)
        d[static_cast<std::size_t>(i)] =
            std::exp(0.5 * (std::lgamma(r + 1.0) - std::lgamma(i + 1.0) - std::lgamma(r - i + 1.0)));
    return d;
}

Eigen::VectorXd frame_radial(int r, double u, const std::vector<double>& d) {
    Eigen::VectorXd e(r + 1);
    const double a = std::sqrt(u), b = std::sqrt(1 - u);
    for (int i = 0; i <= r; ++i) e(i) = d[static_cast<std::size_t>(i)] * std::pow(a, i) * std::pow(b, r - i);
    return e;
}

// e_i = sqrt(C(r,i)) u^{i/2} (1-u)^{(r-i)/2} e^{i i θ}: the monomial z^i in the
// unitary frame of h_FS^r, scaled so that the round Gram is I / (r+1).
Eigen::VectorXcd frame(int r, double u, double theta, const std::vector<double>& d) {
    const Eigen::VectorXd m = frame_radial(r, u, d);
    Eigen::VectorXcd e(r + 1);
    for (int i = 0; i <= r; ++i) e(i) = std::polar(m(i), i * theta);
    return e;
}

Eigen::VectorXd scale_vector(int r) {
    const auto d = binomial_roots(r);
    return Eigen::Map<const Eigen::VectorXd>(d.data(), r + 1);
}

// D G D with D = diag sqrt(C(r,i)).
CMatrix to_frame(const CMatrix& G) {
    const Eigen::VectorXd d = scale_vector(static_cast<int>(G.rows()) - 1);
    return d.asDiagonal() * G * d.asDiagonal();
}

CMatrix from_frame(const CMatrix& Gs) {
    const Eigen::VectorXd d = scale_vector(static_cast<int>(Gs.rows()) - 1);
    const Eigen::VectorXd inv = d.cwiseInverse();
    return inv.asDiagonal() * Gs * inv.asDiagonal();
}

void require_positive(const PotentialSample& s, const Node& n) {
    if (!std::isfinite(s.phi) || !std::isfinite(s.rho))
        throw NumericalError("potential is not finite at u = " + std::to_string(n.u));
    if (s.rho <= 0)
        throw InputError("ω_φ is not positive at u = " + std::to_string(n.u));
}

bool is_diagonal(const CMatrix& M) {
    const double scale = M.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            if (i != j && std::abs(M(i, j)) > 1e-15 * scale) return false;
    return true;
}

void check_hermitian_pd(const CMatrix& G, int r) {
    if (G.rows() != r + 1 || G.cols() != r + 1)
        throw InputError("Gram matrix must be " + std::to_string(r + 1) + "x" + std::to_string(r + 1));
    if ((G - G.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, G.cwiseAbs().maxCoeff()))
        throw InputError("Gram matrix is not Hermitian");
}

// Sum of per-chunk partials in chunk order, so the result does not depend on
// the thread count.
template <class Partial, class Body>
Partial chunked_sum(std::size_t n, const Partial& zero, Exec exec, Body body) {
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    std::vector<Partial> partial(chunks, zero);
    run_indexed(chunks, exec, [&](std::size_t c) {
        const std::size_t lo = c * chunk_size, hi = std::min(n, lo + chunk_size);
        for (std::size_t k = lo; k < hi; ++k) body(k, partial[c]);
    });
    Partial total = zero;
    for (const auto& p : partial) total += p;
    return total;
}

// Gram in the scaled frame.
CMatrix frame_gram(const MetricPotential& phi, int r, const MetricOptions& opt) {
    const auto d = binomial_roots(r);
    const int n = r + 1;
    if (phi.radial()) {
        const auto nodes = make_nodes(opt, 1);
        const Eigen::VectorXd diag =
            chunked_sum(nodes.size(), Eigen::VectorXd(Eigen::VectorXd::Zero(n)), opt.exec,
                        [&](std::size_t k, Eigen::VectorXd& acc) {
                            const Node& nd = nodes[k];
                            const PotentialSample s = phi.sample(nd.u, 0);
                            require_positive(s, nd);
                            const double f = nd.weight * s.rho * std::exp(-r * s.phi);
                            acc += f * frame_radial(r, nd.u, d).cwiseAbs2();
                        });
        return diag.cast<cplx>().asDiagonal();
    }
    const auto nodes = make_nodes(opt, angular_count(opt, r));
    CMatrix G = chunked_sum(nodes.size(), CMatrix(CMatrix::Zero(n, n)), opt.exec,
                            [&](std::size_t k, CMatrix& acc) {
                                const Node& nd = nodes[k];
                                const PotentialSample s = phi.sample(nd.u, nd.theta);
                                require_positive(s, nd);
                                const double f = nd.weight * s.rho * std::exp(-r * s.phi);
                                const Eigen::VectorXcd e = frame(r, nd.u, nd.theta, d);
                                acc.selfadjointView<Eigen::Lower>().rankUpdate(e, f);
                            });
    G = G.selfadjointView<Eigen::Lower>();
    return G;
}

double log_det_pd(const CMatrix& G) {
    Eigen::LLT<CMatrix> llt(G);
    if (llt.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive definite");
    double s = 0;
    for (Eigen::Index i = 0; i < G.rows(); ++i) s += 2 * std::log(llt.matrixL()(i, i).real());
    return s;
}

} // namespace

// ------------------------------------------------------------ potentials --

RadialPotential::RadialPotential(std::vector<double> legendre) : c_(std::move(legendre)) {
    for (double c : c_)
        if (!std::isfinite(c)) throw InputError("potential coefficients must be finite");
}

RadialPotential RadialPotential::bump(double amplitude) {
    // 4u(1-u) = 1 - y^2 = 2/3 - (2/3) P_2(y)
    return RadialPotential({amplitude * 2.0 / 3.0, 0.0, -amplitude * 2.0 / 3.0});
}

RadialPotential RadialPotential::mode(double amplitude, int l) {
    if (l < 0) throw InputError("mode index must be nonnegative");
    // P_l(1 - 2u) = P_l(-y) = (-1)^l P_l(y)
    std::vector<double> c(static_cast<std::size_t>(l) + 1, 0.0);
    c.back() = (l % 2 == 0 ? 1.0 : -1.0) * amplitude;
    return RadialPotential(std::move(c));
}

RadialPotential RadialPotential::fit(const std::vector<double>& u, const std::vector<double>& values, int degree) {
    if (u.size() != values.size()) throw InputError("node and value counts differ");
    if (degree < 0 || static_cast<std::size_t>(degree) >= u.size())
        throw InputError("fit degree must be below the number of nodes");
    Eigen::MatrixXd V(static_cast<Eigen::Index>(u.size()), degree + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(u.size()));
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!(u[k] >= 0 && u[k] <= 1)) throw InputError("nodes must lie in [0, 1]");
        const auto P = legendre_table(degree, 2 * u[k] - 1, 0);
        for (int m = 0; m <= degree; ++m) V(static_cast<Eigen::Index>(k), m) = P[0][static_cast<std::size_t>(m)];
        b(static_cast<Eigen::Index>(k)) = values[k];
    }
    const Eigen::VectorXd c = V.colPivHouseholderQr().solve(b);
    return RadialPotential(std::vector<double>(c.data(), c.data() + c.size()));
}

std::array<double, 5> RadialPotential::jet(double u) const {
    std::array<double, 5> out{};
    if (c_.empty()) return out;
    const int n = static_cast<int>(c_.size()) - 1;
    const auto P = legendre_table(n, 2 * u - 1, 4);
    double scale = 1;
    for (std::size_t k = 0; k < 5; ++k) {
        double s = 0;
        for (std::size_t m = 0; m < c_.size(); ++m) s += c_[m] * P[k][m];
        out[k] = scale * s;
        scale *= 2;
    }
    return out;
}

PotentialSample RadialPotential::sample(double u, double) const {
    const auto j = jet(u);
    return {j[0], 1 + (1 - 2 * u) * j[1] + u * (1 - u) * j[2]};
}

double RadialPotential::moment(double u) const { return u + u * (1 - u) * jet(u)[1]; }

double RadialPotential::curvature(double u) const {
    const auto f = jet(u);
    const double a = u * (1 - u), b = 1 - 2 * u;
    // x'(u), x''(u), x'''(u) for x = u + a φ'
    const double x1 = 1 + b * f[1] + a * f[2];
    const double x2 = -2 * f[1] + 2 * b * f[2] + a * f[3];
    const double x3 = -6 * f[2] + 3 * b * f[3] + a * f[4];
    // Φ = a x' as a function of x
    const double p1 = b * x1 + a * x2;
    const double p2 = -2 * x1 + 2 * b * x2 + a * x3;
    const double phi_xx = (p2 * x1 - p1 * x2) / (x1 * x1 * x1);
    return -conventions::curvature_scale * phi_xx;
}

RadialPotential RadialPotential::operator+(const RadialPotential& o) const {
    std::vector<double> c(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) c[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) c[i] += o.c_[i];
    return RadialPotential(std::move(c));
}

RadialPotential RadialPotential::operator*(double s) const {
    std::vector<double> c = c_;
    for (double& x : c) x *= s;
    return RadialPotential(std::move(c));
}

nlohmann::json RadialPotential::to_json() const { return {{"legendre", c_}}; }

FubiniStudyPotential::FubiniStudyPotential(int k, CMatrix H) : k_(k), H_(std::move(H)) {
    if (k < 1) throw InputError("degree must be at least 1");
    check_hermitian_pd(H_, k);
    diagonal_ = is_diagonal(H_);
}

PotentialSample FubiniStudyPotential::sample(double u, double theta) const {
    // Evaluate in the chart where the coordinate has modulus at most one.
    const bool near = u <= 0.5;
    const double mod2 = near ? u / (1 - u) : (1 - u) / u;
    const cplx z = std::polar(std::sqrt(mod2), near ? theta : -theta);
    std::vector<cplx> zp(static_cast<std::size_t>(k_) + 1);
    zp[0] = 1;
    for (std::size_t p = 1; p < zp.size(); ++p) zp[p] = zp[p - 1] * z;
    Eigen::VectorXcd v(k_ + 1), dv(k_ + 1);
    for (int i = 0; i <= k_; ++i) {
        const auto p = static_cast<std::size_t>(near ? i : k_ - i);
        v(i) = zp[p];
        dv(i) = p == 0 ? cplx(0) : double(p) * zp[p - 1];
    }
    const double F = (v.adjoint() * H_ * v)(0).real();
    const double A = (dv.adjoint() * H_ * dv)(0).real();
    const double B = std::norm((v.adjoint() * H_ * dv)(0));
    if (!(F > 0)) throw NumericalError("induced form is not positive");
    const double w = 1 + mod2;
    PotentialSample s;
    s.phi = (std::log(F) - k_ * std::log(w)) / k_;
    s.rho = w * w * (A * F - B) / (k_ * F * F);
    return s;
}

nlohmann::json FubiniStudyPotential::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < H_.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < H_.cols(); ++j) row.push_back({H_(i, j).real(), H_(i, j).imag()});
        rows.push_back(row);
    }
    return {{"fubini_study", {{"k", k_}, {"form", rows}}}};
}

// ------------------------------------------------------------------ gram --

CMatrix gram(const MetricPotential& phi, int r, const MetricOptions& opt) {
    if (r < 1) throw InputError("r must be at least 1");
    return from_frame(frame_gram(phi, r, opt));
}

CMatrix round_gram(int r) {
    if (r < 1) throw InputError("r must be at least 1");
    CMatrix G = CMatrix::Zero(r + 1, r + 1);
    for (int i = 0; i <= r; ++i)
        G(i, i) = std::exp(std::lgamma(i + 1.0) + std::lgamma(r - i + 1.0) - std::lgamma(r + 2.0));
    return G;
}

// --------------------------------------------------------------- bergman --

double BergmanProfile::integral() const {
    double s = 0;
    for (std::size_t k = 0; k < value.size(); ++k) s += weight[k] * rho[k] * value[k];
    return s;
}

double BergmanProfile::min() const { return *std::min_element(value.begin(), value.end()); }
double BergmanProfile::max() const { return *std::max_element(value.begin(), value.end()); }

BergmanProfile bergman(const MetricPotential& phi, const CMatrix& G, int r, const MetricOptions& opt) {
    return bergman(phi, G, CMatrix::Identity(r + 1, r + 1), r, opt);
}

BergmanProfile bergman(const MetricPotential& phi, const CMatrix& G, const CMatrix& basis, int r,
                       const MetricOptions& opt) {
    if (r < 1) throw InputError("r must be at least 1");
    check_hermitian_pd(G, r);
    if (basis.rows() != r + 1 || basis.cols() != r + 1) throw InputError("basis must be square of size r+1");
    // Gram of the scaled monomial frame: K^{-1} G K^{-*} with K = basis D^{-1}.
    const Eigen::VectorXd d = scale_vector(r);
    Eigen::PartialPivLU<CMatrix> lu(basis);
    if (std::abs(lu.determinant()) == 0) throw InputError("basis is singular");
    const CMatrix Kinv = d.asDiagonal() * lu.inverse();
    CMatrix Gs = Kinv * G * Kinv.adjoint();
    Gs = (0.5 * (Gs + Gs.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Gs, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0)) throw InputError("Gram matrix is not positive definite");
    if (hi / lo > 1e12) throw NumericalError("Gram matrix is ill-conditioned (condition " + std::to_string(hi / lo) + ")");
    const Eigen::LLT<CMatrix> llt(Gs);
    const CMatrix L = llt.matrixL();

    const bool radial = phi.radial() && is_diagonal(Gs);
    const auto nodes = make_nodes(opt, radial ? 1 : angular_count(opt, r));
    const auto dv = binomial_roots(r);
    BergmanProfile out;
    out.r = r;
    const std::size_t n = nodes.size();
    out.u.resize(n);
    out.theta.resize(n);
    out.weight.resize(n);
    out.value.resize(n);
    out.rho.resize(n);
    run_indexed(n, opt.exec, [&](std::size_t k) {
        const Node& nd = nodes[k];
        const PotentialSample s = phi.sample(nd.u, nd.theta);
        require_positive(s, nd);
        const Eigen::VectorXcd e = frame(r, nd.u, nd.theta, dv);
        const Eigen::VectorXcd y = L.triangularView<Eigen::Lower>().solve(e);
        out.u[k] = nd.u;
        out.theta[k] = nd.theta;
        out.weight[k] = nd.weight;
        out.rho[k] = s.rho;
        out.value[k] = std::exp(-r * s.phi) * y.squaredNorm();
    });
    return out;
}

double bergman_at(const MetricPotential& phi, const CMatrix& G, int r, double u, double theta) {
    check_hermitian_pd(G, r);
    if (!(u >= 0 && u <= 1)) throw InputError("u must lie in [0, 1]");
    Eigen::LLT<CMatrix> llt(to_frame(G));
    if (llt.info() != Eigen::Success) throw InputError("Gram matrix is not positive definite");
    const Eigen::VectorXcd e = frame(r, u, theta, binomial_roots(r));
    const Eigen::VectorXcd y = llt.matrixL().solve(e);
    return std::exp(-r * phi.sample(u, theta).phi) * y.squaredNorm();
}

// ------------------------------------------------------------ t-operator --

CMatrix normalize_det(const CMatrix& G) {
    const double ld = log_det_pd(G);
    return G * std::exp(-ld / static_cast<double>(G.rows()));
}

FubiniStudyPotential induced_potential(int r, const CMatrix& G) {
    check_hermitian_pd(G, r);
    // G^{-1} = D (D G D)^{-1} D, inverted in the well-conditioned frame.
    const Eigen::VectorXd d = scale_vector(r);
    const CMatrix Gs = to_frame(G);
    Eigen::LLT<CMatrix> llt(Gs);
    if (llt.info() != Eigen::Success) throw InputError("Gram matrix is not positive definite");
    CMatrix Hs = llt.solve(CMatrix::Identity(r + 1, r + 1));
    Hs = (0.5 * (Hs + Hs.adjoint())).eval();
    if (is_diagonal(Gs)) Hs = CMatrix(Hs.diagonal().asDiagonal());
    return FubiniStudyPotential(r, d.asDiagonal() * Hs * d.asDiagonal());
}

CMatrix t_operator(int r, const CMatrix& G, const MetricOptions& opt) {
    const FubiniStudyPotential fs = induced_potential(r, G);
    return normalize_det(gram(fs, r, opt));
}

double balance_residual(const CMatrix& G, const CMatrix& TG) {
    const CMatrix Gs = to_frame(G), Ts = to_frame(TG);
    Eigen::LLT<CMatrix> llt(Gs);
    if (llt.info() != Eigen::Success) throw InputError("Gram matrix is not positive definite");
    const CMatrix L = llt.matrixL();
    CMatrix M = L.triangularView<Eigen::Lower>().solve(Ts);
    M = L.triangularView<Eigen::Lower>().solve(M.adjoint()).adjoint();
    M /= M.trace().real();
    const auto n = static_cast<double>(G.rows());
    return (M - CMatrix::Identity(G.rows(), G.cols()) / n).cwiseAbs().maxCoeff();
}

namespace {

// Coordinates of log(D G D): real and imaginary parts of the upper triangle.
Eigen::VectorXd log_coordinates(const CMatrix& G) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(to_frame(G));
    const CMatrix X = es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
                      es.eigenvectors().adjoint();
    const Eigen::Index n = G.rows();
    Eigen::VectorXd v(n * n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        v(k++) = X(i, i).real();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            v(k++) = X(i, j).real();
            v(k++) = X(i, j).imag();
        }
    }
    return v;
}

CMatrix from_log_coordinates(const Eigen::VectorXd& v, Eigen::Index n) {
    CMatrix X(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, i) = v(k++);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            X(i, j) = cplx(v(k), v(k + 1));
            X(j, i) = std::conj(X(i, j));
            k += 2;
        }
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(X);
    const CMatrix E = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                      es.eigenvectors().adjoint();
    return normalize_det(from_frame(0.5 * (E + E.adjoint())));
}

} // namespace

BalanceResult balance_iterate(const MetricPotential& phi0, int r, double tol, int max_iter, const MetricOptions& opt) {
    if (!(tol > 0)) throw InputError("tol must be positive");
    if (max_iter < 1) throw InputError("max_iter must be positive");
    if (opt.anderson_depth < 0) throw InputError("anderson_depth must be nonnegative");
    BalanceResult res;
    CMatrix G = normalize_det(gram(phi0, r, opt));
    const auto depth = static_cast<std::size_t>(opt.anderson_depth);
    std::vector<Eigen::VectorXd> xs, fs;
    for (int it = 1; it <= max_iter; ++it) {
        CMatrix T = t_operator(r, G, opt);
        res.residual = balance_residual(G, T);
        res.residual_trace.push_back(res.residual);
        res.iterations = it;
        if (res.residual <= tol) {
            res.converged = true;
            break;
        }
        if (depth == 0) {
            G = std::move(T);
            continue;
        }
        // Anderson mixing on the fixed-point map x -> log T(exp x).
        const Eigen::VectorXd x = log_coordinates(G);
        const Eigen::VectorXd f = log_coordinates(T) - x;
        xs.push_back(x);
        fs.push_back(f);
        if (xs.size() > depth + 1) {
            xs.erase(xs.begin());
            fs.erase(fs.begin());
        }
        Eigen::VectorXd next = x + f;
        if (xs.size() > 1) {
            const auto m = static_cast<Eigen::Index>(xs.size() - 1);
            Eigen::MatrixXd dF(f.size(), m), dX(f.size(), m);
            for (Eigen::Index j = 0; j < m; ++j) {
                const auto a = static_cast<std::size_t>(j);
                dF.col(j) = fs[a + 1] - fs[a];
                dX.col(j) = xs[a + 1] - xs[a];
            }
            const Eigen::VectorXd gamma = dF.colPivHouseholderQr().solve(f);
            if (gamma.allFinite()) next = x + f - (dX + dF) * gamma;
        }
        G = from_log_coordinates(next, r + 1);
    }
    res.gram = G;
    res.potential = induced_potential(r, G).clone();
    return res;
}

double potential_distance(const MetricPotential& a, const MetricPotential& b, const MetricOptions& opt) {
    const int angular = a.radial() && b.radial() ? 1 : std::max(32, opt.angular_nodes);
    const auto nodes = make_nodes(opt, angular);
    double lo = INFINITY, hi = -INFINITY;
    for (const Node& nd : nodes) {
        const double diff = a.sample(nd.u, nd.theta).phi - b.sample(nd.u, nd.theta).phi;
        lo = std::min(lo, diff);
        hi = std::max(hi, diff);
    }
    return 0.5 * (hi - lo);
}

// ------------------------------------------------------------- curvature --

double CurvatureProfile::integral() const {
    double s = 0;
    for (std::size_t k = 0; k < value.size(); ++k) s += weight[k] * rho[k] * value[k];
    return s;
}

CurvatureProfile curvature(const RadialPotential& phi, const MetricOptions& opt) {
    const GaussRule g = gauss_legendre_unit(opt.radial_order);
    CurvatureProfile out;
    out.u = g.nodes;
    out.weight = g.weights;
    double area = 0;
    for (double u : g.nodes) {
        const PotentialSample s = phi.sample(u, 0);
        require_positive(s, {u, 0, 0});
        out.rho.push_back(s.rho);
        out.value.push_back(phi.curvature(u));
    }
    for (std::size_t k = 0; k < g.nodes.size(); ++k) area += g.weights[k] * out.rho[k];
    out.mean = out.integral() / area;
    return out;
}

ExpansionFit expansion_check(const RadialPotential& phi, const std::vector<int>& r_list, const MetricOptions& opt) {
    if (r_list.size() < 3) throw InputError("expansion fit needs at least three values of r");
    ExpansionFit fit;
    fit.r = r_list;
    const CurvatureProfile s = curvature(phi, opt);
    fit.u = s.u;
    const std::size_t n = s.u.size();
    std::vector<std::vector<double>> B;
    for (int r : r_list) {
        const CMatrix G = gram(phi, r, opt);
        B.push_back(bergman(phi, G, r, opt).value);
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(r_list.size()), 2);
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = r_list[i];
        X(static_cast<Eigen::Index>(i), 1) = 1;
    }
    const auto qr = X.colPivHouseholderQr();
    double err = 0, scale = 0;
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(r_list.size()));
        for (std::size_t i = 0; i < r_list.size(); ++i) y(static_cast<Eigen::Index>(i)) = B[i][k];
        const Eigen::VectorXd c = qr.solve(y);
        fit.c0.push_back(c(0));
        fit.c1.push_back(c(1));
        const double pred = s.value[k] / (2 * pi);
        fit.predicted.push_back(pred);
        err = std::max(err, std::abs(c(1) - pred));
        scale = std::max(scale, std::abs(pred));
    }
    fit.c0_min = *std::min_element(fit.c0.begin(), fit.c0.end());
    fit.c0_max = *std::max_element(fit.c0.begin(), fit.c0.end());
    fit.c1_relative_error = err / scale;
    return fit;
}

// -------------------------------------------------------------- k-energy --

double k_energy_rate(const RadialPotential& phi, const RadialPotential& dphi, const MetricOptions& opt) {
    const GaussRule g = gauss_legendre_unit(opt.radial_order);
    double s = 0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double u = g.nodes[k];
        const PotentialSample p = phi.sample(u, 0);
        require_positive(p, {u, 0, 0});
        s += g.weights[k] * dphi.jet(u)[0] * (phi.curvature(u) - conventions::mean_curvature) * p.rho;
    }
    return -s;
}

double k_energy(const std::vector<RadialPotential>& path, const MetricOptions& opt) {
    if (path.empty()) return 0;
    double m = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const RadialPotential mid = (path[i] + path[i + 1]) * 0.5;
        const RadialPotential step = path[i + 1] + path[i] * -1.0;
        m += k_energy_rate(mid, step, opt);
    }
    return m;
}

std::vector<RadialPotential> linear_path(const RadialPotential& phi, int steps) {
    if (steps < 1) throw InputError("path needs at least one step");
    std::vector<RadialPotential> path;
    for (int i = 0; i <= steps; ++i) path.push_back(phi * (double(i) / steps));
    return path;
}

double futaki_rotation(const RadialPotential& phi, const MetricOptions& opt) {
    const GaussRule g = gauss_legendre_unit(opt.radial_order);
    double s = 0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double u = g.nodes[k];
        const PotentialSample p = phi.sample(u, 0);
        require_positive(p, {u, 0, 0});
        s += g.weights[k] * (phi.moment(u) - 0.5) * (phi.curvature(u) - conventions::mean_curvature) * p.rho;
    }
    return s;
}

// ------------------------------------------------------------------ json --

RadialPotential potential_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("potential must be an object", "");
    auto number = [&](const char* key, double def) {
        if (!j.contains(key)) return def;
        if (!j[key].is_number()) throw InputError(std::string(key) + " must be a number", std::string("/") + key);
        return j[key].get<double>();
    };
    RadialPotential phi;
    if (j.contains("family")) {
        if (!j["family"].is_string()) throw InputError("family must be a string", "/family");
        const std::string f = j["family"];
        const double a = number("amplitude", 0.0);
        if (f == "round") phi = RadialPotential::round();
        else if (f == "bump") phi = RadialPotential::bump(a);
        else if (f == "mode") phi = RadialPotential::mode(a, static_cast<int>(number("l", 1)));
        else throw InputError("unknown potential family '" + f + "'", "/family");
    } else if (j.contains("legendre")) {
        if (!j["legendre"].is_array()) throw InputError("legendre must be an array", "/legendre");
        std::vector<double> c;
        for (std::size_t i = 0; i < j["legendre"].size(); ++i) {
            if (!j["legendre"][i].is_number())
                throw InputError("coefficient must be a number", "/legendre/" + std::to_string(i));
            c.push_back(j["legendre"][i].get<double>());
        }
        phi = RadialPotential(std::move(c));
    } else if (j.contains("nodes")) {
        if (!j["nodes"].is_array()) throw InputError("nodes must be an array", "/nodes");
        if (!j.contains("values") || !j["values"].is_array()) throw InputError("values must be an array", "/values");
        std::vector<double> u, v;
        for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
            if (!j["nodes"][i].is_number()) throw InputError("node must be a number", "/nodes/" + std::to_string(i));
            u.push_back(j["nodes"][i].get<double>());
        }
        for (std::size_t i = 0; i < j["values"].size(); ++i) {
            if (!j["values"][i].is_number()) throw InputError("value must be a number", "/values/" + std::to_string(i));
            v.push_back(j["values"][i].get<double>());
        }
        if (u.size() != v.size()) throw InputError("nodes and values differ in length", "/values");
        const int deg = static_cast<int>(number("degree", std::min<double>(double(u.size()) - 1, 24)));
        phi = RadialPotential::fit(u, v, deg);
    } else {
        throw InputError("potential needs one of family, legendre, nodes", "");
    }
    const GaussRule g = gauss_legendre_unit(64);
    for (double u : g.nodes) {
        const PotentialSample s = phi.sample(u, 0);
        if (!(s.rho > 0)) throw InputError("ω_φ is not positive at u = " + std::to_string(u), "");
    }
    return phi;
}

} // namespace stabkit
