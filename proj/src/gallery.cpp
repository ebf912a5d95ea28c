#include "stabkit/gallery.hpp"

#include "stabkit/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stabkit {

namespace {

constexpr double kCollision = 1e-6;

Eigen::Matrix4d lorentz_generator(const Eigen::Vector3d& rot, const Eigen::Vector3d& boost) {
    Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
    L.block<1, 3>(0, 1) = boost.transpose();
    L.block<3, 1>(1, 0) = boost;
    L(1, 2) = -rot(2);
    L(1, 3) = rot(1);
    L(2, 1) = rot(2);
    L(2, 3) = -rot(0);
    L(3, 1) = -rot(1);
    L(3, 2) = rot(0);
    return L;
}

// Homogeneous coordinates [num : den] of z = (p1 + i p2) / (1 + p3),
// switching to the antipodal chart near the south pole.
std::pair<cplx, cplx> homogeneous(const Eigen::Vector3d& p) {
    if (p(2) >= 0) return {cplx(p(0), p(1)), cplx(1.0 + p(2), 0.0)};
    return {cplx(1.0 - p(2), 0.0), cplx(p(0), -p(1))};
}

cplx hdet(const std::pair<cplx, cplx>& a, const std::pair<cplx, cplx>& b) {
    return a.first * b.second - b.first * a.second;
}

CMatrix hermitian_exp(const CMatrix& H, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    const Eigen::VectorXd e = (t * es.eigenvalues().array()).exp();
    return es.eigenvectors() * e.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix complex_from_json(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) throw InputError("matrix must be a nonempty array of rows", ptr);
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw InputError("matrix rows must be nonempty arrays", ptr + "/0");
    const std::size_t cols = j[0].size();
    CMatrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string rp = ptr + "/" + std::to_string(i);
        if (!j[i].is_array() || j[i].size() != cols) throw InputError("ragged matrix row", rp);
        for (std::size_t k = 0; k < cols; ++k) {
            const auto& e = j[i][k];
            const std::string ep = rp + "/" + std::to_string(k);
            cplx v;
            if (e.is_number()) v = e.get<double>();
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                v = cplx(e[0].get<double>(), e[1].get<double>());
            else throw InputError("matrix entry must be a number or [re, im]", ep);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("non-finite matrix entry", ep);
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
        }
    }
    return M;
}

nlohmann::json complex_to_json(const CMatrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back({M(i, k).real(), M(i, k).imag()});
        rows.push_back(row);
    }
    return rows;
}

cplx complex_scalar(const nlohmann::json& j, const std::string& ptr) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InputError("expected a number or [re, im]", ptr);
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& ptr) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'", ptr + "/" + key);
    return j.at(key);
}

} // namespace

// ---------------------------------------------------------------- points --

int PointConfig::total() const { return std::accumulate(multiplicities.begin(), multiplicities.end(), 0); }

void PointConfig::validate() const {
    if (points.empty()) throw InputError("configuration needs at least one point", "/points");
    if (points.size() != multiplicities.size())
        throw InputError("points and multiplicities differ in length", "/multiplicities");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].allFinite() || std::abs(points[i].norm() - 1.0) > 1e-12)
            throw InputError("point is not a unit vector", "/points/" + std::to_string(i));
        if (multiplicities[i] < 1)
            throw InputError("multiplicity must be positive", "/multiplicities/" + std::to_string(i));
        for (std::size_t j = 0; j < i; ++j)
            if ((points[i] - points[j]).norm() < 1e-9)
                throw InputError("points must be distinct", "/points/" + std::to_string(i));
    }
}

PointsVerdict classify_points(const PointConfig& c) {
    c.validate();
    const int n = c.total();
    PointsVerdict v;
    int half_count = 0;
    for (std::size_t i = 0; i < c.multiplicities.size(); ++i) {
        const int twice = 2 * c.multiplicities[i];
        if (twice > n) {
            v.cls = StabilityClass::Unstable;
            v.offending = static_cast<int>(i);
            return v;
        }
        if (twice == n) ++half_count;
    }
    if (half_count == 0) v.cls = StabilityClass::Stable;
    else if (c.points.size() == 2) v.cls = StabilityClass::Polystable;
    else v.cls = StabilityClass::StrictlySemistable;
    return v;
}

PointsProblem::PointsProblem(PointConfig c) : c_(std::move(c)) { c_.validate(); }

Eigen::VectorXd PointsProblem::moment() const {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < c_.points.size(); ++i) m += c_.multiplicities[i] * c_.points[i];
    return m;
}

void PointsProblem::act(const Eigen::VectorXd& xi) {
    if (xi.size() != 6) throw InputError("points action expects 6 coordinates");
    const Eigen::Matrix4d g = lorentz_generator(xi.head<3>(), 2.0 * xi.tail<3>()).exp();
    for (auto& p : c_.points) {
        Eigen::Vector4d x;
        x << 1.0, p;
        const Eigen::Vector4d y = g * x;
        p = (y.tail<3>() / y(0)).normalized();
    }
}

double PointsProblem::norm_functional(const Eigen::VectorXd& v, double t) const {
    const double s = 2.0 * t * v.norm();
    const Eigen::Vector3d u = v.norm() > 0 ? Eigen::Vector3d(v / v.norm()) : Eigen::Vector3d::Zero();
    double f = 0;
    for (std::size_t i = 0; i < c_.points.size(); ++i)
        f += c_.multiplicities[i] * 0.5 * std::log(std::cosh(s) + std::sinh(s) * u.dot(c_.points[i]));
    return f;
}

std::vector<double> PointsProblem::conserved() const {
    std::vector<double> out;
    const auto& p = c_.points;
    for (std::size_t k = 3; k < p.size(); ++k) {
        const auto a = homogeneous(p[0]), b = homogeneous(p[1]), c = homogeneous(p[2]), d = homogeneous(p[k]);
        const cplx cr = (hdet(a, c) * hdet(b, d)) / (hdet(b, c) * hdet(a, d));
        out.push_back(cr.real());
        out.push_back(cr.imag());
    }
    return out;
}

EscapeReport PointsProblem::escape_report(const MomentProblem&) const {
    const std::size_t k = c_.points.size();
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if ((c_.points[i] - c_.points[j]).norm() < kCollision) parent[find(i)] = find(j);
    std::vector<std::vector<int>> clusters(k);
    for (std::size_t i = 0; i < k; ++i) clusters[find(i)].push_back(static_cast<int>(i));
    EscapeReport r;
    for (const auto& cl : clusters)
        if (cl.size() >= 2 && cl.size() > r.witness.size()) r.witness = cl;
    if (!r.witness.empty()) {
        r.escaped = true;
        r.detail = "points collided";
    }
    return r;
}

nlohmann::json PointsProblem::state_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c_.points) pts.push_back({p(0), p(1), p(2)});
    return {{"kind", "points"}, {"points", pts}, {"multiplicities", c_.multiplicities}};
}

std::unique_ptr<MomentProblem> points_problem(const PointConfig& c) { return std::make_unique<PointsProblem>(c); }

cplx stereographic(const Eigen::Vector3d& p) { return cplx(p(0), p(1)) / (1.0 + p(2)); }

cplx cross_ratio(cplx a, cplx b, cplx c, cplx d) { return ((a - c) * (b - d)) / ((b - c) * (a - d)); }

// ------------------------------------------------------------------- hom --

HomProblem::HomProblem(CMatrix A) : A_(std::move(A)) {
    if (A_.cols() < 1 || A_.rows() <= A_.cols()) throw InputError("hom instance needs n x r with r < n", "/matrix");
    if (!A_.allFinite()) throw InputError("non-finite matrix entry", "/matrix");
}

int HomProblem::lie_dim() const { return static_cast<int>(A_.cols() * A_.cols()); }

Eigen::VectorXd HomProblem::moment() const {
    const auto r = A_.cols();
    const CMatrix H = A_.adjoint() * A_ - CMatrix::Identity(r, r);
    return hermitian_coordinates(H, hermitian_basis(static_cast<int>(r)));
}

void HomProblem::act(const Eigen::VectorXd& xi) {
    const int d = lie_dim();
    if (xi.size() != 2 * d) throw InputError("hom action expects 2 * lie_dim coordinates");
    const auto basis = hermitian_basis(static_cast<int>(A_.cols()));
    const CMatrix X = from_coordinates(xi.tail(d), basis) + cplx(0, 1) * from_coordinates(xi.head(d), basis);
    A_ = A_ * X.exp();
    // The action preserves rank, but rounding leaves ~1e-16 singular values
    // that the descent would amplify by e^eta per step.
    Eigen::JacobiSVD<CMatrix> svd(A_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    const double floor = rank_tolerance * std::max(s(0), 1.0);
    if ((s.array() <= floor).any()) {
        s = (s.array() <= floor).select(0.0, s);
        A_ = svd.matrixU() * s.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
    }
}

double HomProblem::norm_functional(const Eigen::VectorXd& v, double t) const {
    const CMatrix W = from_coordinates(v, hermitian_basis(static_cast<int>(A_.cols())));
    return 0.5 * (A_ * hermitian_exp(W, t)).squaredNorm() - t * W.trace().real();
}

std::vector<double> HomProblem::conserved() const {
    Eigen::JacobiSVD<CMatrix> svd(A_);
    const double top = svd.singularValues()(0);
    return {static_cast<double>((svd.singularValues().array() > rank_tolerance * std::max(top, 1.0)).count())};
}

nlohmann::json HomProblem::state_json() const { return {{"kind", "hom"}, {"matrix", complex_to_json(A_)}}; }

std::unique_ptr<MomentProblem> hom_problem(const CMatrix& A) { return std::make_unique<HomProblem>(A); }

CMatrix polar_isometry(const CMatrix& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A.adjoint() * A);
    const Eigen::VectorXd s = es.eigenvalues().array().rsqrt();
    return A * es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

// --------------------------------------------------------------- adjoint --

AdjointProblem::AdjointProblem(CMatrix A) : A_(std::move(A)) {
    if (A_.rows() < 1 || A_.rows() != A_.cols()) throw InputError("adjoint instance needs a square matrix", "/matrix");
    if (!A_.allFinite()) throw InputError("non-finite matrix entry", "/matrix");
}

int AdjointProblem::lie_dim() const { return static_cast<int>(A_.rows() * A_.rows()); }

Eigen::VectorXd AdjointProblem::moment() const {
    const CMatrix C = 0.5 * (A_ * A_.adjoint() - A_.adjoint() * A_);
    return hermitian_coordinates(C, hermitian_basis(static_cast<int>(A_.rows())));
}

void AdjointProblem::act(const Eigen::VectorXd& xi) {
    const int d = lie_dim();
    if (xi.size() != 2 * d) throw InputError("adjoint action expects 2 * lie_dim coordinates");
    const auto basis = hermitian_basis(static_cast<int>(A_.rows()));
    const CMatrix X = from_coordinates(xi.tail(d), basis) + cplx(0, 1) * from_coordinates(xi.head(d), basis);
    const CMatrix half = (0.5 * X).exp();
    const CMatrix inv = (-0.5 * X).exp();
    A_ = half * A_ * inv;
}

double AdjointProblem::norm_functional(const Eigen::VectorXd& v, double t) const {
    const CMatrix W = from_coordinates(v, hermitian_basis(static_cast<int>(A_.rows())));
    return 0.5 * (hermitian_exp(W, 0.5 * t) * A_ * hermitian_exp(W, -0.5 * t)).squaredNorm();
}

std::vector<double> AdjointProblem::conserved() const {
    std::vector<double> out;
    for (const auto& c : characteristic_polynomial(A_)) {
        out.push_back(c.real());
        out.push_back(c.imag());
    }
    return out;
}

EscapeReport AdjointProblem::escape_report(const MomentProblem& start) const {
    const auto* s = dynamic_cast<const AdjointProblem*>(&start);
    if (!s) return {};
    const CMatrix& A0 = s->A_;
    const auto n = A_.rows();
    Eigen::ComplexEigenSolver<CMatrix> es(A_);
    const Eigen::VectorXcd ev = es.eigenvalues();
    const double scale = 1.0 + A0.norm();
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        cplx sum = 0;
        int size = 0;
        for (Eigen::Index j = i; j < n; ++j)
            if (!used[static_cast<std::size_t>(j)] && std::abs(ev(j) - ev(i)) <= 1e-6 * scale) {
                used[static_cast<std::size_t>(j)] = true;
                sum += ev(j);
                ++size;
            }
        const cplx lambda = sum / double(size);
        Eigen::JacobiSVD<CMatrix> svd(A0 - lambda * CMatrix::Identity(n, n));
        const auto rank = (svd.singularValues().array() > 1e-6 * scale).count();
        const auto geometric = n - rank;
        if (geometric < size) {
            EscapeReport r;
            r.escaped = true;
            r.detail = "Jordan type changed: eigenvalue has algebraic multiplicity " + std::to_string(size) +
                       " but geometric multiplicity " + std::to_string(geometric) + " in the starting matrix";
            return r;
        }
    }
    return {};
}

nlohmann::json AdjointProblem::state_json() const { return {{"kind", "adjoint"}, {"matrix", complex_to_json(A_)}}; }

std::unique_ptr<MomentProblem> adjoint_problem(const CMatrix& A) { return std::make_unique<AdjointProblem>(A); }

std::vector<cplx> characteristic_polynomial(const CMatrix& A) {
    const auto n = A.rows();
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1, cplx(0));
    c[static_cast<std::size_t>(n)] = 1;
    CMatrix M = CMatrix::Zero(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        M = A * M + c[static_cast<std::size_t>(n - k + 1)] * CMatrix::Identity(n, n);
        c[static_cast<std::size_t>(n - k)] = -(A * M).trace() / double(k);
    }
    return c;
}

// ------------------------------------------------------------- hyperbola --

HyperbolaProblem::HyperbolaProblem(cplx x, cplx y, double a) : x_(x), y_(y), a_(a) {
    if (!std::isfinite(std::abs(x)) || !std::isfinite(std::abs(y)) || !std::isfinite(a))
        throw InputError("non-finite hyperbola state");
}

Eigen::VectorXd HyperbolaProblem::moment() const {
    Eigen::VectorXd m(1);
    m(0) = 0.5 * (std::norm(x_) - std::norm(y_) + a_);
    return m;
}

void HyperbolaProblem::act(const Eigen::VectorXd& xi) {
    if (xi.size() != 2) throw InputError("hyperbola action expects 2 coordinates");
    const cplx z(xi(1), xi(0));
    x_ *= std::exp(z);
    y_ *= std::exp(-z);
}

double HyperbolaProblem::norm_functional(const Eigen::VectorXd& v, double t) const {
    const double s = t * v(0);
    return 0.25 * (std::exp(2 * s) * std::norm(x_) + std::exp(-2 * s) * std::norm(y_)) + 0.5 * a_ * s;
}

std::vector<double> HyperbolaProblem::conserved() const {
    const cplx p = x_ * y_;
    return {p.real(), p.imag()};
}

EscapeReport HyperbolaProblem::escape_report(const MomentProblem& start) const {
    const auto* s = dynamic_cast<const HyperbolaProblem*>(&start);
    if (!s || hyperbola_orbit_has_zero(s->x_, s->y_, s->a_)) return {};
    return {true, "orbit contains no zero of the moment map; xy = 0 forces the limit onto an axis", {}};
}

nlohmann::json HyperbolaProblem::state_json() const {
    return {{"kind", "hyperbola"}, {"x", {x_.real(), x_.imag()}}, {"y", {y_.real(), y_.imag()}}, {"a", a_}};
}

std::unique_ptr<MomentProblem> hyperbola_problem(cplx x, cplx y, double a) {
    return std::make_unique<HyperbolaProblem>(x, y, a);
}

bool hyperbola_orbit_has_zero(cplx x, cplx y, double a) {
    const bool xz = x == cplx(0), yz = y == cplx(0);
    if (!xz && !yz) return true;
    if (!xz) return a < 0;
    if (!yz) return a > 0;
    return a == 0;
}

// ------------------------------------------------------------ utilities --

std::vector<CMatrix> hermitian_basis(int n) {
    std::vector<CMatrix> out;
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        CMatrix E = CMatrix::Zero(n, n);
        E(i, i) = 1;
        out.push_back(E);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            CMatrix S = CMatrix::Zero(n, n), T = CMatrix::Zero(n, n);
            S(i, j) = S(j, i) = r;
            T(i, j) = cplx(0, r);
            T(j, i) = cplx(0, -r);
            out.push_back(S);
            out.push_back(T);
        }
    return out;
}

Eigen::VectorXd hermitian_coordinates(const CMatrix& H, const std::vector<CMatrix>& basis) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a) c(static_cast<Eigen::Index>(a)) = (H * basis[a]).trace().real();
    return c;
}

CMatrix from_coordinates(const Eigen::VectorXd& c, const std::vector<CMatrix>& basis) {
    CMatrix H = CMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (std::size_t a = 0; a < basis.size(); ++a) H += c(static_cast<Eigen::Index>(a)) * basis[a];
    return H;
}

PointConfig random_point_config(std::mt19937_64& rng, int max_total, int max_multiplicity) {
    std::uniform_int_distribution<int> count(1, std::min(max_total, 6)), mult(1, max_multiplicity);
    std::normal_distribution<double> gauss;
    PointConfig c;
    while (true) {
        c.multiplicities.clear();
        const int k = count(rng);
        for (int i = 0; i < k; ++i) c.multiplicities.push_back(mult(rng));
        if (c.total() <= max_total) break;
    }
    for (std::size_t i = 0; i < c.multiplicities.size(); ++i) {
        Eigen::Vector3d p(gauss(rng), gauss(rng), gauss(rng));
        c.points.push_back(p.normalized());
    }
    return c;
}

CMatrix random_complex_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> gauss;
    CMatrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = cplx(gauss(rng), gauss(rng));
    return M;
}

PointConfig point_config_from_json(const nlohmann::json& j, const std::string& ptr) {
    const auto& pts = require(j, "points", ptr);
    if (!pts.is_array()) throw InputError("points must be an array", ptr + "/points");
    PointConfig c;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const std::string pp = ptr + "/points/" + std::to_string(i);
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
            throw InputError("point must be [x, y, z]", pp);
        Eigen::Vector3d v(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        if (!v.allFinite() || v.norm() == 0) throw InputError("point must be a nonzero finite vector", pp);
        c.points.push_back(v.normalized());
    }
    if (j.contains("multiplicities")) {
        const auto& m = j.at("multiplicities");
        if (!m.is_array()) throw InputError("multiplicities must be an array", ptr + "/multiplicities");
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!m[i].is_number_integer())
                throw InputError("multiplicity must be an integer", ptr + "/multiplicities/" + std::to_string(i));
            c.multiplicities.push_back(m[i].get<int>());
        }
    } else {
        c.multiplicities.assign(c.points.size(), 1);
    }
    try {
        c.validate();
    } catch (const InputError& e) {
        throw InputError(e.what(), ptr + e.pointer());
    }
    return c;
}

std::unique_ptr<MomentProblem> problem_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("instance must be a JSON object", "");
    const auto& kind = require(j, "kind", "");
    if (!kind.is_string()) throw InputError("kind must be a string", "/kind");
    const std::string k = kind.get<std::string>();
    if (k == "points") return points_problem(point_config_from_json(j));
    if (k == "hom") return hom_problem(complex_from_json(require(j, "matrix", ""), "/matrix"));
    if (k == "adjoint") return adjoint_problem(complex_from_json(require(j, "matrix", ""), "/matrix"));
    if (k == "hyperbola") {
        const cplx x = complex_scalar(require(j, "x", ""), "/x");
        const cplx y = complex_scalar(require(j, "y", ""), "/y");
        double a = 0;
        if (j.contains("a")) {
            if (!j["a"].is_number()) throw InputError("a must be a number", "/a");
            a = j["a"].get<double>();
        }
        return hyperbola_problem(x, y, a);
    }
    throw InputError("unknown instance kind '" + k + "'", "/kind");
}

nlohmann::json to_json(const PointsVerdict& v) {
    nlohmann::json out{{"class", to_string(v.cls)}};
    out["offending"] = v.offending ? nlohmann::json(*v.offending) : nlohmann::json(nullptr);
    return out;
}

} // namespace stabkit
