#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stabkit {

/// What an instance can say about the limit of a flow: whether it left the
/// starting orbit, with a human-readable reason and an optional index set
/// (for example a cluster of colliding points).
struct EscapeReport {
    bool escaped = false;
    std::string detail;
    std::vector<int> witness;
};

/// A point together with a compact group K acting on it. The state is owned
/// by the object; `act` moves it by exp(xi) for xi in k + ik.
class MomentProblem {
public:
    virtual ~MomentProblem() = default;

    virtual std::unique_ptr<MomentProblem> clone() const = 0;
    virtual std::string kind() const = 0;
    virtual int lie_dim() const = 0;

    /// Moment map value in an orthonormal basis of k.
    virtual Eigen::VectorXd moment() const = 0;

    /// xi has 2 * lie_dim coordinates: the k part first, then the ik part.
    /// Moving along the ik part w changes the norm functional at rate <m, w>.
    virtual void act(const Eigen::VectorXd& xi) = 0;

    virtual bool has_norm_functional() const { return false; }
    /// Norm functional at exp(t * i v) . state. The state is not modified.
    virtual double norm_functional(const Eigen::VectorXd& v, double t) const;

    /// Quantities the complexified action leaves invariant.
    virtual std::vector<double> conserved() const { return {}; }

    /// Compares the current state with the starting one.
    virtual EscapeReport escape_report(const MomentProblem& start) const;

    virtual nlohmann::json state_json() const = 0;

    Eigen::VectorXd act_imaginary(const Eigen::VectorXd& w);
};

struct FlowConfig {
    double initial_step = 1.0;
    double backtrack = 0.5;
    double tol = 1e-8;
    int max_iters = 20000;
    /// Bound on the accumulated length of imaginary steps, a proxy for the
    /// log of the group element's size.
    double divergence_threshold = 5.0;
    int stall_window = 20;
    /// Cap on the length of a single imaginary step.
    double max_step = 1.0;

    void validate() const;
};

enum class FlowStatus { Balanced, Escaped, Stalled };

std::string to_string(FlowStatus s);

struct TraceRow {
    int iter = 0;
    double moment_norm = 0;
    double step = 0;
};

struct FlowResult {
    FlowStatus status = FlowStatus::Stalled;
    std::unique_ptr<MomentProblem> final_state;
    std::vector<TraceRow> trace;
    int iterations = 0;
    double final_moment_norm = 0;
    double displacement = 0;
    EscapeReport escape;
    std::string note;
};

/// Steepest descent of |m|^2 along exp(-i eta m).
FlowResult flow_to_zero(const MomentProblem& p, const FlowConfig& cfg = {});

/// | central difference of the norm functional along iv  -  <m, v> |.
double log_norm_check(const MomentProblem& p, const Eigen::VectorXd& v, double h);

} // namespace stabkit
