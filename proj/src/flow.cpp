#include "stabkit/flow.hpp"

#include "stabkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace stabkit {

double MomentProblem::norm_functional(const Eigen::VectorXd&, double) const {
    throw UnsupportedOperation(kind() + " does not expose a norm functional");
}

EscapeReport MomentProblem::escape_report(const MomentProblem&) const { return {}; }

Eigen::VectorXd MomentProblem::act_imaginary(const Eigen::VectorXd& w) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(2 * lie_dim());
    xi.tail(lie_dim()) = w;
    act(xi);
    return moment();
}

void FlowConfig::validate() const {
    if (!(initial_step > 0)) throw InputError("initial step must be positive", "/initial_step");
    if (!(backtrack > 0 && backtrack < 1)) throw InputError("backtracking factor must lie in (0,1)", "/backtrack");
    if (!(tol > 0)) throw InputError("tolerance must be positive", "/tol");
    if (max_iters < 1) throw InputError("max_iters must be positive", "/max_iters");
    if (!(divergence_threshold > 0)) throw InputError("divergence threshold must be positive", "/divergence_threshold");
    if (stall_window < 1) throw InputError("stall window must be positive", "/stall_window");
    if (!(max_step > 0)) throw InputError("max step must be positive", "/max_step");
}

std::string to_string(FlowStatus s) {
    switch (s) {
    case FlowStatus::Balanced: return "Balanced";
    case FlowStatus::Escaped: return "Escaped";
    case FlowStatus::Stalled: return "Stalled";
    }
    return "?";
}

namespace {

Eigen::VectorXd checked_moment(const MomentProblem& p) {
    Eigen::VectorXd m = p.moment();
    if (!m.allFinite()) throw NumericalError("non-finite moment value in " + p.kind() + " instance");
    return m;
}

// Slope of |m|^2 along exp(-i eta m) at eta = 0, by a forward difference
// with an imaginary step short against both 1 and |m|.
double descent_slope(const MomentProblem& p, const Eigen::VectorXd& m) {
    const double mn = m.norm();
    const double eps = std::min(1e-6, 1e-3 * mn) / mn;
    auto probe = p.clone();
    const Eigen::VectorXd moved = probe->act_imaginary(-eps * m);
    if (!moved.allFinite()) throw NumericalError("non-finite moment value in " + p.kind() + " instance");
    return (moved.squaredNorm() - m.squaredNorm()) / eps;
}

// |m| stayed above 10 tol and changed by a relative 1e-6 at most over the
// last `window` accepted steps.
bool plateaued(const std::vector<TraceRow>& trace, int window, double tol) {
    const auto w = static_cast<std::size_t>(window);
    if (trace.size() <= w) return false;
    const double then = trace[trace.size() - 1 - w].moment_norm;
    const double now = trace.back().moment_norm;
    double lowest = now;
    for (std::size_t i = trace.size() - 1 - w; i < trace.size(); ++i) lowest = std::min(lowest, trace[i].moment_norm);
    return lowest > 10 * tol && then - now <= 1e-6 * then;
}

} // namespace

FlowResult flow_to_zero(const MomentProblem& p, const FlowConfig& cfg) {
    cfg.validate();
    FlowResult res;
    auto state = p.clone();
    Eigen::VectorXd m = checked_moment(*state);
    double mn = m.norm();
    res.trace.push_back({0, mn, 0.0});

    auto finish = [&](FlowStatus status) {
        res.status = status;
        res.final_moment_norm = mn;
        res.escape = state->escape_report(p);
        res.final_state = std::move(state);
        return std::move(res);
    };

    if (mn <= cfg.tol) return finish(FlowStatus::Balanced);

    constexpr double armijo = 1e-4;
    double eta = cfg.initial_step / (1.0 + mn);
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        res.iterations = iter;
        const double f0 = m.squaredNorm();
        const double slope = descent_slope(*state, m);
        std::unique_ptr<MomentProblem> trial;
        Eigen::VectorXd trial_m;
        double step_len = 0;
        bool accepted = false;
        // With a numerically flat slope the Armijo term vanishes and plain
        // decrease is required.
        const double sufficient = armijo * std::min(slope, 0.0);
        for (int bt = 0; bt < 80; ++bt) {
            eta = std::min(eta, cfg.max_step / mn);
            const Eigen::VectorXd w = -eta * m;
            trial = state->clone();
            trial_m = trial->act_imaginary(w);
            if (!trial_m.allFinite()) throw NumericalError("non-finite moment value in " + p.kind() + " instance");
            const double f1 = trial_m.squaredNorm();
            if (f1 < f0 && f1 <= f0 + eta * sufficient) {
                accepted = true;
                step_len = w.norm();
                break;
            }
            eta *= cfg.backtrack;
        }
        if (!accepted) {
            // A critical point of |m|^2 with m != 0 certifies instability.
            // Criticality is measured as d log|m| per unit imaginary step.
            if (mn > 10 * cfg.tol && std::abs(slope) <= 2e-6 * f0 * mn) {
                res.note = "critical point of |m|^2 away from zero";
                return finish(FlowStatus::Escaped);
            }
            if (res.displacement > cfg.divergence_threshold && plateaued(res.trace, cfg.stall_window, cfg.tol)) {
                res.note = "moment bounded away from zero while the orbit diverges";
                return finish(FlowStatus::Escaped);
            }
            res.note = "line search failed";
            return finish(FlowStatus::Stalled);
        }
        const double accepted_eta = eta;
        state = std::move(trial);
        m = std::move(trial_m);
        mn = m.norm();
        res.displacement += step_len;
        res.trace.push_back({iter, mn, step_len});
        if (mn <= cfg.tol) return finish(FlowStatus::Balanced);
        eta = 2.0 * accepted_eta;

        if (res.displacement > cfg.divergence_threshold && plateaued(res.trace, cfg.stall_window, cfg.tol)) {
            res.note = "moment bounded away from zero while the orbit diverges";
            return finish(FlowStatus::Escaped);
        }
    }
    res.note = "iteration limit reached";
    return finish(FlowStatus::Stalled);
}

double log_norm_check(const MomentProblem& p, const Eigen::VectorXd& v, double h) {
    if (!p.has_norm_functional()) throw UnsupportedOperation(p.kind() + " does not expose a norm functional");
    if (v.size() != p.lie_dim()) throw InputError("direction has wrong dimension");
    if (v.norm() == 0) return 0.0;
    const double fd = (p.norm_functional(v, h) - p.norm_functional(v, -h)) / (2 * h);
    return std::abs(fd - p.moment().dot(v));
}

} // namespace stabkit
