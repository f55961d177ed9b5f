#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "secrecy/convex_solver.hpp"
#include "secrecy/model.hpp"

namespace secrecy::sca {

// A trajectory or expansion point that breaks the mobility constraints.
class InfeasibleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The convex subproblem solver did not certify a solution.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, solver::SolverReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const solver::SolverReport& report() const { return report_; }

private:
    solver::SolverReport report_;
};

/// Slack variables in m^2: t stands in for the squared distance to Eve
/// (t <= d_AE^2), u for the squared distance to Bob (u >= d_AB^2).
struct SlackState {
    std::vector<double> t;
    std::vector<double> u;
};

struct ExpansionPoint {
    std::vector<double> x_fea;
    std::vector<double> y_fea;
    std::vector<double> u_fea;
};

/// gamma0 * P[n], the SNR numerator in m^2.
struct ScaledPower {
    std::vector<double> Pn;

    static ScaledPower from(const PowerProfile& power, const ScenarioConfig& cfg);
};

ExpansionPoint make_expansion(const Trajectory& traj, const ScenarioConfig& cfg);

/// First-order expansion of ln(1 + Pn/u) at u_fea; never above the true value.
double under_estimator_u(double u, double u_fea, double Pn);

/// First-order expansion of -z^2 at z_fea; never below -z^2.
double over_estimator_sq(double z, double z_fea);

/// Tight slacks for a trajectory.
SlackState tight_slacks(const Trajectory& traj, const ScenarioConfig& cfg);

/// Convex surrogate of the trajectory subproblem, in variables scaled by a
/// reference length so that positions and squared distances are O(1).
/// Slots with zero power carry only (x, y); their slacks are made tight
/// after the solve.
struct Subproblem {
    solver::ConvexProblem problem;
    double scale = 1.0;                       // meters per unit
    double objective_weight = 1.0;            // problem objective = weight * surrogate
    std::vector<std::size_t> x_index;
    std::vector<std::size_t> y_index;
    std::vector<std::optional<std::size_t>> t_index;
    std::vector<std::optional<std::size_t>> u_index;
};

Subproblem build_subproblem(const ExpansionPoint& exp, const ScaledPower& Pn, const ScenarioConfig& cfg);

/// Objective of the slack reformulation: sum ln(1+Pn/u) - ln(1+Pn/t) (nats).
double slack_objective(const SlackState& slack, const ScaledPower& Pn);

/// Exact trajectory objective for fixed power: sum ln(1+Pn/d_AB^2) - ln(1+Pn/d_AE^2) (nats).
double trajectory_objective(const Trajectory& traj, const ScaledPower& Pn, const ScenarioConfig& cfg);

struct StepResult {
    Trajectory traj;
    SlackState slack;
    solver::SolverReport report;
    bool pinned = false;  // feasible set was a single trajectory; no solve
};

/// One successive-convex-approximation update around `exp`.
StepResult sca_step(const ExpansionPoint& exp, const ScaledPower& Pn, const ScenarioConfig& cfg,
                    const solver::SolverOptions& opts = {});

struct IterateResult {
    Trajectory traj;
    SlackState slack;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objectives;  // trajectory_objective after each step, starting with the input
};

/// Repeats sca_step with fixed power until the largest waypoint move is
/// below `move_tol` meters or `max_iters` steps were taken.
IterateResult sca_iterate(const Trajectory& init, const ScaledPower& Pn, const ScenarioConfig& cfg,
                          int max_iters = 30, double move_tol = 1e-3);

}  // namespace secrecy::sca
