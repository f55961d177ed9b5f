#include "secrecy/trajectory_sca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace secrecy::sca {

using solver::AffineExpr;
using solver::Constraint;

namespace {

// Weight of the strictly feasible reference trajectory in the solver start point.
constexpr double kStartBlend = 0.5;
constexpr double kStartSlackRel = 1e-3;
constexpr double kTinyObjective = 1e-3;

double chain_length(const ScenarioConfig& cfg) { return std::hypot(cfg.xF - cfg.x0, cfg.yF - cfg.y0); }

// N waypoints splitting the segment into N+1 equal steps. Strictly inside
// every mobility ball whenever the chain is not pinned.
Trajectory equal_step_line(const ScenarioConfig& cfg) {
    Trajectory traj{std::vector<double>(cfg.N), std::vector<double>(cfg.N)};
    const double segs = static_cast<double>(cfg.N + 1);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        const double f = static_cast<double>(n + 1) / segs;
        traj.x[n] = cfg.x0 + f * (cfg.xF - cfg.x0);
        traj.y[n] = cfg.y0 + f * (cfg.yF - cfg.y0);
    }
    return traj;
}

bool mobility_pinned(const ScenarioConfig& cfg) {
    return chain_length(cfg) >= static_cast<double>(cfg.N + 1) * cfg.V * (1.0 - 1e-12);
}

Constraint ball(std::optional<std::size_t> ax, std::optional<std::size_t> ay, double ax0, double ay0,
                std::optional<std::size_t> bx, std::optional<std::size_t> by, double bx0, double by0,
                double radius) {
    // (b - a)^2 <= radius^2, with fixed endpoints given by constants
    auto diff = [](std::optional<std::size_t> a, double a0, std::optional<std::size_t> b, double b0) {
        AffineExpr e;
        if (b) e.terms.push_back({*b, 1.0}); else e.constant += b0;
        if (a) e.terms.push_back({*a, -1.0}); else e.constant -= a0;
        return e;
    };
    Constraint c;
    c.squares.push_back(diff(ax, ax0, bx, bx0));
    c.squares.push_back(diff(ay, ay0, by, by0));
    c.linear.constant = -radius * radius;
    return c;
}

}  // namespace

ScaledPower ScaledPower::from(const PowerProfile& power, const ScenarioConfig& cfg) {
    ScaledPower s{std::vector<double>(power.size())};
    for (std::size_t n = 0; n < power.size(); ++n) {
        if (power.P[n] < 0.0) throw std::domain_error("transmit power must be nonnegative");
        s.Pn[n] = cfg.gamma0 * power.P[n];
    }
    return s;
}

ExpansionPoint make_expansion(const Trajectory& traj, const ScenarioConfig& cfg) {
    const auto violations = validate(traj, cfg);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw InfeasibleError("expansion trajectory violates " + to_string(v.kind) + " at slot " +
                              std::to_string(v.slot) + " by " + std::to_string(v.magnitude));
    }
    ExpansionPoint e{traj.x, traj.y, std::vector<double>(cfg.N)};
    const double h2 = cfg.H * cfg.H;
    for (std::size_t n = 0; n < cfg.N; ++n) e.u_fea[n] = traj.x[n] * traj.x[n] + traj.y[n] * traj.y[n] + h2;
    return e;
}

double under_estimator_u(double u, double u_fea, double Pn) {
    if (!(u > 0.0) || !(u_fea > 0.0)) throw std::domain_error("squared distances must be positive");
    return std::log1p(Pn / u_fea) - Pn * (u - u_fea) / (u_fea * u_fea + Pn * u_fea);
}

double over_estimator_sq(double z, double z_fea) { return z_fea * z_fea - 2.0 * z_fea * z; }

SlackState tight_slacks(const Trajectory& traj, const ScenarioConfig& cfg) {
    SlackState s{std::vector<double>(traj.size()), std::vector<double>(traj.size())};
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const auto d = squared_distances(traj, n, cfg);
        s.t[n] = d.eve;
        s.u[n] = d.bob;
    }
    return s;
}

Subproblem build_subproblem(const ExpansionPoint& exp, const ScaledPower& Pn, const ScenarioConfig& cfg) {
    const std::size_t N = cfg.N;
    check_length(exp.x_fea.size(), N, "expansion x");
    check_length(exp.y_fea.size(), N, "expansion y");
    check_length(exp.u_fea.size(), N, "expansion u");
    check_length(Pn.Pn.size(), N, "scaled power");

    Subproblem sp;
    const double s = cfg.H;
    const double s2 = s * s;
    sp.scale = s;
    const double L = cfg.L / s;
    const double H2 = (cfg.H / s) * (cfg.H / s);
    const double V = cfg.V / s;

    sp.x_index.resize(N);
    sp.y_index.resize(N);
    sp.t_index.assign(N, std::nullopt);
    sp.u_index.assign(N, std::nullopt);
    std::size_t next = 0;
    for (std::size_t n = 0; n < N; ++n) {
        sp.x_index[n] = next++;
        sp.y_index[n] = next++;
        if (Pn.Pn[n] > 0.0) {
            sp.t_index[n] = next++;
            sp.u_index[n] = next++;
        }
    }
    auto& prob = sp.problem;
    prob.num_vars = next;
    prob.linear_objective.assign(next, 0.0);

    // Objective weight lifting tiny power budgets to unit scale, so the
    // absolute KKT tolerance of the solver stays meaningful. The maximizer
    // is unchanged; ordinary budgets keep weight 1.
    double largest = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        if (!sp.t_index[n]) continue;
        const double p = Pn.Pn[n];
        const double uf = exp.u_fea[n];
        largest = std::max(largest, p / (uf * uf + p * uf) * s2);
    }
    sp.objective_weight = largest > 0.0 && largest < kTinyObjective ? 1.0 / largest : 1.0;
    const double w = sp.objective_weight;

    for (std::size_t n = 0; n < N; ++n) {
        if (!sp.t_index[n]) continue;
        const double p = Pn.Pn[n];
        const double uf = exp.u_fea[n];
        const std::size_t ti = *sp.t_index[n];
        const std::size_t ui = *sp.u_index[n];
        prob.linear_objective[ui] = -w * p / (uf * uf + p * uf) * s2;
        prob.log_terms.push_back({ti, p / s2, w});

        const double xf = exp.x_fea[n] / s;
        const double yf = exp.y_fea[n] / s;
        // linearized Eve distance: t - [(x-L)^2 + y^2 + H^2]_lin <= 0
        Constraint eve;
        eve.linear.terms = {{ti, 1.0}, {sp.x_index[n], 2.0 * L - 2.0 * xf}, {sp.y_index[n], -2.0 * yf}};
        eve.linear.constant = xf * xf - L * L + yf * yf - H2;
        prob.constraints.push_back(std::move(eve));

        Constraint t_pos;
        t_pos.linear.terms = {{ti, -1.0}};
        prob.constraints.push_back(std::move(t_pos));

        Constraint bob;
        bob.squares.push_back({{{sp.x_index[n], 1.0}}, 0.0});
        bob.squares.push_back({{{sp.y_index[n], 1.0}}, 0.0});
        bob.linear.terms = {{ui, -1.0}};
        bob.linear.constant = H2;
        prob.constraints.push_back(std::move(bob));
    }

    const double x0 = cfg.x0 / s, y0 = cfg.y0 / s, xF = cfg.xF / s, yF = cfg.yF / s;
    prob.constraints.push_back(ball(std::nullopt, std::nullopt, x0, y0, sp.x_index[0], sp.y_index[0], 0, 0, V));
    for (std::size_t n = 1; n < N; ++n) {
        prob.constraints.push_back(
            ball(sp.x_index[n - 1], sp.y_index[n - 1], 0, 0, sp.x_index[n], sp.y_index[n], 0, 0, V));
    }
    prob.constraints.push_back(
        ball(sp.x_index[N - 1], sp.y_index[N - 1], 0, 0, std::nullopt, std::nullopt, xF, yF, V));

    // Start: the expansion point pulled slightly toward the equal-step line,
    // which is strictly inside the mobility set, with slacks just off tight.
    prob.start.assign(next, 0.0);
    if (!mobility_pinned(cfg)) {
        const auto ref = equal_step_line(cfg);
        for (std::size_t n = 0; n < N; ++n) {
            const double x = ((1.0 - kStartBlend) * exp.x_fea[n] + kStartBlend * ref.x[n]) / s;
            const double y = ((1.0 - kStartBlend) * exp.y_fea[n] + kStartBlend * ref.y[n]) / s;
            prob.start[sp.x_index[n]] = x;
            prob.start[sp.y_index[n]] = y;
            if (!sp.t_index[n]) continue;
            const double xf = exp.x_fea[n] / s;
            const double yf = exp.y_fea[n] / s;
            const double lin = -(xf * xf - 2.0 * xf * x + 2.0 * L * x - L * L + yf * yf - 2.0 * yf * y - H2);
            if (!(lin > 0.0)) throw InfeasibleError("linearized Eve distance is not positive at the start point");
            prob.start[*sp.t_index[n]] = lin * (1.0 - kStartSlackRel);
            prob.start[*sp.u_index[n]] = (x * x + y * y + H2) * (1.0 + kStartSlackRel);
        }
    }
    return sp;
}

double slack_objective(const SlackState& slack, const ScaledPower& Pn) {
    double v = 0.0;
    for (std::size_t n = 0; n < Pn.Pn.size(); ++n) {
        if (Pn.Pn[n] == 0.0) continue;
        v += std::log1p(Pn.Pn[n] / slack.u[n]) - std::log1p(Pn.Pn[n] / slack.t[n]);
    }
    return v;
}

double trajectory_objective(const Trajectory& traj, const ScaledPower& Pn, const ScenarioConfig& cfg) {
    return slack_objective(tight_slacks(traj, cfg), Pn);
}

StepResult sca_step(const ExpansionPoint& exp, const ScaledPower& Pn, const ScenarioConfig& cfg,
                    const solver::SolverOptions& opts) {
    StepResult out;
    if (mobility_pinned(cfg)) {
        out.traj = equal_step_line(cfg);
        out.slack = tight_slacks(out.traj, cfg);
        out.pinned = true;
        out.report.status = solver::SolveStatus::converged;
        out.report.message = "feasible set is a single trajectory";
        return out;
    }
    auto sp = build_subproblem(exp, Pn, cfg);
    out.report = solver::solve(sp.problem, opts);
    if (out.report.status != solver::SolveStatus::converged) {
        throw SolverFailure("trajectory subproblem failed: " + out.report.message + " (stages " +
                                std::to_string(out.report.barrier_stages) + ", Newton steps " +
                                std::to_string(out.report.newton_iterations) + ")",
                            out.report);
    }
    const auto& z = out.report.solution;
    const double s = sp.scale;
    const double s2 = s * s;
    out.traj.x.resize(cfg.N);
    out.traj.y.resize(cfg.N);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        out.traj.x[n] = z[sp.x_index[n]] * s;
        out.traj.y[n] = z[sp.y_index[n]] * s;
    }
    out.slack = tight_slacks(out.traj, cfg);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        if (!sp.t_index[n]) continue;
        // The solver keeps t below the linearized distance, which is itself
        // below the true one; u stays above the true Bob distance.
        out.slack.t[n] = std::min(z[*sp.t_index[n]] * s2, out.slack.t[n]);
        out.slack.u[n] = std::max(z[*sp.u_index[n]] * s2, out.slack.u[n]);
    }
    return out;
}

IterateResult sca_iterate(const Trajectory& init, const ScaledPower& Pn, const ScenarioConfig& cfg,
                          int max_iters, double move_tol) {
    IterateResult out;
    out.traj = init;
    out.slack = tight_slacks(init, cfg);
    out.objectives.push_back(trajectory_objective(init, Pn, cfg));
    for (int k = 0; k < max_iters; ++k) {
        auto step = sca_step(make_expansion(out.traj, cfg), Pn, cfg);
        double move = 0.0;
        for (std::size_t n = 0; n < cfg.N; ++n) {
            move = std::max(move, std::hypot(step.traj.x[n] - out.traj.x[n], step.traj.y[n] - out.traj.y[n]));
        }
        out.traj = std::move(step.traj);
        out.slack = std::move(step.slack);
        out.objectives.push_back(trajectory_objective(out.traj, Pn, cfg));
        ++out.iterations;
        if (move < move_tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace secrecy::sca
