#include "secrecy/baselines.hpp"

#include <cmath>

#include "secrecy/power_control.hpp"
#include "secrecy/trajectory_sca.hpp"

namespace secrecy::baselines {

namespace {

constexpr double kReachSlack = 1e-9;

struct Point {
    double x;
    double y;
};

Point step_toward(Point from, Point to, double max_len) {
    const double d = std::hypot(to.x - from.x, to.y - from.y);
    if (d <= max_len) return to;
    const double f = max_len / d;
    return {from.x + f * (to.x - from.x), from.y + f * (to.y - from.y)};
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct LinePlan {
    Trajectory traj;
    long turn_slot = -1;
    long hover_first = -1;
    long hover_last = -1;
};

LinePlan plan_line(const ScenarioConfig& cfg) {
    const Point bob{0.0, 0.0};
    const Point fin{cfg.xF, cfg.yF};
    Point p{cfg.x0, cfg.y0};
    if (dist(p, fin) > static_cast<double>(cfg.N) * cfg.V * (1.0 + 1e-12)) {
        throw ConfigError("final location unreachable within T");
    }
    LinePlan plan;
    plan.traj.x.resize(cfg.N);
    plan.traj.y.resize(cfg.N);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        const double remaining = static_cast<double>(cfg.N - n - 1) * cfg.V;
        Point q = step_toward(p, bob, cfg.V);
        if (plan.turn_slot < 0 && dist(q, fin) <= remaining + kReachSlack) {
            if (q.x == bob.x && q.y == bob.y) {
                if (plan.hover_first < 0) plan.hover_first = static_cast<long>(n);
                plan.hover_last = static_cast<long>(n);
            }
        } else {
            if (plan.turn_slot < 0) plan.turn_slot = static_cast<long>(n);
            q = step_toward(p, fin, cfg.V);
        }
        plan.traj.x[n] = q.x;
        plan.traj.y[n] = q.y;
        p = q;
    }
    return plan;
}

}  // namespace

Trajectory line_trajectory(const ScenarioConfig& cfg) { return plan_line(cfg).traj; }

BaselineResult line_with_pc(const ScenarioConfig& cfg) {
    auto plan = plan_line(cfg);
    BaselineResult r;
    r.scheme = kLineWithPc;
    r.power = power::optimize_power(plan.traj, cfg).power;
    r.traj = std::move(plan.traj);
    r.rate_clipped = average_secrecy_rate(r.traj, r.power, cfg, true);
    r.rate_raw = average_secrecy_rate(r.traj, r.power, cfg, false);
    r.turn_slot = plan.turn_slot;
    r.hover_first = plan.hover_first;
    r.hover_last = plan.hover_last;
    return r;
}

BaselineResult to_without_pc(const ScenarioConfig& cfg) {
    BaselineResult r;
    r.scheme = kToWithoutPc;
    r.power = PowerProfile::uniform(cfg.N, cfg.P_avg);
    auto it = sca::sca_iterate(straight_line(cfg), sca::ScaledPower::from(r.power, cfg), cfg);
    r.traj = std::move(it.traj);
    r.iterations = it.iterations;
    r.rate_clipped = average_secrecy_rate(r.traj, r.power, cfg, true);
    r.rate_raw = average_secrecy_rate(r.traj, r.power, cfg, false);
    return r;
}

}  // namespace secrecy::baselines
