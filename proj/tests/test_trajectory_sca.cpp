#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "secrecy/trajectory_sca.hpp"

using namespace secrecy;
using namespace secrecy::sca;

namespace {

ScenarioConfig defaults(double T = 230.0) {
    ScenarioParams p;
    p.T = T;
    return ScenarioConfig::make(p);
}

}  // namespace

TEST_CASE("expansion point") {
    const auto cfg = defaults(200.0);
    const auto e = make_expansion(straight_line(cfg), cfg);
    REQUIRE(e.u_fea.size() == cfg.N);
    for (double u : e.u_fea) {
        CHECK(std::isfinite(u));
        CHECK(u >= 1e4);
    }
    auto bad = straight_line(cfg);
    bad.y[10] += 5.0;
    CHECK_THROWS_AS(make_expansion(bad, cfg), InfeasibleError);

    ScenarioParams p;
    p.T = 0.5;
    p.v_max = 1e3;
    const auto one = ScenarioConfig::make(p);
    CHECK(make_expansion(Trajectory{{0}, {0}}, one).u_fea[0] == 1e4);
}

TEST_CASE("under-estimator of ln(1 + Pn/u)") {
    CHECK(under_estimator_u(3e4, 3e4, 5e4) == doctest::Approx(std::log1p(5e4 / 3e4)).epsilon(1e-15));
    CHECK(under_estimator_u(7, 3, 0) == 0);
    const double est = under_estimator_u(2e4, 1e4, 3.16e4);
    CHECK(est <= std::log1p(1.58));
    CHECK(std::log1p(1.58) - est > 0);
    CHECK_THROWS_AS(under_estimator_u(0, 1, 1), std::domain_error);
    CHECK_THROWS_AS(under_estimator_u(1, -1, 1), std::domain_error);

    std::mt19937_64 rng(4);
    for (int i = 0; i < 2000; ++i) {
        const double uf = oracle::log_uniform(rng, 1e2, 1e6);
        const double u = oracle::log_uniform(rng, 1e2, 1e6);
        const double Pn = oracle::log_uniform(rng, 1e-2, 1e6);
        const double exact = std::log1p(Pn / u);
        CHECK(under_estimator_u(u, uf, Pn) <= exact + 1e-12 * std::abs(exact));
    }
}

TEST_CASE("over-estimator of -z^2") {
    CHECK(over_estimator_sq(7, 7) == -49);
    CHECK(over_estimator_sq(5, 0) == 0);
    CHECK(over_estimator_sq(150, 100) == -2e4);
    CHECK(over_estimator_sq(150, 100) >= -2.25e4);
}

TEST_CASE("linearized Eve constraint is tight at the expansion point") {
    const auto cfg = defaults();
    const auto traj = straight_line(cfg);
    const auto exp = make_expansion(traj, cfg);
    const auto Pn = ScaledPower::from(PowerProfile::uniform(cfg.N, cfg.P_avg), cfg);
    const auto sp = build_subproblem(exp, Pn, cfg);
    const double s = sp.scale;
    std::vector<double> z(sp.problem.num_vars);
    const auto tight = tight_slacks(traj, cfg);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        z[sp.x_index[n]] = traj.x[n] / s;
        z[sp.y_index[n]] = traj.y[n] / s;
        z[*sp.t_index[n]] = tight.t[n] / (s * s);
        z[*sp.u_index[n]] = tight.u[n] / (s * s);
    }
    // Eve constraint of each slot comes first in its group of three.
    for (std::size_t n = 0; n < cfg.N; ++n) {
        CHECK(std::abs(sp.problem.constraints[3 * n].eval(z)) <= 1e-12);
        CHECK(std::abs(sp.problem.constraints[3 * n + 2].eval(z)) <= 1e-12);
    }
    for (const auto& c : sp.problem.constraints) CHECK(c.eval(sp.problem.start) < 0);
}

TEST_CASE("zero-power slots carry no slack variables") {
    const auto cfg = defaults();
    auto P = PowerProfile::uniform(cfg.N, cfg.P_avg);
    P.P[0] = 0;
    P.P[7] = 0;
    const auto sp = build_subproblem(make_expansion(straight_line(cfg), cfg), ScaledPower::from(P, cfg), cfg);
    CHECK(!sp.t_index[0]);
    CHECK(!sp.u_index[7]);
    CHECK(sp.t_index[1]);
    CHECK(sp.problem.num_vars == 4 * cfg.N - 4);
}

TEST_CASE("one SCA step from the straight line") {
    const auto cfg = defaults();
    const auto traj = straight_line(cfg);
    const auto Pn = ScaledPower::from(PowerProfile::uniform(cfg.N, cfg.P_avg), cfg);
    const auto step = sca_step(make_expansion(traj, cfg), Pn, cfg);
    CHECK(validate(step.traj, cfg).empty());
    CHECK(trajectory_objective(step.traj, Pn, cfg) > trajectory_objective(traj, Pn, cfg));
    const auto tight = tight_slacks(step.traj, cfg);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        CHECK(step.slack.t[n] <= tight.t[n]);
        CHECK(step.slack.u[n] >= tight.u[n]);
        CHECK(step.slack.t[n] > 0);
    }
    CHECK(slack_objective(step.slack, Pn) <= trajectory_objective(step.traj, Pn, cfg) + 1e-12);
    CHECK(step.report.kkt_residual <= 1e-8 * (1 + std::abs(step.report.objective)));
}

TEST_CASE("single slot moves toward Bob and matches the true optimum") {
    ScenarioParams p;
    p.T = 0.5;
    p.v_max = 1e4;
    const auto cfg = ScenarioConfig::make(p);
    const auto Pn = ScaledPower::from(PowerProfile{{cfg.P_avg}}, cfg);
    const Trajectory start{{60.0}, {20.0}};
    const auto step = sca_step(make_expansion(start, cfg), Pn, cfg);
    CHECK(step.traj.x[0] < start.x[0]);
    CHECK(trajectory_objective(step.traj, Pn, cfg) > trajectory_objective(start, Pn, cfg));

    const auto it = sca_iterate(start, Pn, cfg, 200, 1e-7);
    CHECK(it.converged);
    for (std::size_t k = 1; k < it.objectives.size(); ++k) CHECK(it.objectives[k] >= it.objectives[k - 1] - 1e-12);
    const auto f = [&](double x, double y) {
        return trajectory_objective(Trajectory{{x}, {y}}, Pn, cfg);
    };
    const auto best = oracle::zoom_max_2d(f, [](double, double) { return true; }, -400, 400, -400, 400, 1.0, 1e-6);
    CHECK(std::abs(it.traj.x[0] - best.x) < 1e-3);
    CHECK(std::abs(it.traj.y[0] - best.y) < 1e-3);
    CHECK(it.objectives.back() == doctest::Approx(best.value).epsilon(1e-9));
}

TEST_CASE("pinned mobility chain returns the only feasible trajectory") {
    ScenarioParams p;
    p.T = 200;
    p.yF = -201;  // N+1 steps of exactly V
    const auto cfg = ScenarioConfig::make(p);
    std::vector<double> x(cfg.N), y(cfg.N);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        x[n] = 100;
        y[n] = 200 - static_cast<double>(n + 1);
    }
    const Trajectory only{x, y};
    const auto Pn = ScaledPower::from(PowerProfile::uniform(cfg.N, cfg.P_avg), cfg);
    const auto step = sca_step(make_expansion(only, cfg), Pn, cfg);
    CHECK(step.pinned);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        CHECK(std::abs(step.traj.x[n] - x[n]) <= 1e-6);
        CHECK(std::abs(step.traj.y[n] - y[n]) <= 1e-6);
    }
}
