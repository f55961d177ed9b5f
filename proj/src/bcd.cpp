#include "secrecy/bcd.hpp"

#include <chrono>
#include <cmath>

#include "secrecy/baselines.hpp"
#include "secrecy/power_control.hpp"

namespace secrecy::bcd {

std::string to_string(InitStrategy s) {
    return s == InitStrategy::straight_line ? "straight-line" : "line-baseline";
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::converged: return "converged";
        case RunStatus::max_iterations: return "max_iterations";
        case RunStatus::failed: return "failed";
    }
    return "unknown";
}

Initial initialize(const ScenarioConfig& cfg, InitStrategy strategy) {
    Initial init;
    init.traj = strategy == InitStrategy::straight_line ? straight_line(cfg) : baselines::line_trajectory(cfg);
    init.power = PowerProfile::uniform(cfg.N, cfg.P_avg);
    init.slack = sca::tight_slacks(init.traj, cfg);
    return init;
}

namespace {

IterationRecord record(int k, const Trajectory& traj, const PowerProfile& power, const ScenarioConfig& cfg,
                       double seconds) {
    IterationRecord r;
    r.iteration = k;
    r.objective = secrecy_objective(traj, power, cfg);
    r.rate_clipped = average_secrecy_rate(traj, power, cfg, true);
    r.rate_raw = r.objective / static_cast<double>(cfg.N);
    r.traj = traj;
    r.power = power;
    r.seconds = seconds;
    return r;
}

}  // namespace

RunResult run_from(const ScenarioConfig& cfg, InitStrategy strategy, const RunOptions& opts) {
    using clock = std::chrono::steady_clock;
    RunResult result;
    RunTrace& trace = result.trace;
    trace.start = strategy;

    auto t0 = clock::now();
    auto init = initialize(cfg, strategy);
    Trajectory traj = init.traj;
    PowerProfile power = init.power;
    trace.records.push_back(record(0, traj, power, cfg, std::chrono::duration<double>(clock::now() - t0).count()));
    std::size_t best = 0;
    double prev = trace.records.back().objective;
    trace.status = RunStatus::max_iterations;

    for (int k = 1; k <= opts.max_outer_iterations; ++k) {
        t0 = clock::now();
        try {
            auto step = sca::sca_step(sca::make_expansion(traj, cfg), sca::ScaledPower::from(power, cfg), cfg);
            traj = std::move(step.traj);
        } catch (const std::exception& e) {
            trace.status = RunStatus::failed;
            trace.message = std::string("iteration ") + std::to_string(k) + ": " + e.what();
            throw RunFailure(trace.message, trace);
        }
        power = power::optimize_power(traj, cfg).power;
        trace.records.push_back(record(k, traj, power, cfg, std::chrono::duration<double>(clock::now() - t0).count()));
        const double obj = trace.records.back().objective;
        if (obj >= trace.records[best].objective) best = trace.records.size() - 1;
        if (obj - prev <= cfg.epsilon * std::abs(prev) + opts.abs_floor) {
            trace.status = RunStatus::converged;
            break;
        }
        prev = obj;
    }
    if (trace.status == RunStatus::max_iterations) {
        trace.message = "iteration budget reached before the fractional-increase rule";
    }
    result.traj = trace.records[best].traj;
    result.power = trace.records[best].power;
    result.start_traces.push_back(trace);
    return result;
}

RunResult run(const ScenarioConfig& cfg, const RunOptions& opts) {
    auto first = run_from(cfg, InitStrategy::straight_line, opts);
    if (!opts.multistart) return first;
    auto second = run_from(cfg, InitStrategy::line_baseline, opts);
    auto best_obj = [](const RunResult& r) {
        double b = r.trace.records.front().objective;
        for (const auto& rec : r.trace.records) b = std::max(b, rec.objective);
        return b;
    };
    RunResult out = best_obj(second) > best_obj(first) ? second : first;
    out.start_traces = {first.trace, second.trace};
    return out;
}

}  // namespace secrecy::bcd
