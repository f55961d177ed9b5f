#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "secrecy/model.hpp"
#include "secrecy/trajectory_sca.hpp"

namespace secrecy::bcd {

enum class InitStrategy { straight_line, line_baseline };

std::string to_string(InitStrategy s);

struct Initial {
    Trajectory traj;
    PowerProfile power;
    sca::SlackState slack;
};

/// Feasible starting point: trajectory per `strategy`, uniform power at
/// P_avg, tight slacks.
Initial initialize(const ScenarioConfig& cfg, InitStrategy strategy);

struct IterationRecord {
    int iteration = 0;        // 0 is the initial point
    double objective = 0.0;   // sum over slots of R_AB - R_AE, bps/Hz
    double rate_clipped = 0.0;
    double rate_raw = 0.0;
    Trajectory traj;
    PowerProfile power;
    double seconds = 0.0;
};

enum class RunStatus { converged, max_iterations, failed };

std::string to_string(RunStatus s);

struct RunTrace {
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::failed;
    InitStrategy start = InitStrategy::straight_line;
    std::string message;
};

struct RunOptions {
    int max_outer_iterations = 100;
    bool multistart = true;
    // Increases below this many bps/Hz (summed over slots) count as no
    // progress regardless of the relative rule.
    double abs_floor = 1e-7;
};

struct RunResult {
    Trajectory traj;
    PowerProfile power;
    RunTrace trace;                     // of the winning start
    std::vector<RunTrace> start_traces; // one per start that was run
};

/// Raised when a subproblem fails; carries the trace up to the failure.
class RunFailure : public std::runtime_error {
public:
    RunFailure(const std::string& what, RunTrace trace) : std::runtime_error(what), trace_(std::move(trace)) {}
    const RunTrace& trace() const { return trace_; }

private:
    RunTrace trace_;
};

/// Alternates a trajectory update (one SCA step at the current power) and an
/// optimal power update until the fractional objective increase drops below
/// cfg.epsilon. Returns the best iterate; with multistart, the better of the
/// straight-line and line-baseline starts.
RunResult run(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// A single start of `run`.
RunResult run_from(const ScenarioConfig& cfg, InitStrategy strategy, const RunOptions& opts = {});

}  // namespace secrecy::bcd
