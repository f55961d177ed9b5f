#pragma once

#include <string>

#include "secrecy/model.hpp"

namespace secrecy::baselines {

inline constexpr const char* kToWithoutPc = "TO-wo-PC";
inline constexpr const char* kLineWithPc = "line-w-PC";

struct BaselineResult {
    std::string scheme;
    Trajectory traj;
    PowerProfile power;
    double rate_clipped = 0.0;
    double rate_raw = 0.0;
    int iterations = 0;       // SCA steps for TO-wo-PC; 0 for line-w-PC
    long turn_slot = -1;      // line-w-PC: first slot heading to the final location
    long hover_first = -1;    // line-w-PC: hover slots above Bob, inclusive range
    long hover_last = -1;
};

/// Uniform power P_avg; trajectory from repeated SCA steps starting at the
/// straight line, until waypoints move less than 1e-3 m or 30 steps.
BaselineResult to_without_pc(const ScenarioConfig& cfg);

/// Fly toward the point above Bob at full speed, hold there, and leave for
/// the final location at the last slot from which it is still reachable.
Trajectory line_trajectory(const ScenarioConfig& cfg);

/// line_trajectory with optimal power control.
BaselineResult line_with_pc(const ScenarioConfig& cfg);

}  // namespace secrecy::baselines
