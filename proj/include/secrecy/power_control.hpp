#pragma once

#include <vector>

#include "secrecy/model.hpp"

namespace secrecy::power {

/// Per-watt SNR coefficients: a toward Bob, b toward Eve.
struct LinkCoefficients {
    std::vector<double> a;
    std::vector<double> b;
};

/// Multiplier of the average-power constraint, in natural-log rate units per watt.
struct DualVariable {
    double lambda = 0.0;
};

struct PowerSolution {
    PowerProfile power;
    DualVariable dual;
    int bisection_iterations = 0;
};

LinkCoefficients link_coefficients(const Trajectory& traj, const ScenarioConfig& cfg);

/// Closed-form per-slot maximizer of ln(1+aP) - ln(1+bP) - lambda*P over
/// [0, P_peak]. lambda == 0 yields P_peak wherever a > b.
PowerProfile power_at_lambda(const LinkCoefficients& coeffs, DualVariable lam, double p_peak);

/// Optimal powers for a fixed trajectory: bisection on lambda so that the
/// average-power constraint binds whenever it is active.
PowerSolution optimize_power(const LinkCoefficients& coeffs, double p_avg, double p_peak);
PowerSolution optimize_power(const Trajectory& traj, const ScenarioConfig& cfg);

/// Sum over slots of ln(1 + a P) - ln(1 + b P).
double natural_objective(const LinkCoefficients& coeffs, const PowerProfile& power);

}  // namespace secrecy::power
