#include "secrecy/power_control.hpp"

#include <cmath>
#include <stdexcept>

#include "secrecy/kernels.hpp"

namespace secrecy::power {

namespace {

constexpr int kMaxBisection = 200;

double mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

}  // namespace

LinkCoefficients link_coefficients(const Trajectory& traj, const ScenarioConfig& cfg) {
    check_length(traj.y.size(), traj.size(), "trajectory y");
    LinkCoefficients c{std::vector<double>(traj.size()), std::vector<double>(traj.size())};
    kernels::omp::link_gains(traj.x, traj.y, {cfg.L, cfg.H, cfg.gamma0}, c.a, c.b);
    return c;
}

PowerProfile power_at_lambda(const LinkCoefficients& coeffs, DualVariable lam, double p_peak) {
    if (lam.lambda < 0.0 || std::isnan(lam.lambda)) throw std::domain_error("lambda must be nonnegative");
    check_length(coeffs.b.size(), coeffs.a.size(), "coefficient b");
    PowerProfile out{std::vector<double>(coeffs.a.size())};
    kernels::omp::power_at_lambda(coeffs.a, coeffs.b, lam.lambda, p_peak, out.P);
    return out;
}

PowerSolution optimize_power(const LinkCoefficients& coeffs, double p_avg, double p_peak) {
    PowerSolution sol;
    sol.power = power_at_lambda(coeffs, {0.0}, p_peak);
    if (mean(sol.power.P) <= p_avg) return sol;

    // Mean power is continuous and non-increasing in lambda.
    double lo = 0.0;
    double hi = 1e-6;
    PowerProfile at_hi = power_at_lambda(coeffs, {hi}, p_peak);
    int iters = 0;
    while (mean(at_hi.P) >= p_avg && iters < kMaxBisection) {
        lo = hi;
        hi *= 2.0;
        at_hi = power_at_lambda(coeffs, {hi}, p_peak);
        ++iters;
    }
    while (iters < kMaxBisection) {
        const double residual = p_avg - mean(at_hi.P);
        if (residual <= 1e-9 * p_avg) break;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
        const double mid = 0.5 * (lo + hi);
        auto at_mid = power_at_lambda(coeffs, {mid}, p_peak);
        if (mean(at_mid.P) > p_avg) {
            lo = mid;
        } else {
            hi = mid;
            at_hi = std::move(at_mid);
        }
        ++iters;
    }
    sol.power = std::move(at_hi);
    sol.dual.lambda = hi;
    sol.bisection_iterations = iters;
    return sol;
}

PowerSolution optimize_power(const Trajectory& traj, const ScenarioConfig& cfg) {
    check_length(traj.size(), cfg.N, "trajectory");
    return optimize_power(link_coefficients(traj, cfg), cfg.P_avg, cfg.P_peak);
}

double natural_objective(const LinkCoefficients& coeffs, const PowerProfile& power) {
    check_length(power.size(), coeffs.a.size(), "power profile");
    double sum = 0.0;
    for (std::size_t n = 0; n < power.size(); ++n) {
        sum += std::log1p(coeffs.a[n] * power.P[n]) - std::log1p(coeffs.b[n] * power.P[n]);
    }
    return sum;
}

}  // namespace secrecy::power
