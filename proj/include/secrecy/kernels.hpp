#pragma once

// Per-slot data-parallel kernels. `serial` is the reference implementation
// kept for testing; `omp` is what the library calls. Both write one value
// per slot and never reduce, so results are identical and independent of
// the thread count.

#include <cstddef>
#include <span>

namespace secrecy::kernels {

struct Geometry {
    double L;
    double H;
    double gamma0;
};

/// Optimal power for one slot at dual value `lambda` (natural-log units).
/// Zero when a <= b; lambda == 0 means the peak power.
double slot_power(double a, double b, double lambda, double p_peak);

namespace serial {

void link_gains(std::span<const double> x, std::span<const double> y, const Geometry& g,
                std::span<double> a, std::span<double> b);

// Rates in bps/Hz.
void slot_rates(std::span<const double> x, std::span<const double> y, std::span<const double> p,
                const Geometry& g, std::span<double> r_ab, std::span<double> r_ae);

void power_at_lambda(std::span<const double> a, std::span<const double> b, double lambda,
                     double p_peak, std::span<double> p);

}  // namespace serial

namespace omp {

void link_gains(std::span<const double> x, std::span<const double> y, const Geometry& g,
                std::span<double> a, std::span<double> b);

void slot_rates(std::span<const double> x, std::span<const double> y, std::span<const double> p,
                const Geometry& g, std::span<double> r_ab, std::span<double> r_ae);

void power_at_lambda(std::span<const double> a, std::span<const double> b, double lambda,
                     double p_peak, std::span<double> p);

}  // namespace omp

}  // namespace secrecy::kernels
