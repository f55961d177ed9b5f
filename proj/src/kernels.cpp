#include "secrecy/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secrecy::kernels {

namespace {

// Below this many slots the thread team costs more than it saves.
constexpr std::ptrdiff_t kParallelMin = 256;

inline double bob_gain(double x, double y, const Geometry& g) {
    return g.gamma0 / (x * x + y * y + g.H * g.H);
}

inline double eve_gain(double x, double y, const Geometry& g) {
    const double dx = x - g.L;
    return g.gamma0 / (dx * dx + y * y + g.H * g.H);
}

}  // namespace

double slot_power(double a, double b, double lambda, double p_peak) {
    if (a <= b) return 0.0;
    if (lambda <= 0.0) return p_peak;
    // sqrt(A^2 + B/lambda) - C with A = (1/b - 1/a)/2, C = (1/b + 1/a)/2.
    // Since A^2 - C^2 = -1/(ab) the difference is rewritten without
    // cancellation.
    const double inv_a = 1.0 / a;
    const double inv_b = 1.0 / b;
    const double A = 0.5 * (inv_b - inv_a);
    const double C = 0.5 * (inv_b + inv_a);
    const double B = (inv_b - inv_a) / lambda;
    const double num = B - inv_a * inv_b;
    const double den = std::sqrt(A * A + B) + C;
    const double p_hat = num / den;
    return std::min(std::max(p_hat, 0.0), p_peak);
}

namespace serial {

void link_gains(std::span<const double> x, std::span<const double> y, const Geometry& g,
                std::span<double> a, std::span<double> b) {
    for (std::size_t n = 0; n < x.size(); ++n) {
        a[n] = bob_gain(x[n], y[n], g);
        b[n] = eve_gain(x[n], y[n], g);
    }
}

void slot_rates(std::span<const double> x, std::span<const double> y, std::span<const double> p,
                const Geometry& g, std::span<double> r_ab, std::span<double> r_ae) {
    for (std::size_t n = 0; n < x.size(); ++n) {
        r_ab[n] = std::log2(1.0 + p[n] * bob_gain(x[n], y[n], g));
        r_ae[n] = std::log2(1.0 + p[n] * eve_gain(x[n], y[n], g));
    }
}

void power_at_lambda(std::span<const double> a, std::span<const double> b, double lambda,
                     double p_peak, std::span<double> p) {
    for (std::size_t n = 0; n < a.size(); ++n) p[n] = slot_power(a[n], b[n], lambda, p_peak);
}

}  // namespace serial

namespace omp {

void link_gains(std::span<const double> x, std::span<const double> y, const Geometry& g,
                std::span<double> a, std::span<double> b) {
    const auto n_slots = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n_slots >= kParallelMin)
    for (std::ptrdiff_t n = 0; n < n_slots; ++n) {
        a[n] = bob_gain(x[n], y[n], g);
        b[n] = eve_gain(x[n], y[n], g);
    }
}

void slot_rates(std::span<const double> x, std::span<const double> y, std::span<const double> p,
                const Geometry& g, std::span<double> r_ab, std::span<double> r_ae) {
    const auto n_slots = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n_slots >= kParallelMin)
    for (std::ptrdiff_t n = 0; n < n_slots; ++n) {
        r_ab[n] = std::log2(1.0 + p[n] * bob_gain(x[n], y[n], g));
        r_ae[n] = std::log2(1.0 + p[n] * eve_gain(x[n], y[n], g));
    }
}

void power_at_lambda(std::span<const double> a, std::span<const double> b, double lambda,
                     double p_peak, std::span<double> p) {
    const auto n_slots = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static) if (n_slots >= kParallelMin)
    for (std::ptrdiff_t n = 0; n < n_slots; ++n) p[n] = slot_power(a[n], b[n], lambda, p_peak);
}

}  // namespace omp

}  // namespace secrecy::kernels
