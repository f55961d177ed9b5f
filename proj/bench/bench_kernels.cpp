// Serial vs OpenMP per-slot kernels on synthetic trajectories.
//   bench_kernels [slots] [repeats]

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "secrecy/kernels.hpp"

namespace k = secrecy::kernels;

static double best_of(int repeats, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1u << 20;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;
    const k::Geometry g{200.0, 100.0, 1e8};

    std::vector<double> x(n), y(n), p(n), a(n), b(n), r1(n), r2(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        x[i] = 100.0 - 120.0 * std::sin(3.14159 * s);
        y[i] = 200.0 - 400.0 * s;
        p[i] = 3.16e-4 * (1.0 + 0.5 * std::cos(7.0 * s));
    }
    k::serial::link_gains(x, y, g, a, b);

    std::printf("slots %zu, threads %d, best of %d\n", n, omp_get_max_threads(), repeats);
    std::printf("%-16s %12s %12s %8s\n", "kernel", "serial_s", "omp_s", "speedup");

    auto row = [&](const char* name, const std::function<void()>& s, const std::function<void()>& o) {
        const double ts = best_of(repeats, s);
        const double to = best_of(repeats, o);
        std::printf("%-16s %12.6f %12.6f %8.2f\n", name, ts, to, ts / to);
    };
    row("link_gains", [&] { k::serial::link_gains(x, y, g, r1, r2); }, [&] { k::omp::link_gains(x, y, g, r1, r2); });
    row("slot_rates", [&] { k::serial::slot_rates(x, y, p, g, r1, r2); },
        [&] { k::omp::slot_rates(x, y, p, g, r1, r2); });
    row("power_at_lambda", [&] { k::serial::power_at_lambda(a, b, 1e3, 1.26e-3, out); },
        [&] { k::omp::power_at_lambda(a, b, 1e3, 1.26e-3, out); });
    return 0;
}
