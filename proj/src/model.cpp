#include "secrecy/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "secrecy/kernels.hpp"

namespace secrecy {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool rel_close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

kernels::Geometry geometry(const ScenarioConfig& cfg) { return {cfg.L, cfg.H, cfg.gamma0}; }

}  // namespace

ScenarioConfig ScenarioConfig::make(const ScenarioParams& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(p.L) && finite(p.x0) && finite(p.y0) && finite(p.xF) && finite(p.yF),
            "geometry fields must be finite");
    require(finite(p.H) && p.H > 0, "H must be positive");
    require(finite(p.T) && p.T > 0, "T must be positive");
    require(finite(p.dt) && p.dt > 0, "dt must be positive");
    require(finite(p.v_max) && p.v_max > 0, "v_max must be positive");
    require(finite(p.gamma0) && p.gamma0 > 0, "gamma0 must be positive");
    require(finite(p.epsilon) && p.epsilon > 0, "epsilon must be positive");

    ScenarioConfig cfg;
    cfg.L = p.L;
    cfg.H = p.H;
    cfg.x0 = p.x0;
    cfg.y0 = p.y0;
    cfg.xF = p.xF;
    cfg.yF = p.yF;
    cfg.T = p.T;
    cfg.dt = p.dt;
    const double slots = std::round(p.T / p.dt);
    require(slots >= 1, "T must span at least one slot of length dt");
    require(std::abs(p.T - slots * p.dt) <= 1e-9 * p.T, "T must be an integer multiple of dt");
    cfg.N = static_cast<std::size_t>(slots);
    cfg.v_max = p.v_max;
    cfg.V = p.v_max * p.dt;
    cfg.P_avg = p.P_avg;
    cfg.P_peak = p.P_peak.value_or(4.0 * p.P_avg);
    require(finite(cfg.P_avg) && cfg.P_avg > 0, "P_avg must be positive");
    require(finite(cfg.P_peak) && cfg.P_avg < cfg.P_peak, "P_avg must be below P_peak");
    cfg.gamma0 = p.gamma0;
    cfg.beta0 = p.beta0;
    cfg.sigma2 = p.sigma2;
    if (p.beta0 && p.sigma2) {
        require(*p.beta0 > 0 && *p.sigma2 > 0, "beta0 and sigma2 must be positive");
        require(rel_close(cfg.gamma0, *p.beta0 / *p.sigma2, 1e-9), "gamma0 must equal beta0/sigma2");
    }
    cfg.epsilon = p.epsilon;
    return cfg;
}

void check_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + " has " + std::to_string(got) + " slots, expected " +
                             std::to_string(want));
    }
}

SquaredDistances squared_distances(const Trajectory& traj, std::size_t n, const ScenarioConfig& cfg) {
    if (n >= traj.size() || n >= traj.y.size()) {
        throw std::out_of_range("slot index " + std::to_string(n) + " outside trajectory of " +
                                std::to_string(traj.size()) + " slots");
    }
    const double x = traj.x[n];
    const double y = traj.y[n];
    const double h2 = cfg.H * cfg.H;
    return {x * x + y * y + h2, (x - cfg.L) * (x - cfg.L) + y * y + h2};
}

RateSample slot_rates(const Trajectory& traj, const PowerProfile& power, std::size_t n,
                      const ScenarioConfig& cfg) {
    const auto d = squared_distances(traj, n, cfg);
    if (n >= power.size()) throw std::out_of_range("slot index outside power profile");
    const double p = power.P[n];
    if (!(p >= 0.0)) throw std::domain_error("transmit power must be nonnegative");
    RateSample r;
    r.R_AB = std::log2(1.0 + cfg.gamma0 * p / d.bob);
    r.R_AE = std::log2(1.0 + cfg.gamma0 * p / d.eve);
    r.R_sec_raw = r.R_AB - r.R_AE;
    r.R_sec_clipped = std::max(r.R_sec_raw, 0.0);
    return r;
}

std::vector<RateSample> all_slot_rates(const Trajectory& traj, const PowerProfile& power,
                                       const ScenarioConfig& cfg) {
    const std::size_t n = traj.size();
    check_length(traj.y.size(), n, "trajectory y");
    check_length(power.size(), n, "power profile");
    for (double p : power.P) {
        if (!(p >= 0.0)) throw std::domain_error("transmit power must be nonnegative");
    }
    std::vector<double> r_ab(n), r_ae(n);
    kernels::omp::slot_rates(traj.x, traj.y, power.P, geometry(cfg), r_ab, r_ae);
    std::vector<RateSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].R_AB = r_ab[i];
        out[i].R_AE = r_ae[i];
        out[i].R_sec_raw = r_ab[i] - r_ae[i];
        out[i].R_sec_clipped = std::max(out[i].R_sec_raw, 0.0);
    }
    return out;
}

double average_secrecy_rate(const Trajectory& traj, const PowerProfile& power,
                            const ScenarioConfig& cfg, bool clipped) {
    check_length(traj.size(), cfg.N, "trajectory");
    const auto rates = all_slot_rates(traj, power, cfg);
    double sum = 0.0;
    for (const auto& r : rates) sum += clipped ? r.R_sec_clipped : r.R_sec_raw;
    return sum / static_cast<double>(rates.size());
}

double secrecy_objective(const Trajectory& traj, const PowerProfile& power, const ScenarioConfig& cfg) {
    const auto rates = all_slot_rates(traj, power, cfg);
    double sum = 0.0;
    for (const auto& r : rates) sum += r.R_sec_raw;
    return sum;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::length: return "length";
        case ViolationKind::first_step: return "first_step";
        case ViolationKind::step: return "step";
        case ViolationKind::final_step: return "final_step";
        case ViolationKind::negative_power: return "negative_power";
        case ViolationKind::peak_power: return "peak_power";
        case ViolationKind::average_power: return "average_power";
    }
    return "unknown";
}

std::vector<Violation> validate(const Trajectory& traj, const ScenarioConfig& cfg) {
    std::vector<Violation> out;
    if (traj.x.size() != cfg.N || traj.y.size() != cfg.N) {
        out.push_back({ViolationKind::length, 0,
                       std::abs(static_cast<double>(std::max(traj.x.size(), traj.y.size())) -
                                static_cast<double>(cfg.N))});
        return out;
    }
    auto check_step = [&](ViolationKind kind, std::size_t slot, double ax, double ay, double bx, double by) {
        const double d = std::hypot(bx - ax, by - ay);
        if (!(d <= cfg.V + kMobilitySlack)) out.push_back({kind, slot, d - cfg.V});
    };
    check_step(ViolationKind::first_step, 0, cfg.x0, cfg.y0, traj.x[0], traj.y[0]);
    for (std::size_t n = 1; n < cfg.N; ++n) {
        check_step(ViolationKind::step, n, traj.x[n - 1], traj.y[n - 1], traj.x[n], traj.y[n]);
    }
    check_step(ViolationKind::final_step, cfg.N - 1, traj.x[cfg.N - 1], traj.y[cfg.N - 1], cfg.xF, cfg.yF);
    return out;
}

std::vector<Violation> validate(const PowerProfile& power, const ScenarioConfig& cfg) {
    std::vector<Violation> out;
    if (power.size() != cfg.N) {
        out.push_back({ViolationKind::length, 0,
                       std::abs(static_cast<double>(power.size()) - static_cast<double>(cfg.N))});
        return out;
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < cfg.N; ++n) {
        const double p = power.P[n];
        if (!(p >= -kPeakSlack)) out.push_back({ViolationKind::negative_power, n, -p});
        if (!(p <= cfg.P_peak + kPeakSlack)) out.push_back({ViolationKind::peak_power, n, p - cfg.P_peak});
        sum += p;
    }
    const double mean = sum / static_cast<double>(cfg.N);
    if (!(mean <= cfg.P_avg * (1.0 + kAverageRelSlack))) {
        out.push_back({ViolationKind::average_power, 0, mean - cfg.P_avg});
    }
    return out;
}

std::vector<Violation> validate(const Trajectory& traj, const PowerProfile& power, const ScenarioConfig& cfg) {
    auto out = validate(traj, cfg);
    auto more = validate(power, cfg);
    out.insert(out.end(), more.begin(), more.end());
    return out;
}

Trajectory straight_line(const ScenarioConfig& cfg) {
    const double dist = std::hypot(cfg.xF - cfg.x0, cfg.yF - cfg.y0);
    if (dist > static_cast<double>(cfg.N) * cfg.V * (1.0 + 1e-12)) {
        throw ConfigError("final location unreachable: distance " + std::to_string(dist) +
                          " m exceeds N*V = " + std::to_string(static_cast<double>(cfg.N) * cfg.V) + " m");
    }
    Trajectory traj{std::vector<double>(cfg.N), std::vector<double>(cfg.N)};
    const double n_slots = static_cast<double>(cfg.N);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        const double frac = static_cast<double>(n + 1) / n_slots;
        traj.x[n] = cfg.x0 + frac * (cfg.xF - cfg.x0);
        traj.y[n] = cfg.y0 + frac * (cfg.yF - cfg.y0);
    }
    traj.x.back() = cfg.xF;
    traj.y.back() = cfg.yF;
    return traj;
}

}  // namespace secrecy
