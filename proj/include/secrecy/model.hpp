#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace secrecy {

// Raised when a scenario or experiment definition violates its invariants.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when vectors that must share the slot count do not.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kMobilitySlack = 1e-9;   // meters
inline constexpr double kPeakSlack = 1e-12;      // watts
inline constexpr double kAverageRelSlack = 1e-9;

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

/// User-facing scenario description. Every field has the default of the
/// reference setup; `P_peak` defaults to four times `P_avg`.
struct ScenarioParams {
    double L = 200.0;
    double H = 100.0;
    double x0 = 100.0;
    double y0 = 200.0;
    double xF = 100.0;
    double yF = -200.0;
    double T = 230.0;
    double dt = 0.5;
    double v_max = 2.0;
    double P_avg = 3.1622776601683794e-4;  // -5 dBm
    std::optional<double> P_peak;
    double gamma0 = 1e8;                   // 80 dB
    std::optional<double> beta0;
    std::optional<double> sigma2;
    double epsilon = 1e-4;
};

/// Validated scenario. All quantities are SI and linear. Bob sits at the
/// origin and Eve at (L, 0); the UAV flies at altitude H.
struct ScenarioConfig {
    double L = 0;
    double H = 0;
    double x0 = 0, y0 = 0;
    double xF = 0, yF = 0;
    double T = 0;
    double dt = 0;
    std::size_t N = 0;
    double v_max = 0;
    double V = 0;  // max displacement per slot
    double P_avg = 0;
    double P_peak = 0;
    double gamma0 = 0;
    std::optional<double> beta0;
    std::optional<double> sigma2;
    double epsilon = 0;

    /// Throws ConfigError naming the first violated invariant.
    static ScenarioConfig make(const ScenarioParams& p);
};

struct Trajectory {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
};

struct PowerProfile {
    std::vector<double> P;

    std::size_t size() const { return P.size(); }
    static PowerProfile uniform(std::size_t n, double value) { return {std::vector<double>(n, value)}; }
};

struct RateSample {
    double R_AB = 0;
    double R_AE = 0;
    double R_sec_clipped = 0;
    double R_sec_raw = 0;
};

struct SquaredDistances {
    double bob = 0;  // m^2
    double eve = 0;  // m^2
};

SquaredDistances squared_distances(const Trajectory& traj, std::size_t n, const ScenarioConfig& cfg);

/// Rates in bps/Hz for slot `n` (zero-based).
RateSample slot_rates(const Trajectory& traj, const PowerProfile& power, std::size_t n,
                      const ScenarioConfig& cfg);

std::vector<RateSample> all_slot_rates(const Trajectory& traj, const PowerProfile& power,
                                       const ScenarioConfig& cfg);

/// Mean over slots of R_AB - R_AE, clipped at zero per slot when `clipped`.
double average_secrecy_rate(const Trajectory& traj, const PowerProfile& power,
                            const ScenarioConfig& cfg, bool clipped);

/// Sum over slots of R_AB - R_AE in bps/Hz, i.e. N times the raw average.
double secrecy_objective(const Trajectory& traj, const PowerProfile& power, const ScenarioConfig& cfg);

enum class ViolationKind { length, first_step, step, final_step, negative_power, peak_power, average_power };

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::size_t slot;   // zero-based; for final_step this is N-1, for average_power 0
    double magnitude;   // amount by which the bound is exceeded
};

std::vector<Violation> validate(const Trajectory& traj, const ScenarioConfig& cfg);
std::vector<Violation> validate(const PowerProfile& power, const ScenarioConfig& cfg);
std::vector<Violation> validate(const Trajectory& traj, const PowerProfile& power, const ScenarioConfig& cfg);

/// N waypoints evenly spaced from the initial to the final location, the
/// last one on the final location. Throws ConfigError if the endpoints are
/// further apart than N*V.
Trajectory straight_line(const ScenarioConfig& cfg);

void check_length(std::size_t got, std::size_t want, const char* what);

}  // namespace secrecy
