#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secrecy/model.hpp"

namespace secrecy::harness {

enum class Mode { single, trajectory_figure, rate_vs_T, rate_vs_power };

enum class Scheme { to_w_pc, to_wo_pc, line_w_pc };

std::string to_string(Mode m);
std::string to_string(Scheme s);
Mode parse_mode(const std::string& text);
Scheme parse_scheme(const std::string& text);
std::vector<Scheme> parse_scheme_list(const std::string& text);

/// Parse failure; `field()` is the offending key and `line()` its 1-based
/// line in the config file (0 when the field was not set in the file).
class ParseError : public ConfigError {
public:
    ParseError(std::string field, int line, const std::string& what);
    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct ExperimentSpec {
    Mode mode = Mode::single;
    ScenarioParams base;
    // Unset lists fall back to per-mode defaults, see T_values/Pavg_values.
    std::optional<std::vector<double>> T_sweep;
    std::optional<std::vector<double>> Pavg_sweep_dBm;
    std::optional<std::vector<Scheme>> schemes;
    bool fixed_peak = false;  // P_peak given explicitly rather than 4*P_avg
    std::filesystem::path out_dir = "results";
    int workers = 1;
    int max_outer_iterations = 100;
    bool multistart = true;
    bool record_timing = false;  // wall-clock seconds in outputs; breaks byte-identical reruns
    std::map<std::string, int> lines;  // config key -> line it was set on
};

std::vector<double> T_values(const ExperimentSpec& spec);
std::vector<double> Pavg_values_dBm(const ExperimentSpec& spec);
std::vector<Scheme> scheme_list(const ExperimentSpec& spec);

struct GridPoint {
    double T = 0;
    double Pavg_dBm = 0;
    ScenarioConfig cfg;
};

/// Every (T, P_avg) point the spec runs, validated. Throws ParseError.
std::vector<GridPoint> grid(const ExperimentSpec& spec);

ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config(const std::filesystem::path& path);

struct ResultRow {
    Scheme scheme = Scheme::to_w_pc;
    double T = 0;
    double Pavg_dBm = 0;
    double rate_clipped = 0;
    double rate_raw = 0;
    int iterations = 0;
    double seconds = 0;
    bool ok = false;
    std::string message;
};

struct RunArtifact {
    std::size_t row = 0;  // index into ExperimentResult::rows
    ScenarioConfig cfg;
    Trajectory traj;
    PowerProfile power;
    std::vector<RateSample> rates;
    std::string file_name;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<RunArtifact> traces;  // successful runs only, in row order

    bool all_ok() const;
};

/// Runs every scheme at every grid point, up to spec.workers at a time.
/// A failing run is recorded in its row and the others continue.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes results.csv, one trace file per successful run and summary.json.
/// Returns the written paths. Throws std::runtime_error naming the path on
/// I/O failure.
std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result, const ExperimentSpec& spec);

/// printf %.9g
std::string format_number(double v);

inline constexpr const char* kResultsHeader =
    "scheme,T_s,Pavg_dBm,rate_clipped_bpshz,rate_raw_bpshz,iterations,seconds";
inline constexpr const char* kTraceHeader = "n,t_s,x_m,y_m,P_w,R_AB_bpshz,R_AE_bpshz,R_sec_bpshz";

}  // namespace secrecy::harness
