#include "secrecy/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "secrecy/baselines.hpp"
#include "secrecy/bcd.hpp"

namespace secrecy::harness {

namespace {

const std::vector<double> kDefaultTSweep{200, 210, 220, 230, 240, 250};
const std::vector<double> kDefaultFigureT{200, 230, 250};
const std::vector<double> kDefaultPavgSweep{-15, -10, -5, 0, 5, 10};
const std::vector<Scheme> kAllSchemes{Scheme::to_w_pc, Scheme::to_wo_pc, Scheme::line_w_pc};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& field, int line, const std::string& text) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw ParseError(field, line, "expected a finite number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& field, int line, const std::string& text) {
    const double v = to_double(field, line, text);
    if (v != std::floor(v) || v < 1 || v > 1e6) {
        throw ParseError(field, line, "expected a positive integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

bool to_bool(const std::string& field, int line, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ParseError(field, line, "expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& field, int line, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(field, line, item));
    if (out.empty()) throw ParseError(field, line, "sweep list is empty");
    return out;
}

// dB-valued inputs are kept aside until all keys are read, since gamma0
// may also come from beta0/sigma2.
struct Pending {
    std::optional<double> gamma0_dB, beta0_dB, sigma2_dBm, Pavg_dBm, Ppeak_dBm;
};

const std::map<std::string, std::function<void(ExperimentSpec&, Pending&, const std::string&, int)>>& setters() {
    using F = std::function<void(ExperimentSpec&, Pending&, const std::string&, int)>;
    auto num = [](double ScenarioParams::*m, const char* key) -> F {
        return [m, key](ExperimentSpec& s, Pending&, const std::string& v, int line) {
            s.base.*m = to_double(key, line, v);
        };
    };
    auto db = [](std::optional<double> Pending::*m, const char* key) -> F {
        return [m, key](ExperimentSpec&, Pending& p, const std::string& v, int line) {
            p.*m = to_double(key, line, v);
        };
    };
    static const std::map<std::string, F> table{
        {"mode",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) {
             try {
                 s.mode = parse_mode(v);
             } catch (const ConfigError& e) {
                 throw ParseError("mode", line, e.what());
             }
         }},
        {"L_m", num(&ScenarioParams::L, "L_m")},
        {"H_m", num(&ScenarioParams::H, "H_m")},
        {"x0_m", num(&ScenarioParams::x0, "x0_m")},
        {"y0_m", num(&ScenarioParams::y0, "y0_m")},
        {"xF_m", num(&ScenarioParams::xF, "xF_m")},
        {"yF_m", num(&ScenarioParams::yF, "yF_m")},
        {"T_s", num(&ScenarioParams::T, "T_s")},
        {"dt_s", num(&ScenarioParams::dt, "dt_s")},
        {"v_max_mps", num(&ScenarioParams::v_max, "v_max_mps")},
        {"epsilon", num(&ScenarioParams::epsilon, "epsilon")},
        {"Pavg_dBm", db(&Pending::Pavg_dBm, "Pavg_dBm")},
        {"Ppeak_dBm", db(&Pending::Ppeak_dBm, "Ppeak_dBm")},
        {"gamma0_dB", db(&Pending::gamma0_dB, "gamma0_dB")},
        {"beta0_dB", db(&Pending::beta0_dB, "beta0_dB")},
        {"sigma2_dBm", db(&Pending::sigma2_dBm, "sigma2_dBm")},
        {"T_sweep_s",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) { s.T_sweep = to_list("T_sweep_s", line, v); }},
        {"Pavg_sweep_dBm",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) {
             s.Pavg_sweep_dBm = to_list("Pavg_sweep_dBm", line, v);
         }},
        {"schemes",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) {
             try {
                 s.schemes = parse_scheme_list(v);
             } catch (const ConfigError& e) {
                 throw ParseError("schemes", line, e.what());
             }
         }},
        {"out_dir",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) {
             if (v.empty()) throw ParseError("out_dir", line, "empty path");
             s.out_dir = v;
         }},
        {"workers",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) { s.workers = to_int("workers", line, v); }},
        {"max_outer_iterations",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) {
             s.max_outer_iterations = to_int("max_outer_iterations", line, v);
         }},
        {"multistart",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) {
             s.multistart = to_bool("multistart", line, v);
         }},
        {"record_timing",
         [](ExperimentSpec& s, Pending&, const std::string& v, int line) {
             s.record_timing = to_bool("record_timing", line, v);
         }},
    };
    return table;
}

int line_of(const ExperimentSpec& spec, const std::string& key) {
    const auto it = spec.lines.find(key);
    return it == spec.lines.end() ? 0 : it->second;
}

// Which config key a ScenarioConfig::make failure is about.
std::string field_for(const std::string& what, const ExperimentSpec& spec) {
    static const std::vector<std::pair<std::string, std::string>> prefixes{
        {"geometry", "L_m"},          {"H ", "H_m"},
        {"T ", "T_s"},                {"dt", "dt_s"},
        {"v_max", "v_max_mps"},       {"gamma0 must be positive", "gamma0_dB"},
        {"epsilon", "epsilon"},       {"P_avg must be positive", "Pavg_dBm"},
        {"beta0", "beta0_dB"},        {"gamma0 must equal", "gamma0_dB"},
    };
    if (what.rfind("P_avg must be below", 0) == 0) return spec.fixed_peak ? "Ppeak_dBm" : "Pavg_dBm";
    for (const auto& [p, f] : prefixes) {
        if (what.rfind(p, 0) == 0) return f;
    }
    return "config";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

double rounded(double v) { return std::stod(format_number(v)); }

ResultRow run_one(Scheme scheme, const GridPoint& point, const ExperimentSpec& spec, RunArtifact& art) {
    ResultRow row;
    row.scheme = scheme;
    row.T = point.T;
    row.Pavg_dBm = point.Pavg_dBm;
    const auto& cfg = point.cfg;
    const auto start = std::chrono::steady_clock::now();
    switch (scheme) {
    case Scheme::to_w_pc: {
        bcd::RunOptions opts;
        opts.max_outer_iterations = spec.max_outer_iterations;
        opts.multistart = spec.multistart;
        auto r = bcd::run(cfg, opts);
        art.traj = std::move(r.traj);
        art.power = std::move(r.power);
        row.iterations = static_cast<int>(r.trace.records.size()) - 1;
        if (r.trace.status != bcd::RunStatus::converged) row.message = bcd::to_string(r.trace.status);
        break;
    }
    case Scheme::to_wo_pc: {
        auto r = baselines::to_without_pc(cfg);
        art.traj = std::move(r.traj);
        art.power = std::move(r.power);
        row.iterations = r.iterations;
        break;
    }
    case Scheme::line_w_pc: {
        auto r = baselines::line_with_pc(cfg);
        art.traj = std::move(r.traj);
        art.power = std::move(r.power);
        break;
    }
    }
    const auto stop = std::chrono::steady_clock::now();
    if (spec.record_timing) row.seconds = std::chrono::duration<double>(stop - start).count();
    art.cfg = cfg;
    art.rates = all_slot_rates(art.traj, art.power, cfg);
    row.rate_clipped = average_secrecy_rate(art.traj, art.power, cfg, true);
    row.rate_raw = average_secrecy_rate(art.traj, art.power, cfg, false);
    row.ok = true;
    return row;
}

}  // namespace

ParseError::ParseError(std::string field, int line, const std::string& what)
    : ConfigError(field + (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + what),
      field_(std::move(field)),
      line_(line) {}

std::string to_string(Mode m) {
    switch (m) {
    case Mode::single: return "single";
    case Mode::trajectory_figure: return "trajectory-figure";
    case Mode::rate_vs_T: return "rate-vs-T";
    case Mode::rate_vs_power: return "rate-vs-power";
    }
    return "unknown";
}

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::to_w_pc: return "TO-w-PC";
    case Scheme::to_wo_pc: return baselines::kToWithoutPc;
    case Scheme::line_w_pc: return baselines::kLineWithPc;
    }
    return "unknown";
}

Mode parse_mode(const std::string& text) {
    for (auto m : {Mode::single, Mode::trajectory_figure, Mode::rate_vs_T, Mode::rate_vs_power}) {
        if (text == to_string(m)) return m;
    }
    throw ConfigError("unknown mode '" + text + "'");
}

Scheme parse_scheme(const std::string& text) {
    for (auto s : kAllSchemes) {
        if (text == to_string(s)) return s;
    }
    throw ConfigError("unknown scheme '" + text + "'");
}

std::vector<Scheme> parse_scheme_list(const std::string& text) {
    std::vector<Scheme> out;
    for (const auto& item : split(text, ',')) {
        const auto s = parse_scheme(item);
        if (std::find(out.begin(), out.end(), s) != out.end()) throw ConfigError("scheme '" + item + "' listed twice");
        out.push_back(s);
    }
    if (out.empty()) throw ConfigError("scheme list is empty");
    return out;
}

std::vector<double> T_values(const ExperimentSpec& spec) {
    switch (spec.mode) {
    case Mode::single:
    case Mode::rate_vs_power: return {spec.base.T};
    case Mode::trajectory_figure: return spec.T_sweep.value_or(kDefaultFigureT);
    case Mode::rate_vs_T: return spec.T_sweep.value_or(kDefaultTSweep);
    }
    return {};
}

std::vector<double> Pavg_values_dBm(const ExperimentSpec& spec) {
    if (spec.mode == Mode::rate_vs_power) return spec.Pavg_sweep_dBm.value_or(kDefaultPavgSweep);
    return {watts_to_dbm(spec.base.P_avg)};
}

std::vector<Scheme> scheme_list(const ExperimentSpec& spec) {
    if (spec.schemes) return *spec.schemes;
    if (spec.mode == Mode::single) return {Scheme::to_w_pc};
    return kAllSchemes;
}

std::vector<GridPoint> grid(const ExperimentSpec& spec) {
    std::vector<GridPoint> out;
    const bool sweep_T = spec.mode == Mode::trajectory_figure || spec.mode == Mode::rate_vs_T;
    const bool sweep_P = spec.mode == Mode::rate_vs_power;
    for (double P_dBm : Pavg_values_dBm(spec)) {
        for (double T : T_values(spec)) {
            ScenarioParams p = spec.base;
            p.T = T;
            if (sweep_P) p.P_avg = dbm_to_watts(P_dBm);
            GridPoint g;
            g.T = T;
            g.Pavg_dBm = P_dBm;
            try {
                g.cfg = ScenarioConfig::make(p);
            } catch (const ConfigError& e) {
                std::string field = field_for(e.what(), spec);
                if (sweep_T && field == "T_s" && spec.T_sweep) field = "T_sweep_s";
                if (sweep_P && field == "Pavg_dBm" && spec.Pavg_sweep_dBm) field = "Pavg_sweep_dBm";
                throw ParseError(field, line_of(spec, field), e.what());
            }
            const double chord = std::hypot(g.cfg.xF - g.cfg.x0, g.cfg.yF - g.cfg.y0);
            if (chord > static_cast<double>(g.cfg.N) * g.cfg.V * (1.0 + 1e-12)) {
                const std::string field = sweep_T && spec.T_sweep ? "T_sweep_s" : "T_s";
                throw ParseError(field, line_of(spec, field),
                                 "final location unreachable within T=" + format_number(T) + " s");
            }
            out.push_back(std::move(g));
        }
    }
    return out;
}

ExperimentSpec parse_config_text(const std::string& text) {
    ExperimentSpec spec;
    Pending pending;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ParseError(content, line, "expected key = value");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) throw ParseError(key, line, "unknown key");
        if (spec.lines.count(key)) throw ParseError(key, line, "set twice");
        it->second(spec, pending, value, line);
        spec.lines[key] = line;
    }

    if (pending.Pavg_dBm) spec.base.P_avg = dbm_to_watts(*pending.Pavg_dBm);
    if (pending.Ppeak_dBm) {
        spec.base.P_peak = dbm_to_watts(*pending.Ppeak_dBm);
        spec.fixed_peak = true;
    }
    if (pending.beta0_dB) spec.base.beta0 = db_to_linear(*pending.beta0_dB);
    if (pending.sigma2_dBm) spec.base.sigma2 = dbm_to_watts(*pending.sigma2_dBm);
    if (pending.beta0_dB.has_value() != pending.sigma2_dBm.has_value()) {
        const std::string field = pending.beta0_dB ? "sigma2_dBm" : "beta0_dB";
        throw ParseError(field, 0, "beta0_dB and sigma2_dBm must be given together");
    }
    if (pending.gamma0_dB) {
        spec.base.gamma0 = db_to_linear(*pending.gamma0_dB);
    } else if (spec.base.beta0 && spec.base.sigma2) {
        spec.base.gamma0 = *spec.base.beta0 / *spec.base.sigma2;
    }

    grid(spec);
    return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("config", 0, "cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

bool ExperimentResult::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.ok; });
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    const auto points = grid(spec);
    const auto schemes = scheme_list(spec);
    const long total = static_cast<long>(points.size() * schemes.size());

    std::vector<ResultRow> rows(total);
    std::vector<RunArtifact> arts(total);
    const int workers = std::max(1, spec.workers);

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long k = 0; k < total; ++k) {
        const auto& point = points[k / schemes.size()];
        const Scheme scheme = schemes[k % schemes.size()];
        try {
            rows[k] = run_one(scheme, point, spec, arts[k]);
        } catch (const std::exception& e) {
            rows[k] = ResultRow{};
            rows[k].scheme = scheme;
            rows[k].T = point.T;
            rows[k].Pavg_dBm = point.Pavg_dBm;
            rows[k].rate_clipped = std::nan("");
            rows[k].rate_raw = std::nan("");
            rows[k].message = e.what();
        }
    }

    ExperimentResult result;
    result.rows = std::move(rows);
    for (long k = 0; k < total; ++k) {
        if (!result.rows[k].ok) continue;
        auto& art = arts[k];
        art.row = static_cast<std::size_t>(k);
        const auto& row = result.rows[k];
        art.file_name = "trace_" + to_string(row.scheme) + "_" + format_number(row.T);
        if (spec.mode == Mode::rate_vs_power) art.file_name += "_" + format_number(row.Pavg_dBm) + "dBm";
        art.file_name += ".csv";
        result.traces.push_back(std::move(art));
    }
    return result;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result, const ExperimentSpec& spec) {
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + spec.out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    const auto f = format_number;

    std::string csv = std::string(kResultsHeader) + "\n";
    for (const auto& r : result.rows) {
        csv += to_string(r.scheme) + "," + f(r.T) + "," + f(r.Pavg_dBm) + "," + f(r.rate_clipped) + "," +
               f(r.rate_raw) + "," + std::to_string(r.iterations) + "," + f(r.seconds) + "\n";
    }
    written.push_back(spec.out_dir / "results.csv");
    write_file(written.back(), csv);

    for (const auto& art : result.traces) {
        std::string t = std::string(kTraceHeader) + "\n";
        for (std::size_t n = 0; n < art.traj.size(); ++n) {
            const auto& r = art.rates[n];
            t += std::to_string(n + 1) + "," + f(static_cast<double>(n + 1) * art.cfg.dt) + "," + f(art.traj.x[n]) +
                 "," + f(art.traj.y[n]) + "," + f(art.power.P[n]) + "," + f(r.R_AB) + "," + f(r.R_AE) + "," +
                 f(r.R_sec_clipped) + "\n";
        }
        written.push_back(spec.out_dir / art.file_name);
        write_file(written.back(), t);
    }

    using nlohmann::ordered_json;
    ordered_json cfg;
    const auto& b = spec.base;
    cfg["L_m"] = rounded(b.L);
    cfg["H_m"] = rounded(b.H);
    cfg["x0_m"] = rounded(b.x0);
    cfg["y0_m"] = rounded(b.y0);
    cfg["xF_m"] = rounded(b.xF);
    cfg["yF_m"] = rounded(b.yF);
    cfg["T_s"] = rounded(b.T);
    cfg["dt_s"] = rounded(b.dt);
    cfg["v_max_mps"] = rounded(b.v_max);
    cfg["Pavg_dBm"] = rounded(watts_to_dbm(b.P_avg));
    cfg["Ppeak_dBm"] = spec.fixed_peak ? ordered_json(rounded(watts_to_dbm(*b.P_peak))) : ordered_json("4*Pavg");
    cfg["gamma0_dB"] = rounded(linear_to_db(b.gamma0));
    cfg["beta0_dB"] = b.beta0 ? ordered_json(rounded(linear_to_db(*b.beta0))) : ordered_json(nullptr);
    cfg["sigma2_dBm"] = b.sigma2 ? ordered_json(rounded(watts_to_dbm(*b.sigma2))) : ordered_json(nullptr);
    cfg["epsilon"] = rounded(b.epsilon);

    ordered_json exp;
    exp["mode"] = to_string(spec.mode);
    ordered_json ts = ordered_json::array();
    for (double T : T_values(spec)) ts.push_back(rounded(T));
    exp["T_sweep_s"] = ts;
    ordered_json ps = ordered_json::array();
    for (double P : Pavg_values_dBm(spec)) ps.push_back(rounded(P));
    exp["Pavg_sweep_dBm"] = ps;
    ordered_json ss = ordered_json::array();
    for (auto s : scheme_list(spec)) ss.push_back(to_string(s));
    exp["schemes"] = ss;
    exp["max_outer_iterations"] = spec.max_outer_iterations;
    exp["multistart"] = spec.multistart;
    exp["record_timing"] = spec.record_timing;

    ordered_json rows = ordered_json::array();
    for (const auto& r : result.rows) {
        ordered_json j;
        j["scheme"] = to_string(r.scheme);
        j["T_s"] = rounded(r.T);
        j["Pavg_dBm"] = rounded(r.Pavg_dBm);
        j["status"] = r.ok ? "ok" : "failed";
        j["rate_clipped_bpshz"] = r.ok ? ordered_json(rounded(r.rate_clipped)) : ordered_json(nullptr);
        j["rate_raw_bpshz"] = r.ok ? ordered_json(rounded(r.rate_raw)) : ordered_json(nullptr);
        j["iterations"] = r.iterations;
        j["seconds"] = rounded(r.seconds);
        j["message"] = r.message;
        rows.push_back(j);
    }

    ordered_json summary;
    summary["config"] = cfg;
    summary["experiment"] = exp;
    summary["rows"] = rows;
    written.push_back(spec.out_dir / "summary.json");
    write_file(written.back(), summary.dump(2) + "\n");
    return written;
}

}  // namespace secrecy::harness
