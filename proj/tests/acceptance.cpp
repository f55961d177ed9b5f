// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--known-failure K]...
//
// Exit status is 1 if any criterion fails that was not declared a known
// failure on the command line; known failures still print FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "secrecy/baselines.hpp"
#include "secrecy/bcd.hpp"
#include "secrecy/harness.hpp"
#include "secrecy/power_control.hpp"
#include "secrecy/trajectory_sca.hpp"

using namespace secrecy;
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ScenarioConfig scenario(double T, double Pavg_dBm = -5.0) {
    ScenarioParams p;
    p.T = T;
    p.P_avg = dbm_to_watts(Pavg_dBm);
    return ScenarioConfig::make(p);
}

const std::vector<double> kTGrid{200, 210, 220, 230, 240, 250};
const std::vector<double> kPGrid{-15, -10, -5, 0, 5, 10};

struct SchemeRun {
    Trajectory traj;
    PowerProfile power;
    double rate_clipped = 0;
    double rate_raw = 0;
    bool converged = false;
};

struct GridRuns {
    std::vector<bcd::RunResult> bcd;  // per T
    std::vector<SchemeRun> to, towo, line;
    double seconds = 0;
};

SchemeRun from(const ScenarioConfig& cfg, Trajectory traj, PowerProfile power, bool converged) {
    SchemeRun r;
    r.rate_clipped = average_secrecy_rate(traj, power, cfg, true);
    r.rate_raw = average_secrecy_rate(traj, power, cfg, false);
    r.traj = std::move(traj);
    r.power = std::move(power);
    r.converged = converged;
    return r;
}

GridRuns run_grid(const std::vector<ScenarioConfig>& cfgs) {
    GridRuns g;
    const auto t0 = clock_type::now();
    for (const auto& cfg : cfgs) {
        g.bcd.push_back(bcd::run(cfg));
        const auto& b = g.bcd.back();
        g.to.push_back(from(cfg, b.traj, b.power, b.trace.status == bcd::RunStatus::converged));
        auto wo = baselines::to_without_pc(cfg);
        g.towo.push_back(from(cfg, wo.traj, wo.power, true));
        auto ln = baselines::line_with_pc(cfg);
        g.line.push_back(from(cfg, ln.traj, ln.power, true));
    }
    g.seconds = seconds_since(t0);
    return g;
}

// ---------------------------------------------------------------------------

Outcome power_oracle() {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(1001);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double a = oracle::log_uniform(rng, 1e-2, 1e5);
        const double b = oracle::log_uniform(rng, 1e-2, 1e5);
        const double lam = oracle::log_uniform(rng, 1e-6, 1e2);
        const double peak = oracle::log_uniform(rng, 1e-4, 1);
        const double P = power::power_at_lambda({{a}, {b}}, {lam}, peak).P[0];
        const auto ref =
            oracle::zoom_max_1d([&](double q) { return oracle::power_objective(a, b, lam, q); }, 0, peak, 1e-4);
        worst = std::max(worst, std::abs(oracle::power_objective(a, b, lam, P) - ref.value));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-6 && t < 10, fmt("100 instances, worst objective gap %.3g, %.2f s", worst, t)};
}

Outcome power_budget(const GridRuns& grid, const std::vector<ScenarioConfig>& cfgs) {
    std::mt19937_64 rng(1002);
    int count = 0, active = 0;
    double worst_excess = -1e300, worst_eq = 0;
    auto check = [&](const Trajectory& traj, const ScenarioConfig& cfg) {
        const auto s = power::optimize_power(traj, cfg);
        const double mean = std::accumulate(s.power.P.begin(), s.power.P.end(), 0.0) / cfg.N;
        worst_excess = std::max(worst_excess, (mean - cfg.P_avg) / cfg.P_avg);
        if (s.dual.lambda > 0) {
            ++active;
            worst_eq = std::max(worst_eq, std::abs(mean - cfg.P_avg) / cfg.P_avg);
        }
        ++count;
    };
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const auto& cfg = cfgs[i];
        const auto s = straight_line(cfg);
        const auto l = baselines::line_trajectory(cfg);
        check(s, cfg);
        check(l, cfg);
        check(grid.bcd[i].traj, cfg);
        check(grid.towo[i].traj, cfg);
        for (int k = 0; k < 5; ++k) {
            const double th = oracle::uniform(rng, 0, 1);
            Trajectory mix{std::vector<double>(cfg.N), std::vector<double>(cfg.N)};
            for (std::size_t n = 0; n < cfg.N; ++n) {
                mix.x[n] = th * s.x[n] + (1 - th) * l.x[n];
                mix.y[n] = th * s.y[n] + (1 - th) * l.y[n];
            }
            check(mix, cfg);
        }
    }
    return {worst_excess <= 0 && worst_eq <= 1e-9,
            fmt("%d trajectories (%d with active budget): max (mean-Pavg)/Pavg %.3g, max equality gap %.3g", count,
                active, worst_excess, worst_eq)};
}

Outcome sca_bounds() {
    std::mt19937_64 rng(1003);
    int under_bad = 0, over_bad = 0, eq_bad = 0, strict_bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const double uf = oracle::log_uniform(rng, 1e2, 1e7);
        const double u = oracle::log_uniform(rng, 1e2, 1e7);
        const double Pn = oracle::log_uniform(rng, 1e-2, 1e7);
        const double exact = std::log1p(Pn / u);
        const double est = sca::under_estimator_u(u, uf, Pn);
        if (est > exact + 1e-12 * exact) ++under_bad;
        if (std::abs(u - uf) > 1e-3 * uf && !(est < exact)) ++strict_bad;
        const double at = sca::under_estimator_u(uf, uf, Pn);
        if (std::abs(at - std::log1p(Pn / uf)) > 1e-12 * std::log1p(Pn / uf)) ++eq_bad;

        const double z = oracle::uniform(rng, -1e3, 1e3);
        const double zf = oracle::uniform(rng, -1e3, 1e3);
        if (sca::over_estimator_sq(z, zf) < -z * z - 1e-12 * std::max(z * z, zf * zf)) ++over_bad;
        if (sca::over_estimator_sq(zf, zf) != -zf * zf) ++eq_bad;
    }
    return {under_bad + over_bad + eq_bad + strict_bad == 0,
            fmt("1e4 samples each: under-estimator violations %d, not strict away from expansion %d, "
                "over-estimator violations %d, expansion-point mismatches %d",
                under_bad, strict_bad, over_bad, eq_bad)};
}

// Surrogate objective of one slot at (x, y) with tight slacks, in the
// units of the solver objective.
double slot_surrogate(const ScenarioConfig& cfg, double Pn, double xf, double yf, double x, double y) {
    const double uf = xf * xf + yf * yf + cfg.H * cfg.H;
    const double t = (xf - cfg.L) * (xf - cfg.L) + 2 * (xf - cfg.L) * (x - xf) + yf * yf + 2 * yf * (y - yf) +
                     cfg.H * cfg.H;
    if (!(t > 0)) return -1e300;
    const double u = x * x + y * y + cfg.H * cfg.H;
    return -Pn / (uf * uf + Pn * uf) * u - std::log1p(Pn / t);
}

Outcome solver_oracle() {
    std::mt19937_64 rng(1004);
    double worst_obj = 0, worst_var = 0, worst_kkt = 0;
    int solved = 0, failed = 0, active_balls = 0;
    while (solved + failed < 50) {
        const bool coupled = (solved + failed) >= 35;
        const std::size_t N = coupled ? 1 : 2 + static_cast<std::size_t>(oracle::uniform(rng, 0, 2));
        ScenarioParams p;
        p.L = oracle::uniform(rng, 1, 3);
        p.H = oracle::uniform(rng, 0.5, 1.5);
        p.dt = 1;
        p.T = static_cast<double>(N);
        p.gamma0 = 1;
        p.P_avg = 1;
        Trajectory exp{std::vector<double>(N), std::vector<double>(N)};
        if (coupled) {
            p.v_max = oracle::uniform(rng, 0.3, 1.0);
            p.x0 = oracle::uniform(rng, -1, 3);
            p.y0 = oracle::uniform(rng, -2, 2);
            const double ang = oracle::uniform(rng, 0, 6.283185307179586);
            const double d = p.v_max * oracle::uniform(rng, 0.2, 1.6);
            p.xF = p.x0 + d * std::cos(ang);
            p.yF = p.y0 + d * std::sin(ang);
            exp.x[0] = 0.5 * (p.x0 + p.xF);
            exp.y[0] = 0.5 * (p.y0 + p.yF);
        } else {
            p.v_max = 100;
            p.x0 = oracle::uniform(rng, -1, 2);
            p.y0 = oracle::uniform(rng, -1, 2);
            p.xF = oracle::uniform(rng, -1, 2);
            p.yF = oracle::uniform(rng, -1, 2);
            for (std::size_t n = 0; n < N; ++n) {
                exp.x[n] = oracle::uniform(rng, -2, 3);
                exp.y[n] = oracle::uniform(rng, -2, 2);
            }
        }
        const auto cfg = ScenarioConfig::make(p);
        PowerProfile pw{std::vector<double>(N)};
        for (auto& v : pw.P) v = oracle::log_uniform(rng, 0.1, 10);
        const auto Pn = sca::ScaledPower::from(pw, cfg);
        const auto e = sca::make_expansion(exp, cfg);
        sca::Subproblem sp;
        try {
            sp = sca::build_subproblem(e, Pn, cfg);
        } catch (const sca::InfeasibleError&) {
            continue;  // start point outside the linearized domain; draw again
        }
        const auto r = solver::solve(sp.problem);
        if (r.status != solver::SolveStatus::converged) {
            ++failed;
            continue;
        }
        ++solved;
        worst_kkt = std::max(worst_kkt, r.kkt_residual / (1 + std::abs(r.objective)));

        double grid_obj = 0;
        for (std::size_t n = 0; n < N; ++n) {
            const double xf = exp.x[n], yf = exp.y[n];
            const auto f = [&](double x, double y) { return slot_surrogate(cfg, Pn.Pn[n], xf, yf, x, y); };
            oracle::Best2 best;
            if (coupled) {
                const auto feas = [&](double x, double y) {
                    return std::hypot(x - cfg.x0, y - cfg.y0) <= cfg.V && std::hypot(x - cfg.xF, y - cfg.yF) <= cfg.V;
                };
                best = oracle::zoom_max_2d(f, feas, xf - cfg.V, xf + cfg.V, yf - cfg.V, yf + cfg.V, 1e-2);
                // A zoomed grid cannot follow a curved boundary, so also
                // search both circles by angle.
                for (const auto& [cx, cy] : {std::pair{cfg.x0, cfg.y0}, std::pair{cfg.xF, cfg.yF}}) {
                    const auto arc = [&](double a) {
                        const double x = cx + cfg.V * std::cos(a), y = cy + cfg.V * std::sin(a);
                        return feas(x, y) ? f(x, y) : -1e300;
                    };
                    const auto b = oracle::zoom_max_1d(arc, 0, 6.283185307179586, 1e-4);
                    if (b.value > best.value) {
                        best = {cx + cfg.V * std::cos(b.arg), cy + cfg.V * std::sin(b.arg), b.value};
                    }
                }
                const double xs = r.solution[sp.x_index[n]] * sp.scale, ys = r.solution[sp.y_index[n]] * sp.scale;
                const double slack = std::min(cfg.V - std::hypot(xs - cfg.x0, ys - cfg.y0),
                                              cfg.V - std::hypot(xs - cfg.xF, ys - cfg.yF));
                if (slack < 1e-6) ++active_balls;
            } else {
                best = oracle::zoom_max_2d(f, [](double, double) { return true; }, -10, 10, -10, 10, 5e-2);
            }
            grid_obj += best.value;
            worst_var = std::max(worst_var, std::abs(r.solution[sp.x_index[n]] * sp.scale - best.x));
            worst_var = std::max(worst_var, std::abs(r.solution[sp.y_index[n]] * sp.scale - best.y));
        }
        worst_obj = std::max(worst_obj, std::abs(r.objective / sp.objective_weight - grid_obj));
    }
    return {failed == 0 && worst_obj <= 1e-4 && worst_var <= 1e-3 && worst_kkt <= 1e-8,
            fmt("%d solved, %d failed (%d single-slot instances ended on a mobility ball); worst objective gap "
                "%.3g, worst variable gap %.3g, worst KKT/(1+|obj|) %.3g",
                solved, failed, active_balls, worst_obj, worst_var, worst_kkt)};
}

Outcome bcd_monotone(const GridRuns& g) {
    double worst_drop = 0;
    int max_iters = 0;
    bool all_converged = true;
    for (const auto& r : g.bcd) {
        for (const auto& tr : r.start_traces) {
            all_converged = all_converged && tr.status == bcd::RunStatus::converged;
            max_iters = std::max(max_iters, static_cast<int>(tr.records.size()) - 1);
            for (std::size_t k = 1; k < tr.records.size(); ++k) {
                worst_drop = std::max(worst_drop, tr.records[k - 1].objective - tr.records[k].objective);
            }
        }
    }
    return {worst_drop <= 1e-7 && all_converged && max_iters <= 100 && g.seconds < 600,
            fmt("T grid, both starts: largest objective drop %.3g, all converged %s, most outer iterations %d, "
                "all schemes %.1f s",
                worst_drop, all_converged ? "yes" : "no", max_iters, g.seconds)};
}

Outcome straight_at_200(const GridRuns& g, const ScenarioConfig& cfg) {
    auto dev = [&](const SchemeRun& r) {
        return oracle::max_deviation_from_segment(r.traj.x, r.traj.y, cfg.x0, cfg.y0, cfg.xF, cfg.yF);
    };
    const double a = dev(g.to[0]), b = dev(g.towo[0]), c = dev(g.line[0]);
    return {std::max({a, b, c}) <= 1.0,
            fmt("max deviation from the straight segment: TO-w-PC %.3f m, TO-wo-PC %.3f m, line-w-PC %.3f m", a, b,
                c)};
}

int longest_hover(const Trajectory& t) {
    int best = 0, run = 0;
    for (std::size_t n = 1; n < t.size(); ++n) {
        run = std::hypot(t.x[n] - t.x[n - 1], t.y[n] - t.y[n - 1]) < 0.1 ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

Outcome hover_at_250(const GridRuns& g) {
    const std::size_t i = 5;
    const int a = longest_hover(g.to[i].traj), b = longest_hover(g.towo[i].traj);
    int above_bob = 0;
    for (std::size_t n = 0; n < g.line[i].traj.size(); ++n) {
        if (g.line[i].traj.x[n] == 0 && g.line[i].traj.y[n] == 0) ++above_bob;
    }
    return {a >= 20 && b >= 20 && above_bob > 0,
            fmt("longest run of steps < 0.1 m: TO-w-PC %d, TO-wo-PC %d; line-w-PC slots exactly at (0,0): %d", a, b,
                above_bob)};
}

Outcome rate_vs_T(const GridRuns& g) {
    double worst_mono = 0, worst_dom = 0;
    for (std::size_t i = 0; i < kTGrid.size(); ++i) {
        if (i > 0) {
            worst_mono = std::max({worst_mono, g.to[i - 1].rate_clipped - g.to[i].rate_clipped,
                                   g.towo[i - 1].rate_clipped - g.towo[i].rate_clipped,
                                   g.line[i - 1].rate_clipped - g.line[i].rate_clipped});
        }
        worst_dom = std::max(worst_dom,
                             std::max(g.towo[i].rate_clipped, g.line[i].rate_clipped) - g.to[i].rate_clipped);
    }
    std::string rates;
    for (std::size_t i = 0; i < kTGrid.size(); ++i) {
        rates += fmt(" T=%g:%.4f/%.4f/%.4f", kTGrid[i], g.to[i].rate_clipped, g.towo[i].rate_clipped,
                     g.line[i].rate_clipped);
    }
    return {worst_mono <= 1e-6 && worst_dom <= 1e-6,
            fmt("largest decrease in T %.3g, largest shortfall of TO-w-PC %.3g; rates TO-w-PC/TO-wo-PC/line-w-PC%s",
                worst_mono, worst_dom, rates.c_str())};
}

Outcome rate_vs_power(const GridRuns& p) {
    const auto& wo = p.towo;
    const auto& ln = p.line;
    const bool low = ln[0].rate_clipped >= wo[0].rate_clipped && ln[1].rate_clipped >= wo[1].rate_clipped;
    const bool high = wo.back().rate_clipped >= ln.back().rate_clipped;
    std::string cross = "none";
    for (std::size_t i = 1; i < kPGrid.size(); ++i) {
        if (wo[i].rate_clipped >= ln[i].rate_clipped && ln[i - 1].rate_clipped > wo[i - 1].rate_clipped) {
            cross = fmt("between %g and %g dBm", kPGrid[i - 1], kPGrid[i]);
        }
    }
    std::string rates;
    for (std::size_t i = 0; i < kPGrid.size(); ++i) {
        rates += fmt(" %gdBm:%.4f/%.4f/%.4f", kPGrid[i], p.to[i].rate_clipped, wo[i].rate_clipped, ln[i].rate_clipped);
    }
    return {low && high, fmt("crossover %s; rates TO-w-PC/TO-wo-PC/line-w-PC%s", cross.c_str(), rates.c_str())};
}

Outcome p1_equals_p2(const std::vector<const GridRuns*>& runs,
                     const std::vector<const std::vector<ScenarioConfig>*>& cfgs) {
    double worst_term = 0, worst_gap = 0, worst_term_wo = 0;
    int checked = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        for (std::size_t i = 0; i < cfgs[k]->size(); ++i) {
            const auto& cfg = (*cfgs[k])[i];
            for (const auto* r : {&runs[k]->to[i], &runs[k]->line[i]}) {
                if (!r->converged) continue;
                ++checked;
                for (const auto& s : all_slot_rates(r->traj, r->power, cfg)) worst_term = std::min(worst_term, s.R_sec_raw);
                worst_gap = std::max(worst_gap, std::abs(r->rate_clipped - r->rate_raw));
            }
            for (const auto& s : all_slot_rates(runs[k]->towo[i].traj, runs[k]->towo[i].power, cfg)) {
                worst_term_wo = std::min(worst_term_wo, s.R_sec_raw);
            }
        }
    }
    return {worst_term >= -1e-9 && worst_gap <= 1e-9,
            fmt("%d power-controlled runs: most negative slot term %.3g, largest clipped-raw gap %.3g "
                "(TO-wo-PC, fixed power, most negative term %.3g)",
                checked, worst_term, worst_gap, worst_term_wo)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    auto spec = harness::parse_config_text("mode = rate-vs-T\nworkers = 2\n");
    std::vector<std::vector<fs::path>> files;
    for (const char* tag : {"a", "b"}) {
        spec.out_dir = fs::temp_directory_path() / (std::string("secrecy_acceptance_") + tag);
        fs::remove_all(spec.out_dir);
        files.push_back(harness::write_outputs(harness::run_experiment(spec), spec));
    }
    int differ = 0;
    if (files[0].size() != files[1].size()) return {false, "different file sets"};
    for (std::size_t i = 0; i < files[0].size(); ++i) {
        if (files[0][i].filename() != files[1][i].filename() || slurp(files[0][i]) != slurp(files[1][i])) ++differ;
    }
    return {differ == 0, fmt("rate-vs-T spec run twice: %zu files, %d differ", files[0].size(), differ)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--known-failure") == 0 && i + 1 < argc) {
            known.insert(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--known-failure K]...\n", argv[0]);
            return 2;
        }
    }

    std::vector<ScenarioConfig> tcfgs, pcfgs;
    for (double T : kTGrid) tcfgs.push_back(scenario(T));
    for (double P : kPGrid) pcfgs.push_back(scenario(230, P));

    int unexpected = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        const bool excused = !o.pass && known.count(id);
        std::printf("%s  %2d %s: %s%s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                    excused ? " [known failure]" : "");
        std::fflush(stdout);
        if (!o.pass && !excused) ++unexpected;
    };

    report(1, "power control matches grid maximizer", power_oracle());
    const auto tgrid = run_grid(tcfgs);
    report(2, "average power budget", power_budget(tgrid, tcfgs));
    report(3, "surrogate bounds", sca_bounds());
    report(4, "convex solver matches grid optimum", solver_oracle());
    report(5, "BCD monotone and terminates", bcd_monotone(tgrid));
    report(6, "T=200 trajectories are the straight segment", straight_at_200(tgrid, tcfgs[0]));
    report(7, "T=250 hovering", hover_at_250(tgrid));
    report(8, "rate non-decreasing in T, TO-w-PC best", rate_vs_T(tgrid));
    const auto pgrid = run_grid(pcfgs);
    report(9, "rate vs average power ordering", rate_vs_power(pgrid));
    report(10, "clipped and raw objectives agree", p1_equals_p2({&tgrid, &pgrid}, {&tcfgs, &pcfgs}));
    report(11, "byte-identical reruns", determinism());
    return unexpected == 0 ? 0 : 1;
}
