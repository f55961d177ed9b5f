// secrecy-traj: run trajectory/power experiments from a key=value config.
//
//   secrecy-traj run <config-file> [--mode M] [--out DIR] [--workers K] [--schemes LIST]
//
// Exit status: 0 all runs succeeded, 1 some run failed, 2 bad config or
// command line.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "secrecy/harness.hpp"

namespace h = secrecy::harness;

int main(int argc, char** argv) {
    CLI::App app{"UAV secrecy-rate trajectory and power optimization"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");

    std::string config_path, mode, out, schemes;
    int workers = 0;
    run->add_option("config", config_path, "key = value config file")->required();
    run->add_option("--mode", mode, "single | trajectory-figure | rate-vs-T | rate-vs-power");
    run->add_option("--out", out, "output directory");
    run->add_option("--workers", workers, "grid points run concurrently")->check(CLI::PositiveNumber);
    run->add_option("--schemes", schemes, "comma separated subset of TO-w-PC,TO-wo-PC,line-w-PC");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    h::ExperimentSpec spec;
    try {
        spec = h::parse_config(config_path);
        if (!mode.empty()) spec.mode = h::parse_mode(mode);
        if (!schemes.empty()) spec.schemes = h::parse_scheme_list(schemes);
        if (!out.empty()) spec.out_dir = out;
        if (workers > 0) spec.workers = workers;
        h::grid(spec);
    } catch (const secrecy::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        const auto result = h::run_experiment(spec);
        for (const auto& r : result.rows) {
            std::printf("%-9s T=%-6s Pavg=%-6s dBm  rate=%s bps/Hz  iters=%d%s%s\n", h::to_string(r.scheme).c_str(),
                        h::format_number(r.T).c_str(), h::format_number(r.Pavg_dBm).c_str(),
                        r.ok ? h::format_number(r.rate_clipped).c_str() : "-", r.iterations,
                        r.message.empty() ? "" : "  ", r.message.c_str());
        }
        const auto files = h::write_outputs(result, spec);
        std::printf("wrote %zu files to %s\n", files.size(), spec.out_dir.string().c_str());
        return result.all_ok() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
