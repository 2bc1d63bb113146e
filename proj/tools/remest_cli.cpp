#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "remest/config.hpp"
#include "remest/selftest.hpp"
#include "remest/whittle.hpp"

namespace fs = std::filesystem;
using namespace remest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSelftest = 3;

TransmissionModel transmission_from_flag(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("transmission must be kind:param, e.g. exponential:2.0");
    return parse_transmission(spec.substr(0, colon), std::stod(spec.substr(colon + 1)));
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, long seed_override,
                 int threads, bool trace) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    fs::create_directories(out_dir);

    auto rows = run_experiment(cfg, threads);
    std::ofstream summary(fs::path(out_dir) / "summary.csv", std::ios::binary);
    write_summary_csv(summary, cfg, rows);
    std::ofstream echo(fs::path(out_dir) / "config.txt", std::ios::binary);
    echo << serialize_config(cfg);

    if (trace) {
        // one trace file per run, replaying the exact simulation
        for (const auto& row : rows) {
            auto srcs = cfg.sources;
            if (cfg.sweep) {
                if (cfg.sweep->var == "sigma")
                    srcs[cfg.sweep->source].sigma = row.sweep_value;
                else
                    srcs[cfg.sweep->source].theta = row.sweep_value;
            }
            std::vector<TransmissionModel> tms(srcs.size(), *cfg.transmission);
            SimConfig scfg;
            scfg.horizon = cfg.horizon;
            scfg.step = cfg.step;
            scfg.warmup = cfg.warmup;
            scfg.seed = row.seed;
            scfg.table_points = cfg.table_points;
            scfg.table_mc_budget = cfg.table_mc_budget;
            char name[160];
            std::snprintf(name, sizeof name, "trace_%s_%g_r%d.csv", row.policy.c_str(),
                          row.sweep_value, row.replication);
            std::ofstream tf(fs::path(out_dir) / name, std::ios::binary);
            tf << "t,source,epsilon,delta,gamma,index,action\n";
            Policy pol = parse_policy(row.policy);
            run_sim(srcs, tms, cfg.channels, pol, scfg, nullptr, [&](const TraceRow& tr) {
                char line[200];
                std::snprintf(line, sizeof line, "%.6f,%d,%.9g,%.9g,%.9g,%.9g,%d\n", tr.t,
                              tr.source, tr.epsilon, tr.delta, tr.gamma, tr.index, tr.action);
                tf << line;
            });
        }
    }
    std::cout << "wrote " << (fs::path(out_dir) / "summary.csv").string() << " (" << rows.size()
              << " rows)\n";
    return kExitOk;
}

int cmd_index_curve(const SourceParams& p, const std::string& tm_spec, const std::string& mode_str,
                    double lo, double hi, int points, int mc, long seed,
                    const std::string& out_path) {
    TransmissionModel tm = transmission_from_flag(tm_spec);
    SamplerMode mode = mode_str == "signal_agnostic" ? SamplerMode::SignalAgnostic
                                                     : SamplerMode::SignalAware;
    IndexGridSpec grid{lo, hi, points};
    if (hi <= lo) grid = default_grid(mode, p, tm, points);
    auto table = build_index_table(0, mode, p, tm, grid, mc, static_cast<std::uint64_t>(seed));

    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file '" + out_path + "'");
    // zero crossings of the tabulated curve, marked up front
    for (std::size_t i = 0; i + 1 < table.grid().size(); ++i) {
        double a = table.values()[i], b = table.values()[i + 1];
        if (a < 0.0 && b >= 0.0) {
            double x = table.grid()[i] +
                       (table.grid()[i + 1] - table.grid()[i]) * (0.0 - a) / (b - a);
            char buf[80];
            std::snprintf(buf, sizeof buf, "# zero_crossing %.9g\n", x);
            os << buf;
            if (mode == SamplerMode::SignalAware) {
                std::snprintf(buf, sizeof buf, "# zero_crossing %.9g\n", -x);
                os << buf;
            }
        }
    }
    os << "state,alpha\n";
    for (std::size_t i = 0; i < table.grid().size(); ++i) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", table.grid()[i], table.values()[i]);
        os << buf;
    }
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_selftest(long seed) {
    auto results = run_selftest(static_cast<std::uint64_t>(seed));
    bool all = true;
    for (const auto& r : results) {
        std::printf("%-24s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
        all = all && r.pass;
    }
    return all ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-source remote estimation of Gauss-Markov processes: "
                 "threshold samplers, Whittle index policies, and a scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path, out = "out";
    long seed = -1;
    int threads = 1;
    bool trace = false;
    auto* sim = app.add_subcommand("simulate", "run an experiment config");
    sim->add_option("--config", config_path, "experiment config file")->required();
    sim->add_option("--out", out, "output directory");
    sim->add_option("--seed", seed, "override the config seed");
    sim->add_option("--threads", threads, "worker threads");
    sim->add_flag("--trace", trace, "write per-step trace CSVs");

    SourceParams p;
    std::string tm_spec = "exponential:2.0", mode_str = "signal_aware", curve_out = "curve.csv";
    double lo = 0.0, hi = 0.0;
    int points = 512, mc = 200000;
    long curve_seed = 1;
    auto* curve = app.add_subcommand("index-curve", "tabulate a Whittle index curve");
    curve->add_option("--theta", p.theta, "mean-reversion rate");
    curve->add_option("--mu", p.mu, "mean level");
    curve->add_option("--sigma", p.sigma, "diffusion coefficient");
    curve->add_option("--weight", p.weight, "source weight");
    curve->add_option("--transmission", tm_spec, "kind:param (constant|exponential|lognormal)");
    curve->add_option("--mode", mode_str, "signal_aware | signal_agnostic");
    curve->add_option("--lo", lo, "grid lower end");
    curve->add_option("--hi", hi, "grid upper end (0 = default span)");
    curve->add_option("--points", points, "grid points");
    curve->add_option("--mc", mc, "Monte-Carlo budget");
    curve->add_option("--seed", curve_seed, "draw seed");
    curve->add_option("--out", curve_out, "output CSV path");

    long st_seed = 1;
    auto* st = app.add_subcommand("selftest", "run built-in oracle checks");
    st->add_option("--seed", st_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out, seed, threads, trace);
        if (curve->parsed())
            return cmd_index_curve(p, tm_spec, mode_str, lo, hi, points, mc, curve_seed,
                                   curve_out);
        if (st->parsed()) return cmd_selftest(st_seed);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
