#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "remest/sim.hpp"

namespace remest {

struct SweepSpec {
    std::string var;  // "sigma" or "theta"
    int source = 0;   // 0-based
    std::vector<double> values;
    bool operator==(const SweepSpec&) const = default;
};

// Experiment description read from the flat key/value config format; the
// grammar is documented in the README.
struct ExperimentConfig {
    std::vector<SourceParams> sources;
    std::optional<TransmissionModel> transmission;
    int channels = 1;
    std::vector<Policy> policies;
    std::optional<SweepSpec> sweep;
    double horizon = 0.0;
    double step = 0.0;     // <= 0: auto (0.01 min E[Y])
    double warmup = -1.0;  // < 0: auto (5 max E[Y])
    int replications = 1;
    std::uint64_t seed = 1;
    int table_points = 512;
    int table_mc_budget = 200'000;

    void validate() const;  // throws ConfigError
    bool operator==(const ExperimentConfig&) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

std::string policy_name(const Policy& p);
Policy parse_policy(const std::string& token);
TransmissionModel parse_transmission(const std::string& kind, double param);

// One summary row per (policy, sweep point, replication).
struct RunRow {
    std::string policy;
    std::string sweep_var;
    double sweep_value = 0.0;
    int replication = 0;
    std::uint64_t seed = 0;
    SimReport report;
};

std::vector<RunRow> run_experiment(const ExperimentConfig& cfg, int threads = 1);

// CSV schema: policy, sweep_var, sweep_value, replication, seed,
// total_weighted_mse, per_source_mse_1..N, samples_sent_1..N. '.' decimals,
// '\n' line ends, header mandatory.
void write_summary_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<RunRow>& rows);

}  // namespace remest
