#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "remest/estimator.hpp"
#include "remest/transmission.hpp"
#include "remest/whittle.hpp"

namespace remest {

enum class PolicyKind { WhittleSignalAware, WhittleAge, MafZw, SingleThreshold };

struct Policy {
    PolicyKind kind = PolicyKind::WhittleSignalAware;
    double v = 0.0;  // threshold for SingleThreshold
};

struct ChannelState {
    int id = 0;
    bool busy = false;
    int serving = -1;
    double remaining = 0.0;
};

struct SimConfig {
    double horizon = 0.0;
    double step = 0.0;    // <= 0: default 0.01 * min E[Y]
    double warmup = -1.0; // < 0: default 5 * max E[Y]
    std::uint64_t seed = 1;
    int table_points = 512;
    int table_mc_budget = 200'000;
};

struct SimReport {
    double horizon = 0.0, warmup = 0.0, step = 0.0;
    double total_weighted_mse = 0.0;
    std::vector<double> per_source_mse;          // w_n x time-average eps_n^2
    std::vector<double> per_source_age_penalty;  // w_n x time-average p_n(delta_n)
    std::vector<long long> sample_counts;
};

struct TraceRow {
    double t = 0.0;
    int source = 0;
    double epsilon = 0.0, delta = 0.0, gamma = 0.0, index = 0.0;
    int action = 0;
};
using TraceSink = std::function<void(const TraceRow&)>;

// Greedy channel assignment: idle channels in id order each take the
// highest-index unserved source, subject to the >= 0 activation floor in the
// Whittle modes (MAF-ZW activates unconditionally by maximum AoI). Sources
// with gamma > 0 are never assigned.
std::vector<std::pair<int, int>> decision_step(const std::vector<BanditState>& states,
                                               const std::vector<ChannelState>& channels,
                                               const std::vector<const IndexTable*>& tables,
                                               const Policy& policy);

// Discrete-time multi-source, multi-channel scheduling simulation. Tables are
// required for the Whittle policies; pass nullptr to have them built
// internally from cfg. The estimation error of each source is advanced in
// closed form (it obeys d eps = -theta eps dt + sigma dW between deliveries),
// so long horizons are exact for unstable sources as well.
SimReport run_sim(const std::vector<SourceParams>& sources,
                  const std::vector<TransmissionModel>& tms, int channels, const Policy& policy,
                  const SimConfig& cfg, const std::vector<const IndexTable*>* tables = nullptr,
                  const TraceSink& trace = nullptr);

// Builds one table per source for the given mode (seed is combined with the
// source id).
std::vector<IndexTable> prepare_tables(const std::vector<SourceParams>& sources,
                                       const std::vector<TransmissionModel>& tms,
                                       SamplerMode mode, int points, int mc_budget,
                                       std::uint64_t seed);

}  // namespace remest
