#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "remest/cycle_kit.hpp"
#include "remest/threshold.hpp"

namespace remest {

// Index of a source whose sample is in flight; ordered below every finite
// value and filtered out by the >= 0 activation guard.
inline constexpr double kPassiveIndex = -std::numeric_limits<double>::infinity();

// The Whittle index of a dummy bandit, and hence the activation floor.
constexpr double dummy_index() { return 0.0; }

// Kit-backed evaluator; one fixed draw set serves every state, so curves are
// smooth in the state and deterministic per seed.
class WhittleEvaluator {
public:
    WhittleEvaluator(const SourceParams& p, const TransmissionModel& tm, SamplerMode mode,
                     int mc_budget, std::uint64_t seed);

    double index(double state, double gamma) const;  // state is |eps| or delta
    double index_se(double state) const;
    SamplerMode mode() const { return mode_; }
    const SourceParams& params() const { return aware_ ? aware_->params() : age_->params(); }

    const CycleKit* cycle_kit() const { return aware_.get(); }
    const AgeKit* age_kit() const { return age_.get(); }

private:
    SamplerMode mode_;
    std::shared_ptr<const CycleKit> aware_;
    std::shared_ptr<const AgeKit> age_;
    double cfac(double abs_eps) const;
};

double whittle_signal_aware(double eps, double gamma, const SourceParams& p,
                            const TransmissionModel& tm, int mc_budget, RngStream rng);
double whittle_age(double delta, double gamma, const SourceParams& p,
                   const TransmissionModel& tm, int mc_budget, RngStream rng);

struct IndexGridSpec {
    double lo = 0.0;
    double hi = 0.0;   // 0: use the default span for the mode
    int points = 512;
};

// Spec of the default grids: |eps| in [0, 6 sigma sqrt(max(1, 1/(2|theta|)))]
// for signal-aware tables, delta in [0, 10 E[Y]] for age tables.
IndexGridSpec default_grid(SamplerMode mode, const SourceParams& p, const TransmissionModel& tm,
                           int points = 512);

// Monotone (isotonically smoothed) tabulation of index(state, 0) on a grid
// with common random numbers; lookups interpolate linearly and re-invoke the
// exact evaluator beyond the grid.
class IndexTable {
public:
    double lookup(double state) const;
    double lookup(double state, double gamma) const {
        return gamma > 0.0 ? kPassiveIndex : lookup(state);
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    SamplerMode mode() const { return mode_; }
    int source = 0;
    int mc_budget = 0;
    std::uint64_t seed = 0;

private:
    friend IndexTable build_index_table(int, SamplerMode, const SourceParams&,
                                        const TransmissionModel&, const IndexGridSpec&, int,
                                        std::uint64_t);
    friend IndexTable read_table_csv(std::istream&);
    std::vector<double> grid_, values_;
    SamplerMode mode_ = SamplerMode::SignalAware;
    std::shared_ptr<const WhittleEvaluator> evaluator_;  // null for imported tables
};

// Throws NumericError when the raw values violate monotonicity beyond what
// the Monte-Carlo noise at the probe points explains (budget too small).
IndexTable build_index_table(int source, SamplerMode mode, const SourceParams& p,
                             const TransmissionModel& tm, const IndexGridSpec& grid = {},
                             int mc_budget = 200'000, std::uint64_t seed = 1);

// CSV export/import with columns (state, alpha). Imported tables carry no
// exact evaluator, so lookups beyond the grid clamp to the edge values.
void write_table_csv(std::ostream& os, const IndexTable& table);
IndexTable read_table_csv(std::istream& is);

}  // namespace remest
