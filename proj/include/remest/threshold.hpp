#pragma once

#include "remest/cycle_kit.hpp"
#include "remest/transmission.hpp"
#include "remest/types.hpp"

namespace remest {

enum class SamplerMode { SignalAware, SignalAgnostic };

// Solution of the per-bandit problem at activation cost lambda: beta is the
// optimal long-run average cost and v the sampling threshold (an |error|
// level in signal-aware mode, an AoI level in signal-agnostic mode).
struct ThresholdSolution {
    double beta = 0.0;
    double v = 0.0;
    double lambda = 0.0;
    SamplerMode mode = SamplerMode::SignalAware;
};

struct SolverConfig {
    int mc_budget = 200'000;
    double beta_rel_tol = 1e-6;
    std::uint64_t seed = 1;
    int max_expand = 200;
};

struct CycleEstimate {
    double et = 0.0;  // expected cycle length
    double ei = 0.0;  // expected per-cycle penalty integral
    double et_se = 0.0;
    double ei_se = 0.0;
};

// Three-branch closed form of the sampling threshold for a given beta;
// beta below the zero-wait boundary clamps to v = 0, beta at or above
// w sigma^2/(2 theta) (theta > 0 only) is out of range.
double threshold_of_beta(double beta, const SourceParams& p, const TransmissionModel& tm);

// AoI analogue: the smallest delta with w E[p(delta + Y)] >= beta.
double age_threshold_of_beta(double beta, const SourceParams& p, const TransmissionModel& tm);

CycleEstimate per_cycle_expectations(double v, const SourceParams& p, const TransmissionModel& tm,
                                     int mc_budget, RngStream rng);
CycleEstimate per_cycle_expectations_age(double dbar, const SourceParams& p,
                                         const TransmissionModel& tm, int mc_budget,
                                         RngStream rng);

// Root of  w E[int penalty] - beta E[cycle] + lambda E[Y] = 0  by bisection
// on beta; the left side is strictly decreasing under a fixed draw set.
ThresholdSolution solve_beta(double lambda, const SourceParams& p, const TransmissionModel& tm,
                             const SolverConfig& cfg = {});
ThresholdSolution solve_beta_age(double lambda, const SourceParams& p,
                                 const TransmissionModel& tm, const SolverConfig& cfg = {});

// Shared internals, reused by the kit-based solvers below and by the Whittle
// evaluators (identical expectation machinery keeps the fixed-point
// identities exact).
double threshold_of_beta_with(double beta, const SourceParams& p, double moment,
                              double mean_delay);
double age_threshold_of_beta_with(double beta, const SourceParams& p, double moment,
                                  double mean_delay);
ThresholdSolution solve_beta_with(double lambda, const CycleKit& kit, const SolverConfig& cfg);
ThresholdSolution solve_beta_age_with(double lambda, const AgeKit& kit, const SolverConfig& cfg);

}  // namespace remest
