#pragma once

#include "remest/types.hpp"

namespace remest {

// One delivered sample. The optimal policies generate and submit in the same
// instant, so S = G and D = G + Y.
struct SampleRecord {
    int source = 0;
    double S = 0.0;      // sampling time
    double G = 0.0;      // transmission start
    double D = 0.0;      // delivery time
    double value = 0.0;  // X at S
};

// Per-source runtime state.
struct BanditState {
    double epsilon = 0.0;  // estimation error X_t - xhat_t
    double delta = 0.0;    // AoI: t - S of freshest delivered sample
    double gamma = 0.0;    // service-elapsed time; > 0 iff a sample is in flight
    double xhat = 0.0;     // current MMSE estimate
};

// Conditional-mean estimate of X_t from the freshest delivered sample.
double mmse_estimate(const SampleRecord& last_sample, double t, const SourceParams& p);

// Recomputes (epsilon, delta, xhat) at time t against the true value.
BanditState advance_error(const BanditState& state, double x_true, double t,
                          const SampleRecord& last_sample, const SourceParams& p);

// Mean-squared error at age delta under any signal-agnostic policy:
// p(delta) = sigma^2 (1 - e^{-2 theta delta})/(2 theta), sigma^2 delta at
// theta = 0. Strictly increasing for every theta.
double age_penalty(double delta, const SourceParams& p);

}  // namespace remest
