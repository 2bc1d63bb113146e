#pragma once

#include <cstdint>

#include "remest/rng.hpp"
#include "remest/types.hpp"

namespace remest {

// Exact one-step transition of the Gauss-Markov process: X_{t+dt} given
// X_t = x is Gaussian with mean x e^{-theta dt} + mu (1 - e^{-theta dt}) and
// variance sigma^2 dt (1 - e^{-2 theta dt})/(2 theta dt). Valid for any dt;
// there is no Euler error.
double step_process(double x, double dt, const SourceParams& p, RngStream& rng);

// Variance of the centered process O_t (zero start, mu = 0) at time t >= 0;
// covers all three theta regimes.
double centered_variance(double t, const SourceParams& p);

// One draw of O_t.
double sample_O_at(double t, const SourceParams& p, RngStream& rng);

struct HittingResult {
    double tau;          // first grid time with |O| >= threshold
    double endpoint;     // O at exit
    double integral_sq;  // trapezoidal estimate of int_0^tau O^2 ds
};

inline constexpr std::uint64_t kHittingStepBudget = 100'000'000;

// Simulates O from `start` on a dt grid until |O| >= threshold. Crossings are
// detected at grid points only, a known positive bias of order sqrt(dt).
// Throws NumericError if the step budget is exhausted.
HittingResult hitting_time_mc(double start, double threshold, const SourceParams& p, double dt,
                              RngStream& rng, std::uint64_t step_budget = kHittingStepBudget);

}  // namespace remest
