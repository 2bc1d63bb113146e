#pragma once

#include <cstdint>
#include <vector>

#include "remest/transmission.hpp"
#include "remest/types.hpp"

namespace remest {

// Common-random-number evaluators of the per-cycle expectations of the
// signal-aware threshold policy. For threshold v, a cycle runs from one
// delivery to the next: wait until |error| >= v, then transmit for a fresh Y.
// With O_Y the error at a delivery,
//
//   E[cycle length]  = E[Y] + E[(R1(v) - R1(|O_Y|))^+]
//   E[int error^2]   = E[R3(Y)] + E[(R2(v) - R2(|O_Y|))^+]
//                      + gbar * (sigma^2 gbar + E[(v^2 - O_Y^2)^+])
//
// where gbar = E[1 - e^{-2 theta Y}]/(2 theta). These follow from the exit
// and fixed-time Dynkin identities of R1/R2; replacing the heavy-tailed
// R(O_Y) terms by their exact means leaves bounded Monte-Carlo integrands
// that are nondecreasing in v draw by draw, so root finding in v or beta is
// numerically monotone under a fixed draw set.
//
// When the model's exponential moment diverges (log-normal with theta < 0),
// every expectation is taken under the capped law Y ^ quantile(kTailCapQuantile);
// see README.
class CycleKit {
public:
    CycleKit(const SourceParams& p, const TransmissionModel& tm, int n, RngStream rng);

    double et(double v) const;  // expected cycle length at threshold v
    double ei(double v) const;  // expected per-cycle integral of error^2

    // Standard errors of the two estimators at threshold v (one O(n) pass).
    void standard_errors(double v, double* et_se, double* ei_se) const;

    // Standard error of alpha = (w/E[Y]) (et(v) cfac - ei(v)) at threshold v.
    double alpha_se(double v, double cfac) const;

    double mean_delay() const { return ey_; }
    double moment() const { return moment_; }  // E[e^{-2 theta Y}]
    double gbar() const { return gbar_; }
    double beta_floor() const;  // zero-wait validity boundary w sigma^2 gbar

    bool capped() const { return capped_; }
    double cap() const { return cap_; }

    const SourceParams& params() const { return params_; }

private:
    SourceParams params_;
    bool capped_ = false;
    double cap_;
    double ey_, ey2_, moment_, gbar_, er3_;
    int n_;
    std::vector<double> abs_o_;   // |O_Y| ascending
    std::vector<double> pref_r1_, pref_r2_, pref_o2_;  // prefix sums over abs_o_
};

// Same role for the signal-agnostic (age) policy. A cycle waits until the
// AoI reaches dbar, then transmits:
//
//   E[cycle length] = E[Y] + E[(dbar - Y)^+]
//   E[int p(age)]   = E[h(Y)] + E[(h(dbar) - h(Y))^+] - E[R3(Y)]
//   E[p(delta + Y')] closed via the exponential moment,
//
// with h(x) = E_{Y'}[R3(x + Y')]. When the model's exponential moment
// diverges (log-normal with theta < 0), every expectation here is taken
// under the capped law Y ^ quantile(kAgeTailQuantile); see README.
class AgeKit {
public:
    AgeKit(const SourceParams& p, const TransmissionModel& tm, int n, RngStream rng);

    double et(double dbar) const;
    double eip(double dbar) const;
    double ep_at(double delta) const;  // E[p(delta + Y')]

    double h_of(double x) const;  // E_{Y'}[R3(x + Y')]

    double mean_delay() const { return ey_; }
    double moment() const { return moment_; }
    double beta_floor() const;

    void standard_errors(double dbar, double* et_se, double* eip_se) const;
    double alpha_se(double dbar, double ep) const;

    bool capped() const { return capped_; }
    double cap() const { return cap_; }

    const SourceParams& params() const { return params_; }

private:
    SourceParams params_;
    bool capped_ = false;
    double cap_;
    double ey_, ey2_, moment_, gbar_, er3_, eh_;
    int n_;
    std::vector<double> y_;            // (capped) delays ascending
    std::vector<double> pref_y_, pref_h_;
};

}  // namespace remest
