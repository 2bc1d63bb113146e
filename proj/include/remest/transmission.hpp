#pragma once

#include <memory>

#include "remest/rng.hpp"
#include "remest/types.hpp"

namespace remest {

enum class DelayKind { Constant, Exponential, NormalizedLognormal };

// i.i.d. transmission-time distribution Y with strictly positive samples and
// finite mean. The normalized log-normal is Y = e^{rho Q}/E[e^{rho Q}] with Q
// standard normal, so E[Y] = 1.
class TransmissionModel {
public:
    static TransmissionModel constant(double c);
    static TransmissionModel exponential(double mean);
    static TransmissionModel normalized_lognormal(double rho);

    DelayKind kind() const { return kind_; }
    double param() const { return param_; }
    double mean() const { return mean_; }

    double sample(RngStream& rng) const;

    // E[e^{-2 theta Y}]. Closed form for constant and exponential; a cached
    // fixed-seed Monte-Carlo estimate for the log-normal. Throws for the
    // exponential when the integral diverges (2*theta <= -1/mean).
    double moment_e2theta(double theta) const;

    // True when E[e^{-2 theta Y}] is infinite (log-normal with theta < 0).
    bool moment_diverges(double theta) const;

    // Same moment under the capped law Y ^ cap (Monte-Carlo, cached).
    double moment_e2theta_capped(double theta, double cap) const;

    double quantile(double p) const;

    bool operator==(const TransmissionModel& o) const {
        return kind_ == o.kind_ && param_ == o.param_;
    }

private:
    TransmissionModel(DelayKind kind, double param);

    DelayKind kind_;
    double param_;
    double mean_;
    struct MomentCache;
    std::shared_ptr<MomentCache> cache_;  // shared across copies
};

// Number of fixed-seed draws behind Monte-Carlo moments.
inline constexpr int kMomentMcDraws = 1'000'000;

// Quantile at which the service law is capped when evaluating index and
// threshold expectations for a source whose exponential moment E[e^{-2theta Y}]
// diverges (log-normal delays with theta < 0). The divergent tail otherwise
// swamps every per-cycle expectation and the resulting indices never
// activate the source; see README.
inline constexpr double kTailCapQuantile = 0.99;

// The cap for (p, tm) pairs with a divergent moment; +inf otherwise.
double tail_cap(double theta, const TransmissionModel& tm);

// moment_e2theta under the capped law when divergent, the plain moment
// otherwise.
double effective_moment(double theta, const TransmissionModel& tm);

double inverse_normal_cdf(double p);

}  // namespace remest
