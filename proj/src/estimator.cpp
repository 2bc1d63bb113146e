#include "remest/estimator.hpp"

#include <cmath>

namespace remest {

double mmse_estimate(const SampleRecord& last_sample, double t, const SourceParams& p) {
    if (t < last_sample.D)
        throw std::domain_error("mmse_estimate: t precedes the sample's delivery time");
    if (std::fabs(p.theta) < kThetaBranchTol) return last_sample.value;
    double decay = std::exp(-p.theta * (t - last_sample.S));
    return last_sample.value * decay + p.mu * (1.0 - decay);
}

BanditState advance_error(const BanditState& state, double x_true, double t,
                          const SampleRecord& last_sample, const SourceParams& p) {
    BanditState out = state;
    out.xhat = mmse_estimate(last_sample, t, p);
    out.epsilon = x_true - out.xhat;
    out.delta = t - last_sample.S;
    return out;
}

double age_penalty(double delta, const SourceParams& p) {
    if (!(delta >= 0.0)) throw std::domain_error("age_penalty: delta must be >= 0");
    double s2 = p.sigma * p.sigma;
    if (std::fabs(p.theta) < kThetaBranchTol) return s2 * delta;
    return s2 * delta * em1_over(2.0 * p.theta * delta);
}

}  // namespace remest
