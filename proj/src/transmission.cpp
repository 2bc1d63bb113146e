#include "remest/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace remest {

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inverse_normal_cdf: p must be in (0, 1)");
    // Acklam's rational approximation, then one Halley step on erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

struct TransmissionModel::MomentCache {
    std::mutex mu;
    std::map<std::pair<double, double>, double> values;  // (theta, cap) -> moment
};

TransmissionModel::TransmissionModel(DelayKind kind, double param)
    : kind_(kind), param_(param), cache_(std::make_shared<MomentCache>()) {
    switch (kind_) {
        case DelayKind::Constant:
        case DelayKind::Exponential:
            mean_ = param_;
            break;
        case DelayKind::NormalizedLognormal:
            mean_ = 1.0;
            break;
    }
}

TransmissionModel TransmissionModel::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("TransmissionModel: constant delay must be finite and > 0");
    return TransmissionModel(DelayKind::Constant, c);
}

TransmissionModel TransmissionModel::exponential(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("TransmissionModel: exponential mean must be finite and > 0");
    return TransmissionModel(DelayKind::Exponential, mean);
}

TransmissionModel TransmissionModel::normalized_lognormal(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("TransmissionModel: log-normal rho must be finite and > 0");
    return TransmissionModel(DelayKind::NormalizedLognormal, rho);
}

double TransmissionModel::sample(RngStream& rng) const {
    switch (kind_) {
        case DelayKind::Constant:
            return param_;
        case DelayKind::Exponential:
            return -param_ * std::log(rng.uniform());
        case DelayKind::NormalizedLognormal:
            return std::exp(param_ * rng.normal() - 0.5 * param_ * param_);
    }
    return param_;
}

bool TransmissionModel::moment_diverges(double theta) const {
    return kind_ == DelayKind::NormalizedLognormal && theta < -kThetaBranchTol;
}

double TransmissionModel::moment_e2theta(double theta) const {
    return moment_e2theta_capped(theta, std::numeric_limits<double>::infinity());
}

double TransmissionModel::moment_e2theta_capped(double theta, double cap) const {
    if (std::fabs(theta) < kThetaBranchTol) return 1.0;
    bool capped = std::isfinite(cap);
    switch (kind_) {
        case DelayKind::Constant:
            return std::exp(-2.0 * theta * (capped ? std::min(param_, cap) : param_));
        case DelayKind::Exponential: {
            if (!capped) {
                if (2.0 * theta <= -1.0 / param_)
                    throw std::domain_error(
                        "moment_e2theta: E[e^{-2 theta Y}] diverges for this exponential model");
                return 1.0 / (1.0 + 2.0 * theta * param_);
            }
            break;  // capped exponential falls through to Monte-Carlo
        }
        case DelayKind::NormalizedLognormal:
            break;
    }
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto key = std::make_pair(theta, cap);
    auto it = cache_->values.find(key);
    if (it != cache_->values.end()) return it->second;
    RngStream rng(0x5eedULL, 0);  // fixed seed: the cached value is part of the model
    double sum = 0.0;
    for (int i = 0; i < kMomentMcDraws; ++i) {
        double y = sample(rng);
        if (capped) y = std::min(y, cap);
        sum += std::exp(-2.0 * theta * y);
    }
    double v = sum / kMomentMcDraws;
    cache_->values.emplace(key, v);
    return v;
}

double tail_cap(double theta, const TransmissionModel& tm) {
    return tm.moment_diverges(theta) ? tm.quantile(kTailCapQuantile)
                                     : std::numeric_limits<double>::infinity();
}

double effective_moment(double theta, const TransmissionModel& tm) {
    if (std::fabs(theta) < kThetaBranchTol) return 1.0;
    if (tm.moment_diverges(theta))
        return tm.moment_e2theta_capped(theta, tm.quantile(kTailCapQuantile));
    return tm.moment_e2theta(theta);
}

double TransmissionModel::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("TransmissionModel::quantile: p must be in (0, 1)");
    switch (kind_) {
        case DelayKind::Constant:
            return param_;
        case DelayKind::Exponential:
            return -param_ * std::log1p(-p);
        case DelayKind::NormalizedLognormal:
            return std::exp(param_ * inverse_normal_cdf(p) - 0.5 * param_ * param_);
    }
    return param_;
}

}  // namespace remest
