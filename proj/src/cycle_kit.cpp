#include "remest/cycle_kit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "remest/process.hpp"
#include "remest/special.hpp"

namespace remest {

namespace {

double second_moment(const TransmissionModel& tm) {
    switch (tm.kind()) {
        case DelayKind::Constant:
            return tm.param() * tm.param();
        case DelayKind::Exponential:
            return 2.0 * tm.param() * tm.param();
        case DelayKind::NormalizedLognormal:
            return std::exp(tm.param() * tm.param());
    }
    return tm.param() * tm.param();
}

}  // namespace

CycleKit::CycleKit(const SourceParams& p, const TransmissionModel& tm, int n, RngStream rng)
    : params_(p), n_(n) {
    p.validate();
    if (n < 1000) throw std::invalid_argument("CycleKit: mc budget must be >= 1000");
    capped_ = tm.moment_diverges(p.theta);
    cap_ = tail_cap(p.theta, tm);
    moment_ = effective_moment(p.theta, tm);

    abs_o_.resize(n_);
    std::vector<double> ys(n_);
    for (int i = 0; i < n_; ++i) {
        double y = std::min(tm.sample(rng), cap_);
        ys[i] = y;
        abs_o_[i] = std::fabs(std::sqrt(centered_variance(y, p)) * rng.normal());
    }
    if (capped_) {
        ey_ = std::accumulate(ys.begin(), ys.end(), 0.0) / n_;
        double s = 0;
        for (double y : ys) s += y * y;
        ey2_ = s / n_;
    } else {
        ey_ = tm.mean();
        ey2_ = second_moment(tm);
    }
    bool wiener = std::fabs(p.theta) < kThetaBranchTol;
    double s2 = p.sigma * p.sigma;
    gbar_ = wiener ? ey_ : (1.0 - moment_) / (2.0 * p.theta);
    er3_ = wiener ? 0.5 * s2 * ey2_ : s2 / (2.0 * p.theta) * (ey_ - gbar_);
    std::sort(abs_o_.begin(), abs_o_.end());
    pref_r1_.resize(n_ + 1, 0.0);
    pref_r2_.resize(n_ + 1, 0.0);
    pref_o2_.resize(n_ + 1, 0.0);
    for (int i = 0; i < n_; ++i) {
        pref_r1_[i + 1] = pref_r1_[i] + special::r1(abs_o_[i], p);
        pref_r2_[i + 1] = pref_r2_[i] + special::r2(abs_o_[i], p);
        pref_o2_[i + 1] = pref_o2_[i] + abs_o_[i] * abs_o_[i];
    }
}

double CycleKit::beta_floor() const {
    return params_.weight * params_.sigma * params_.sigma * gbar_;
}

double CycleKit::et(double v) const {
    if (!(v >= 0.0)) throw std::domain_error("CycleKit::et: threshold must be >= 0");
    if (v == 0.0) return ey_;
    auto nb = std::lower_bound(abs_o_.begin(), abs_o_.end(), v) - abs_o_.begin();
    double r1v = special::r1(v, params_);
    return ey_ + (static_cast<double>(nb) * r1v - pref_r1_[nb]) / n_;
}

double CycleKit::ei(double v) const {
    if (!(v >= 0.0)) throw std::domain_error("CycleKit::ei: threshold must be >= 0");
    double s2 = params_.sigma * params_.sigma;
    double base = er3_ + gbar_ * s2 * gbar_;
    if (v == 0.0) return base;
    auto nb = std::lower_bound(abs_o_.begin(), abs_o_.end(), v) - abs_o_.begin();
    double r2v = special::r2(v, params_);
    double t2 = (static_cast<double>(nb) * r2v - pref_r2_[nb]) / n_;
    double t3 = (static_cast<double>(nb) * v * v - pref_o2_[nb]) / n_;
    return base + t2 + gbar_ * t3;
}

void CycleKit::standard_errors(double v, double* et_se, double* ei_se) const {
    double r1v = v > 0.0 ? special::r1(v, params_) : 0.0;
    double r2v = v > 0.0 ? special::r2(v, params_) : 0.0;
    double sx = 0, sxx = 0, sy = 0, syy = 0;
    for (int i = 0; i < n_; ++i) {
        double o = abs_o_[i];
        if (o >= v) break;  // sorted; all remaining contribute zero
        double x = r1v - (pref_r1_[i + 1] - pref_r1_[i]);
        double y = r2v - (pref_r2_[i + 1] - pref_r2_[i]) + gbar_ * (v * v - o * o);
        sx += x;
        sxx += x * x;
        sy += y;
        syy += y * y;
    }
    double mx = sx / n_, my = sy / n_;
    if (et_se) *et_se = std::sqrt(std::max(0.0, sxx / n_ - mx * mx) / n_);
    if (ei_se) *ei_se = std::sqrt(std::max(0.0, syy / n_ - my * my) / n_);
}

double CycleKit::alpha_se(double v, double cfac) const {
    double r1v = v > 0.0 ? special::r1(v, params_) : 0.0;
    double r2v = v > 0.0 ? special::r2(v, params_) : 0.0;
    double su = 0, suu = 0;
    for (int i = 0; i < n_; ++i) {
        double o = abs_o_[i];
        if (o >= v) break;
        double x = r1v - (pref_r1_[i + 1] - pref_r1_[i]);
        double y = r2v - (pref_r2_[i + 1] - pref_r2_[i]) + gbar_ * (v * v - o * o);
        double u = cfac * x - y;
        su += u;
        suu += u * u;
    }
    double mu = su / n_;
    double var = std::max(0.0, suu / n_ - mu * mu) / n_;
    double scale = params_.weight / ey_;
    return scale * std::sqrt(var);
}

AgeKit::AgeKit(const SourceParams& p, const TransmissionModel& tm, int n, RngStream rng)
    : params_(p), n_(n) {
    p.validate();
    if (n < 1000) throw std::invalid_argument("AgeKit: mc budget must be >= 1000");
    capped_ = tm.moment_diverges(p.theta);
    cap_ = tail_cap(p.theta, tm);
    moment_ = effective_moment(p.theta, tm);

    y_.resize(n_);
    for (int i = 0; i < n_; ++i) y_[i] = std::min(tm.sample(rng), cap_);
    std::sort(y_.begin(), y_.end());

    if (capped_) {
        ey_ = std::accumulate(y_.begin(), y_.end(), 0.0) / n_;
        double s = 0;
        for (double y : y_) s += y * y;
        ey2_ = s / n_;
    } else {
        ey_ = tm.mean();
        ey2_ = second_moment(tm);
    }
    bool wiener = std::fabs(p.theta) < kThetaBranchTol;
    double s2 = p.sigma * p.sigma;
    gbar_ = wiener ? ey_ : (1.0 - moment_) / (2.0 * p.theta);
    er3_ = wiener ? 0.5 * s2 * ey2_ : s2 / (2.0 * p.theta) * (ey_ - gbar_);

    pref_y_.resize(n_ + 1, 0.0);
    pref_h_.resize(n_ + 1, 0.0);
    for (int i = 0; i < n_; ++i) {
        pref_y_[i + 1] = pref_y_[i] + y_[i];
        pref_h_[i + 1] = pref_h_[i] + h_of(y_[i]);
    }
    eh_ = pref_h_[n_] / n_;
}

double AgeKit::h_of(double x) const {
    double s2 = params_.sigma * params_.sigma;
    if (std::fabs(params_.theta) < kThetaBranchTol)
        return 0.5 * s2 * (x * x + 2.0 * x * ey_ + ey2_);
    double th = params_.theta;
    return s2 / (2.0 * th) * (x + ey_ - (1.0 - std::exp(-2.0 * th * x) * moment_) / (2.0 * th));
}

double AgeKit::ep_at(double delta) const {
    if (!(delta >= 0.0)) throw std::domain_error("AgeKit::ep_at: delta must be >= 0");
    double s2 = params_.sigma * params_.sigma;
    if (std::fabs(params_.theta) < kThetaBranchTol) return s2 * (delta + ey_);
    double th = params_.theta;
    return s2 / (2.0 * th) * (1.0 - std::exp(-2.0 * th * delta) * moment_);
}

double AgeKit::beta_floor() const {
    return params_.weight * params_.sigma * params_.sigma * gbar_;
}

double AgeKit::et(double dbar) const {
    if (!(dbar >= 0.0)) throw std::domain_error("AgeKit::et: threshold must be >= 0");
    if (dbar == 0.0) return ey_;
    auto nb = std::lower_bound(y_.begin(), y_.end(), dbar) - y_.begin();
    return ey_ + (static_cast<double>(nb) * dbar - pref_y_[nb]) / n_;
}

double AgeKit::eip(double dbar) const {
    if (!(dbar >= 0.0)) throw std::domain_error("AgeKit::eip: threshold must be >= 0");
    if (dbar == 0.0) return eh_ - er3_;
    auto nb = std::lower_bound(y_.begin(), y_.end(), dbar) - y_.begin();
    double hd = h_of(dbar);
    return eh_ + (static_cast<double>(nb) * hd - pref_h_[nb]) / n_ - er3_;
}

void AgeKit::standard_errors(double dbar, double* et_se, double* eip_se) const {
    double hd = dbar > 0.0 ? h_of(dbar) : 0.0;
    double sx = 0, sxx = 0, sy = 0, syy = 0;
    for (int i = 0; i < n_; ++i) {
        if (y_[i] >= dbar) break;
        double x = dbar - y_[i];
        double y = hd - (pref_h_[i + 1] - pref_h_[i]);
        sx += x;
        sxx += x * x;
        sy += y;
        syy += y * y;
    }
    double mx = sx / n_, my = sy / n_;
    if (et_se) *et_se = std::sqrt(std::max(0.0, sxx / n_ - mx * mx) / n_);
    if (eip_se) *eip_se = std::sqrt(std::max(0.0, syy / n_ - my * my) / n_);
}

double AgeKit::alpha_se(double dbar, double ep) const {
    double hd = dbar > 0.0 ? h_of(dbar) : 0.0;
    double su = 0, suu = 0;
    for (int i = 0; i < n_; ++i) {
        if (y_[i] >= dbar) break;
        double u = ep * (dbar - y_[i]) - (hd - (pref_h_[i + 1] - pref_h_[i]));
        su += u;
        suu += u * u;
    }
    double mu = su / n_;
    double var = std::max(0.0, suu / n_ - mu * mu) / n_;
    return params_.weight / ey_ * std::sqrt(var);
}

}  // namespace remest
