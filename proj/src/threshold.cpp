#include "remest/threshold.hpp"

#include <cmath>
#include <limits>

#include "remest/special.hpp"

namespace remest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double beta_cap(const SourceParams& p) {
    if (p.theta > kThetaBranchTol)
        return p.weight * p.sigma * p.sigma / (2.0 * p.theta);
    return kInf;
}

}  // namespace

double threshold_of_beta_with(double beta, const SourceParams& p, double moment,
                              double mean_delay) {
    p.validate();
    if (!std::isfinite(beta)) throw std::domain_error("threshold_of_beta: beta must be finite");
    double w = p.weight, s2 = p.sigma * p.sigma;
    if (std::fabs(p.theta) < kThetaBranchTol) {
        double rad = 3.0 * (beta - w * s2 * mean_delay) / w;
        return rad <= 0.0 ? 0.0 : std::sqrt(rad);
    }
    double c = w * s2 / (2.0 * p.theta);
    if (p.theta > 0.0) {
        if (beta >= c)
            throw std::domain_error(
                "threshold_of_beta: theta > 0 branch requires beta < w*sigma^2/(2*theta)");
        double arg = c * moment / (c - beta);
        if (arg <= 1.0) return 0.0;  // below the zero-wait boundary
        return p.sigma / std::sqrt(p.theta) * special::q_inverse(arg);
    }
    // theta < 0: c < 0 and c - beta < 0, the ratio is positive
    double arg = c * moment / (c - beta);
    if (arg >= 1.0) return 0.0;
    if (arg <= 0.0)
        throw std::domain_error("threshold_of_beta: theta < 0 branch requires beta > w*sigma^2/(2*theta)");
    return p.sigma / std::sqrt(-p.theta) * special::k_inverse(arg);
}

double threshold_of_beta(double beta, const SourceParams& p, const TransmissionModel& tm) {
    return threshold_of_beta_with(beta, p, effective_moment(p.theta, tm), tm.mean());
}

double age_threshold_of_beta_with(double beta, const SourceParams& p, double moment,
                                  double mean_delay) {
    p.validate();
    if (!std::isfinite(beta)) throw std::domain_error("age_threshold_of_beta: beta must be finite");
    double w = p.weight, s2 = p.sigma * p.sigma;
    if (std::fabs(p.theta) < kThetaBranchTol)
        return std::max(0.0, beta / (w * s2) - mean_delay);
    double th = p.theta;
    double t = (1.0 - 2.0 * th * beta / (w * s2)) / moment;
    if (p.theta > 0.0 && t <= 0.0)
        throw std::domain_error(
            "age_threshold_of_beta: theta > 0 branch requires beta < w*sigma^2/(2*theta)");
    return std::max(0.0, -std::log(t) / (2.0 * th));
}

double age_threshold_of_beta(double beta, const SourceParams& p, const TransmissionModel& tm) {
    return age_threshold_of_beta_with(beta, p, effective_moment(p.theta, tm), tm.mean());
}

CycleEstimate per_cycle_expectations(double v, const SourceParams& p, const TransmissionModel& tm,
                                     int mc_budget, RngStream rng) {
    if (!(v >= 0.0)) throw std::domain_error("per_cycle_expectations: v must be >= 0");
    CycleKit kit(p, tm, mc_budget, rng);
    CycleEstimate est;
    est.et = kit.et(v);
    est.ei = kit.ei(v);
    kit.standard_errors(v, &est.et_se, &est.ei_se);
    return est;
}

CycleEstimate per_cycle_expectations_age(double dbar, const SourceParams& p,
                                         const TransmissionModel& tm, int mc_budget,
                                         RngStream rng) {
    if (!(dbar >= 0.0)) throw std::domain_error("per_cycle_expectations_age: dbar must be >= 0");
    AgeKit kit(p, tm, mc_budget, rng);
    CycleEstimate est;
    est.et = kit.et(dbar);
    est.ei = kit.eip(dbar);
    kit.standard_errors(dbar, &est.et_se, &est.ei_se);
    return est;
}

namespace {

// Shared bisection for both modes. `surplus(beta)` must be strictly
// decreasing with a sign change inside (floor, cap).
template <typename Surplus, typename Threshold>
ThresholdSolution solve_root(double lambda, double floor, double cap, double ey, double w,
                             double ei0, double et0, Surplus surplus, Threshold threshold,
                             SamplerMode mode, const SolverConfig& cfg) {
    ThresholdSolution sol;
    sol.lambda = lambda;
    sol.mode = mode;
    // Zero-wait region: below the floor the threshold is 0 and the root is
    // linear in beta.
    double beta0 = (w * ei0 + lambda * ey) / et0;
    if (beta0 <= floor) {
        sol.beta = beta0;
        sol.v = 0.0;
        return sol;
    }
    double lo = floor, hi;
    double glo = surplus(lo);
    if (!(glo >= 0.0)) {  // numerically at the boundary
        sol.beta = floor;
        sol.v = 0.0;
        return sol;
    }
    bool found = false;
    if (std::isfinite(cap)) {
        double gap = cap - floor;
        for (int k = 1; k <= std::min(cfg.max_expand, 60); ++k) {
            hi = cap - gap * std::pow(0.5, k);
            if (!(hi > lo) || !(hi < cap)) break;  // down to rounding: saturated at the cap
            double g = surplus(hi);
            if (!(g >= 0.0)) {  // negative or NaN from overflow: past the root
                found = true;
                break;
            }
            lo = hi;
        }
        if (!found)
            throw NumericError(
                "solve_beta: no root below the theta > 0 cap w*sigma^2/(2*theta); at this "
                "activation cost it is optimal never to sample",
                lo, cfg.max_expand);
    } else {
        double step = std::max(std::fabs(floor), 1.0);
        hi = floor;
        for (int k = 0; k < cfg.max_expand; ++k) {
            hi += step;
            step *= 2.0;
            double g = surplus(hi);
            if (!(g >= 0.0)) {
                found = true;
                break;
            }
            lo = hi;
        }
    }
    if (!found)
        throw NumericError("solve_beta: no sign change within the expansion budget", lo,
                           cfg.max_expand);
    for (int i = 0; i < 200 && (hi - lo) > cfg.beta_rel_tol * std::max(1.0, std::fabs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        double g = surplus(mid);
        if (g >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    sol.beta = 0.5 * (lo + hi);
    sol.v = threshold(sol.beta);
    return sol;
}

}  // namespace

ThresholdSolution solve_beta_with(double lambda, const CycleKit& kit, const SolverConfig& cfg) {
    const SourceParams& p = kit.params();
    double ey = kit.mean_delay();
    auto threshold = [&](double beta) {
        return threshold_of_beta_with(beta, p, kit.moment(), ey);
    };
    auto surplus = [&](double beta) {
        double v = threshold(beta);
        return p.weight * kit.ei(v) - beta * kit.et(v) + lambda * ey;
    };
    return solve_root(lambda, kit.beta_floor(), beta_cap(p), ey, p.weight, kit.ei(0.0),
                      kit.et(0.0), surplus, threshold, SamplerMode::SignalAware, cfg);
}

ThresholdSolution solve_beta_age_with(double lambda, const AgeKit& kit, const SolverConfig& cfg) {
    const SourceParams& p = kit.params();
    double ey = kit.mean_delay();
    auto threshold = [&](double beta) {
        return age_threshold_of_beta_with(beta, p, kit.moment(), ey);
    };
    auto surplus = [&](double beta) {
        double dbar = threshold(beta);
        return p.weight * kit.eip(dbar) - beta * kit.et(dbar) + lambda * ey;
    };
    return solve_root(lambda, kit.beta_floor(), beta_cap(p), ey, p.weight, kit.eip(0.0),
                      kit.et(0.0), surplus, threshold, SamplerMode::SignalAgnostic, cfg);
}

ThresholdSolution solve_beta(double lambda, const SourceParams& p, const TransmissionModel& tm,
                             const SolverConfig& cfg) {
    if (!std::isfinite(lambda)) throw std::domain_error("solve_beta: lambda must be finite");
    CycleKit kit(p, tm, cfg.mc_budget, RngStream(cfg.seed, 0));
    return solve_beta_with(lambda, kit, cfg);
}

ThresholdSolution solve_beta_age(double lambda, const SourceParams& p,
                                 const TransmissionModel& tm, const SolverConfig& cfg) {
    if (!std::isfinite(lambda)) throw std::domain_error("solve_beta_age: lambda must be finite");
    AgeKit kit(p, tm, cfg.mc_budget, RngStream(cfg.seed, 1));
    return solve_beta_age_with(lambda, kit, cfg);
}

}  // namespace remest
