#include "remest/process.hpp"

#include <cmath>

namespace remest {

double step_process(double x, double dt, const SourceParams& p, RngStream& rng) {
    if (!(dt > 0.0)) throw std::domain_error("step_process: dt must be > 0");
    if (!std::isfinite(x)) throw std::domain_error("step_process: x must be finite");
    double mean, var;
    if (std::fabs(p.theta) < kThetaBranchTol) {
        mean = x;
        var = p.sigma * p.sigma * dt;
    } else {
        double a = std::exp(-p.theta * dt);
        mean = p.mu + (x - p.mu) * a;
        var = p.sigma * p.sigma * dt * em1_over(2.0 * p.theta * dt);
    }
    return rng.normal(mean, std::sqrt(var));
}

double centered_variance(double t, const SourceParams& p) {
    if (!(t >= 0.0)) throw std::domain_error("centered_variance: t must be >= 0");
    if (std::fabs(p.theta) < kThetaBranchTol) return p.sigma * p.sigma * t;
    return p.sigma * p.sigma * t * em1_over(2.0 * p.theta * t);
}

double sample_O_at(double t, const SourceParams& p, RngStream& rng) {
    return rng.normal(0.0, std::sqrt(centered_variance(t, p)));
}

HittingResult hitting_time_mc(double start, double threshold, const SourceParams& p, double dt,
                              RngStream& rng, std::uint64_t step_budget) {
    if (!(threshold > 0.0)) throw std::domain_error("hitting_time_mc: threshold must be > 0");
    if (!(dt > 0.0)) throw std::domain_error("hitting_time_mc: dt must be > 0");
    if (!(std::fabs(start) <= threshold))
        throw std::domain_error("hitting_time_mc: |start| must be <= threshold");
    if (std::fabs(start) == threshold) return {0.0, start, 0.0};

    // O follows dO = -theta O dt + sigma dW; exact transition per step
    double a, sd;
    if (std::fabs(p.theta) < kThetaBranchTol) {
        a = 1.0;
        sd = p.sigma * std::sqrt(dt);
    } else {
        a = std::exp(-p.theta * dt);
        sd = p.sigma * std::sqrt(dt * em1_over(2.0 * p.theta * dt));
    }

    double o = start;
    double integral = 0.0;
    for (std::uint64_t step = 1; step <= step_budget; ++step) {
        double prev = o;
        o = a * o + sd * rng.normal();
        integral += 0.5 * (prev * prev + o * o) * dt;
        if (std::fabs(o) >= threshold)
            return {static_cast<double>(step) * dt, o, integral};
    }
    throw NumericError("hitting_time_mc: step budget exhausted (threshold too large for regime)",
                       integral, static_cast<int>(std::min<std::uint64_t>(step_budget, 1u << 30)));
}

}  // namespace remest
