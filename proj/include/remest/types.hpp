#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace remest {

// Parameters of one Gauss-Markov source dX = theta*(mu - X)dt + sigma*dW.
// theta > 0: stable OU, theta = 0: scaled Wiener, theta < 0: unstable OU.
struct SourceParams {
    double theta = 0.0;   // mean-reversion rate, 1/time, any sign
    double mu = 0.0;      // mean level, signal units
    double sigma = 1.0;   // diffusion coefficient, > 0
    double weight = 1.0;  // objective weight, > 0

    void validate() const {
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("SourceParams: sigma must be finite and > 0");
        if (!(weight > 0.0) || !std::isfinite(weight))
            throw std::invalid_argument("SourceParams: weight must be finite and > 0");
        if (!std::isfinite(theta) || !std::isfinite(mu))
            throw std::invalid_argument("SourceParams: theta and mu must be finite");
    }

    bool operator==(const SourceParams&) const = default;
};

// Below this |theta| the Wiener-case formulas are used everywhere; the
// hypergeometric forms lose accuracy while the theta->0 limits are exact.
inline constexpr double kThetaBranchTol = 1e-9;

// (1 - e^{-u})/u, continuous through u = 0.
inline double em1_over(double u) {
    if (std::fabs(u) < 1e-12) return 1.0 - 0.5 * u;
    return -std::expm1(-u) / u;
}

// Series or iteration failed to converge; carries the partial result.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double partial, int terms)
        : std::runtime_error(what), partial_value(partial), term_count(terms) {}
    double partial_value;
    int term_count;
};

// Invalid experiment or simulation configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace remest
