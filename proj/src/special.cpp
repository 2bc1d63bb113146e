#include "remest/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace remest::special {

namespace {

constexpr double kSqrtPi = 1.7724538509055160272981674833411;
constexpr double kInvSqrtPi = 0.56418958354775628694807945156077;

// Lattice spacing for Rybicki's sampling-theorem evaluation of Dawson's
// function; the aliasing error is O(e^{-pi^2/(4h^2)}) ~ 7e-62 at h = 0.2.
constexpr double kLatticeH = 0.2;
// Gaussian window half width: e^{-W^2} ~ 3e-20.
constexpr double kLatticeW = 6.7;

// Maclaurin series of D(x), good for small |x|.
double dawson_series(double x) {
    double term = x;
    double sum = x;
    double x2 = x * x;
    for (int k = 1; k < 60; ++k) {
        term *= -2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

// Rybicki (1989): D(x) = lim_{h->0} (1/sqrt(pi)) sum_{n odd} e^{-(x-nh)^2}/n.
double dawson_lattice(double x) {
    const double h = kLatticeH;
    int nlo = static_cast<int>(std::floor((x - kLatticeW) / h));
    int nhi = static_cast<int>(std::ceil((x + kLatticeW) / h));
    if (nlo % 2 == 0) ++nlo;
    double s = 0.0;
    for (int n = nlo; n <= nhi; n += 2) {
        double d = x - n * h;
        s += std::exp(-d * d) / n;
    }
    return kInvSqrtPi * s;
}

// Same lattice integrated term by term: G(x) = int_0^x D.
double dawson_integral_lattice(double x) {
    const double h = kLatticeH;
    int nlo = static_cast<int>(std::floor(-kLatticeW / h));
    int nhi = static_cast<int>(std::ceil((x + kLatticeW) / h));
    if (nlo % 2 == 0) ++nlo;
    double s = 0.0;
    for (int n = nlo; n <= nhi; n += 2) {
        double nh = n * h;
        s += (std::erf(x - nh) + std::erf(nh)) / n;
    }
    return 0.5 * s;
}

// G(x) - ln(x)/2 tends to a constant; fix it once from the lattice value at
// the crossover point.
constexpr double kGAsymptoticSwitch = 12.0;

double g_asymptotic_tail(double x) {
    // int of the large-x expansion of D: (1/2)ln x - 1/(8x^2) - 3/(32x^4) - ...
    double ix2 = 1.0 / (x * x);
    return 0.5 * std::log(x) -
           ix2 * (1.0 / 8.0 + ix2 * (3.0 / 32.0 + ix2 * (5.0 / 32.0 + ix2 * (105.0 / 256.0 + ix2 * 945.0 / 640.0))));
}

double g_asymptotic_constant() {
    static const double c =
        dawson_integral_lattice(kGAsymptoticSwitch) - g_asymptotic_tail(kGAsymptoticSwitch);
    return c;
}

}  // namespace

double erf(double x) { return std::erf(x); }

double dawson(double x) {
    double ax = std::fabs(x);
    double v = (ax < 0.5) ? dawson_series(ax) : dawson_lattice(ax);
    return x < 0.0 ? -v : v;
}

double dawson_integral(double x) {
    double ax = std::fabs(x);
    double v;
    if (ax < 0.5) {
        // term-by-term integral of the Maclaurin series
        double x2 = ax * ax;
        double term = x2 / 2.0;  // int of t
        double sum = term;
        double c = 1.0;
        for (int k = 1; k < 60; ++k) {
            c *= -2.0 / (2.0 * k + 1.0);
            term = c * std::pow(x2, k + 1) / (2.0 * k + 2.0);
            sum += term;
            if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        }
        v = sum;
    } else if (ax <= kGAsymptoticSwitch) {
        v = dawson_integral_lattice(ax);
    } else {
        v = g_asymptotic_constant() + g_asymptotic_tail(ax);
    }
    return v;  // G is even
}

double erfi(double x) {
    if (!std::isfinite(x)) throw std::domain_error("erfi: argument must be finite");
    if (std::fabs(x) > kErfiGuard)
        throw std::domain_error("erfi: |x| exceeds the overflow guard (26)");
    return 2.0 * kInvSqrtPi * std::exp(x * x) * dawson(x);
}

double q_func(double x) {
    if (!std::isfinite(x)) throw std::domain_error("Q: argument must be finite");
    if (x == 0.0) return 1.0;
    // erf(x)/x has no cancellation; overflow of e^{x^2} propagates as +inf
    return 0.5 * kSqrtPi * std::exp(x * x) * (std::erf(x) / x);
}

double k_func(double x) {
    if (!std::isfinite(x)) throw std::domain_error("K: argument must be finite");
    if (std::fabs(x) > kErfiGuard)
        throw std::domain_error("K: |x| exceeds the overflow guard (26)");
    if (x == 0.0) return 1.0;
    return dawson(x) / x;
}

namespace {

// K without the contractual guard; the Dawson form never overflows. Used by
// the inverse, whose domain (0,1] reaches x beyond the guard.
double k_unguarded(double x) {
    if (x == 0.0) return 1.0;
    return dawson(x) / x;
}

double bisect_monotone(double lo, double hi, double target, bool increasing,
                       double (*f)(double)) {
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
        double mid = 0.5 * (lo + hi);
        double v = f(mid);
        bool go_right = increasing ? (v < target) : (v > target);
        if (go_right)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double q_inverse(double y) {
    if (!std::isfinite(y) || y < 1.0)
        throw std::domain_error("q_inverse: argument must be finite and >= 1");
    if (y == 1.0) return 0.0;
    double hi = 1.0;
    while (q_func(hi) < y) {
        hi *= 2.0;
        if (hi > 32.0) throw std::domain_error("q_inverse: argument out of reachable range");
    }
    return bisect_monotone(0.0, hi, y, true, &q_func);
}

double k_inverse(double y) {
    if (!std::isfinite(y) || y <= 0.0 || y > 1.0)
        throw std::domain_error("k_inverse: argument must be in (0, 1]");
    if (y == 1.0) return 0.0;
    double hi = 1.0;
    while (k_unguarded(hi) > y) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::domain_error("k_inverse: bracket expansion failed");
    }
    return bisect_monotone(0.0, hi, y, false, &k_unguarded);
}

namespace {

// Direct series sum_{n>=1} z^n / ((3/2)_n (n+1)); the n=0 term (=1) is left
// to the caller. Alternating for z < 0, so only used above kSeriesNegSwitch.
double hyp_series_tail(double z, const SeriesControl& ctl) {
    double term = 1.0;
    double sum = 0.0;
    for (int n = 0; n < ctl.max_terms; ++n) {
        term *= z * (n + 1.0) / ((n + 1.5) * (n + 2.0));
        sum += term;
        if (std::fabs(term) < ctl.rel_tol * std::max(std::fabs(sum), 1.0) && n > 2)
            return sum;
    }
    throw NumericError("hyp2f2_1132_2: series did not converge", 1.0 + sum, ctl.max_terms);
}

// Below this z the alternating series cancels too heavily; switch to the
// Dawson-integral identity 2F2(1,1;3/2,2;-x^2) = 2 G(x) / x^2.
constexpr double kSeriesNegSwitch = -9.0;

}  // namespace

double hyp2f2_1132_2(double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!std::isfinite(z)) throw std::domain_error("hyp2f2_1132_2: argument must be finite");
    if (z == 0.0) return 1.0;
    if (z < kSeriesNegSwitch) {
        double x = std::sqrt(-z);
        return 2.0 * dawson_integral(x) / (x * x);
    }
    return 1.0 + hyp_series_tail(z, ctl);
}

double hyp2f2_1132_2_m1(double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!std::isfinite(z)) throw std::domain_error("hyp2f2_1132_2_m1: argument must be finite");
    if (z == 0.0) return 0.0;
    if (z < kSeriesNegSwitch) {
        double x = std::sqrt(-z);
        return 2.0 * dawson_integral(x) / (x * x) - 1.0;
    }
    return hyp_series_tail(z, ctl);
}

double r1(double eps, const SourceParams& p, const SeriesControl& ctl) {
    if (!std::isfinite(eps)) throw std::domain_error("r1: eps must be finite");
    double e2 = eps * eps;
    if (std::fabs(p.theta) < kThetaBranchTol) return e2 / (p.sigma * p.sigma);
    double z = p.theta * e2 / (p.sigma * p.sigma);
    return e2 / (p.sigma * p.sigma) * hyp2f2_1132_2(z, ctl);
}

double r2(double eps, const SourceParams& p, const SeriesControl& ctl) {
    if (!std::isfinite(eps)) throw std::domain_error("r2: eps must be finite");
    double e2 = eps * eps;
    if (std::fabs(p.theta) < kThetaBranchTol) return e2 * e2 / (6.0 * p.sigma * p.sigma);
    double z = p.theta * e2 / (p.sigma * p.sigma);
    return e2 / (2.0 * p.theta) * hyp2f2_1132_2_m1(z, ctl);
}

double r3(double delta, const SourceParams& p) {
    if (!(delta >= 0.0)) throw std::domain_error("r3: delta must be >= 0");
    double s2 = p.sigma * p.sigma;
    if (std::fabs(p.theta) < kThetaBranchTol) return 0.5 * s2 * delta * delta;
    double u = 2.0 * p.theta * delta;
    // (u - 1 + e^{-u})/u^2, continuous through 0 with limit 1/2
    double h;
    if (std::fabs(u) < 0.03) {
        h = 0.5 - u / 6.0 + u * u / 24.0 - u * u * u / 120.0 + u * u * u * u / 720.0;
    } else {
        h = (u - 1.0 + std::exp(-u)) / (u * u);
    }
    return s2 * delta * delta * h;
}

}  // namespace remest::special
