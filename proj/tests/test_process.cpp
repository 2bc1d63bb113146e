#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "remest/process.hpp"
#include "remest/special.hpp"
#include "remest/transmission.hpp"

using namespace remest;

namespace {

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
double ks_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        double fa = double(i) / a.size(), fb = double(j) / b.size();
        d = std::max(d, std::fabs(fa - fb));
    }
    double ne = double(a.size()) * b.size() / (a.size() + b.size());
    double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return std::clamp(p, 0.0, 1.0);
}

struct Welford {
    long n = 0;
    double mean = 0, m2 = 0;
    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double var() const { return m2 / (n - 1); }
    double se() const { return std::sqrt(var() / n); }
};

}  // namespace

TEST_CASE("step_process moments match the exact transition law") {
    SourceParams p{0.5, 0.0, 1.0, 1.0};
    RngStream rng(42, 0);
    Welford w;
    for (int i = 0; i < 100000; ++i) w.add(step_process(1.0, 1.0, p, rng));
    double mean = std::exp(-0.5);
    double var = (1.0 - std::exp(-1.0)) / 1.0;
    CHECK(std::fabs(w.mean - mean) < 3.0 * w.se());
    CHECK(w.var() == doctest::Approx(var).epsilon(0.03));

    SourceParams wiener{0.0, 0.0, 0.7, 1.0};
    Welford w2;
    RngStream rng2(43, 0);
    for (int i = 0; i < 100000; ++i) w2.add(step_process(0.0, 0.25, wiener, rng2));
    CHECK(std::fabs(w2.mean) < 3.0 * w2.se());
    CHECK(w2.var() == doctest::Approx(0.49 * 0.25).epsilon(0.03));

    CHECK_THROWS_AS(step_process(0.0, 0.0, p, rng), std::domain_error);
    // dt -> 0+: output collapses to x
    CHECK(step_process(1.0, 1e-14, p, rng) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("two half-steps match one full step (Kolmogorov-Smirnov)") {
    for (double theta : {0.4, -0.3}) {
        SourceParams p{theta, 0.3, 1.0, 1.0};
        RngStream r1(7, 0), r2(8, 0);
        std::vector<double> one, two;
        for (int i = 0; i < 100000; ++i) {
            one.push_back(step_process(0.9, 0.8, p, r1));
            two.push_back(step_process(step_process(0.9, 0.4, p, r2), 0.4, p, r2));
        }
        CHECK(ks_pvalue(one, two) > 0.01);
    }
}

TEST_CASE("sample_O_at variance across the three regimes") {
    RngStream rng(11, 0);
    SourceParams a{0.1, 0.0, 1.0, 1.0};
    CHECK(sample_O_at(0.0, a, rng) == 0.0);
    Welford w;
    for (int i = 0; i < 200000; ++i) w.add(sample_O_at(2.0, a, rng));
    CHECK(w.var() == doctest::Approx(5.0 * (1.0 - std::exp(-0.4))).epsilon(0.02));
    SourceParams b{-0.1, 0.0, 1.0, 1.0};
    Welford w2;
    for (int i = 0; i < 200000; ++i) w2.add(sample_O_at(2.0, b, rng));
    CHECK(w2.var() == doctest::Approx(5.0 * (std::exp(0.4) - 1.0)).epsilon(0.02));
    SourceParams c{0.0, 0.0, 2.0, 1.0};
    Welford w3;
    for (int i = 0; i < 200000; ++i) w3.add(sample_O_at(2.0, c, rng));
    CHECK(w3.var() == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("hitting_time_mc immediate exit and budget error") {
    SourceParams p{0.0, 0.0, 1.0, 1.0};
    RngStream rng(1, 0);
    auto res = hitting_time_mc(1.0, 1.0, p, 1e-3, rng);
    CHECK(res.tau == 0.0);
    CHECK(res.integral_sq == 0.0);
    CHECK_THROWS_AS(hitting_time_mc(0.0, 5.0, p, 1e-4, rng, 100), NumericError);
    CHECK_THROWS_AS(hitting_time_mc(2.0, 1.0, p, 1e-3, rng), std::domain_error);
}

TEST_CASE("hitting times satisfy the exit-time identities") {
    // E[tau] = R1(v), E[int O^2] = R2(v) for exits from (-v, v) started at 0
    struct Cfg {
        double theta, v;
    };
    for (Cfg c : {Cfg{0.0, 1.0}, Cfg{0.3, 1.0}}) {
        SourceParams p{c.theta, 0.0, 1.0, 1.0};
        Welford wt, wi;
        RngStream rng(99, 0);
        for (int i = 0; i < 2000; ++i) {
            auto res = hitting_time_mc(0.0, c.v, p, 2e-4, rng);
            wt.add(res.tau);
            wi.add(res.integral_sq);
        }
        double r1v = special::r1(c.v, p), r2v = special::r2(c.v, p);
        CHECK(std::fabs(wt.mean - r1v) < 3.0 * wt.se() + 0.05 * r1v);
        CHECK(std::fabs(wi.mean - r2v) < 3.0 * wi.se() + 0.05 * r2v);
    }
}

TEST_CASE("Dynkin identity for the integrated square") {
    // E[int_0^tau O^2 dt] = (sigma^2/2theta) E[tau] - E[O_tau^2]/(2theta)
    for (double theta : {-0.2, 0.2}) {
        SourceParams p{theta, 0.0, 1.0, 1.0};
        RngStream rng(123, 0);
        Welford diff;
        for (int i = 0; i < 3000; ++i) {
            auto res = hitting_time_mc(0.0, 0.8, p, 2e-4, rng);
            double rhs =
                (1.0 / (2.0 * theta)) * res.tau - res.endpoint * res.endpoint / (2.0 * theta);
            diff.add(res.integral_sq - rhs);
        }
        CHECK(std::fabs(diff.mean) < 3.0 * diff.se() + 1e-3);
    }
}

TEST_CASE("reproducibility: identical streams give identical trajectories") {
    SourceParams p{0.2, 0.1, 1.0, 1.0};
    RngStream a(5, 3), b(5, 3), c(5, 4);
    double xa = 0, xb = 0, xc = 0;
    bool differs = false;
    for (int i = 0; i < 200; ++i) {
        xa = step_process(xa, 0.01, p, a);
        xb = step_process(xb, 0.01, p, b);
        xc = step_process(xc, 0.01, p, c);
        CHECK(xa == xb);
        differs |= (xa != xc);
    }
    CHECK(differs);
}

TEST_CASE("transmission models: samples, means, moments") {
    RngStream rng(21, 0);
    auto cst = TransmissionModel::constant(1.5);
    auto exp1 = TransmissionModel::exponential(2.0);
    auto ln = TransmissionModel::normalized_lognormal(1.5);
    CHECK(cst.mean() == 1.5);
    CHECK(exp1.mean() == 2.0);
    CHECK(ln.mean() == 1.0);
    for (int i = 0; i < 1000; ++i) {
        CHECK(cst.sample(rng) > 0.0);
        CHECK(exp1.sample(rng) > 0.0);
        CHECK(ln.sample(rng) > 0.0);
    }
    // empirical E[Y] = 1 for the normalized log-normal
    Welford w;
    for (int i = 0; i < 400000; ++i) w.add(ln.sample(rng));
    CHECK(std::fabs(w.mean - 1.0) < 4.0 * w.se());

    CHECK(cst.moment_e2theta(0.3) == doctest::Approx(std::exp(-0.9)).epsilon(1e-14));
    CHECK(cst.moment_e2theta(0.0) == 1.0);
    CHECK(exp1.moment_e2theta(0.25) == doctest::Approx(1.0 / 2.0).epsilon(1e-14));
    CHECK(exp1.moment_e2theta(-0.2) == doctest::Approx(1.0 / (1.0 - 0.8)).epsilon(1e-14));
    CHECK_THROWS_AS(exp1.moment_e2theta(-0.3), std::domain_error);

    // log-normal moment: fixed-seed Monte-Carlo, cached and repeatable
    double m1 = ln.moment_e2theta(0.1);
    double m2 = ln.moment_e2theta(0.1);
    CHECK(m1 == m2);
    CHECK(m1 > 0.0);
    CHECK(m1 < 1.0);
    CHECK(ln.moment_diverges(-0.1));
    CHECK_FALSE(ln.moment_diverges(0.1));
    CHECK_FALSE(exp1.moment_diverges(-0.2));

    // quantiles
    CHECK(exp1.quantile(0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(ln.quantile(0.5) == doctest::Approx(std::exp(-0.5 * 1.5 * 1.5)).epsilon(1e-9));
    double q99 = ln.quantile(0.99);
    CHECK(q99 == doctest::Approx(std::exp(1.5 * 2.3263478740408408 - 1.125)).epsilon(1e-8));
}

TEST_CASE("inverse normal cdf") {
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    for (double x : {-3.0, -0.7, 0.3, 2.5}) {
        double p = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(inverse_normal_cdf(p) == doctest::Approx(x).epsilon(1e-10));
    }
}
