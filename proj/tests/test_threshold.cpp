#include <doctest.h>

#include <cmath>

#include "remest/process.hpp"
#include "remest/special.hpp"
#include "remest/threshold.hpp"

using namespace remest;

namespace {

struct Welford {
    long n = 0;
    double mean = 0, m2 = 0;
    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double se() const { return std::sqrt(m2 / (n - 1) / n); }
};

// Trajectory oracle for one threshold-policy cycle: start at the error
// O_Y of a fresh delivery, wait on a grid until |error| >= v, then serve a
// fresh Y while the error keeps evolving. Returns (length, integral).
void simulate_cycles(const SourceParams& p, const TransmissionModel& tm, double v, int ncyc,
                     double dt, RngStream& rng, Welford* et, Welford* ei) {
    bool wiener = std::fabs(p.theta) < kThetaBranchTol;
    double a = wiener ? 1.0 : std::exp(-p.theta * dt);
    double sd = p.sigma * std::sqrt(wiener ? dt : dt * em1_over(2.0 * p.theta * dt));
    for (int c = 0; c < ncyc; ++c) {
        double y = tm.sample(rng);
        double o = rng.normal(0.0, std::sqrt(centered_variance(y, p)));
        double len = 0.0, integ = 0.0;
        while (std::fabs(o) < v) {
            double prev = o;
            o = a * o + sd * rng.normal();
            integ += 0.5 * (prev * prev + o * o) * dt;
            len += dt;
        }
        double yp = tm.sample(rng);
        long steps = std::lround(yp / dt);
        for (long k = 0; k < steps; ++k) {
            double prev = o;
            o = a * o + sd * rng.normal();
            integ += 0.5 * (prev * prev + o * o) * dt;
        }
        et->add(len + steps * dt);
        ei->add(integ);
    }
}

}  // namespace

TEST_CASE("threshold_of_beta closed forms") {
    auto exp2 = TransmissionModel::exponential(2.0);
    auto cst1 = TransmissionModel::constant(1.0);
    SourceParams wiener{0.0, 0.0, 1.0, 1.0};
    // invert sqrt(3(beta - sigma^2 E[Y])) by hand: beta = 4/3, E[Y] = 1 -> v = 1
    CHECK(threshold_of_beta(4.0 / 3.0, wiener, cst1) == doctest::Approx(1.0).epsilon(1e-12));
    // boundary of the radicand
    CHECK(threshold_of_beta(1.0, wiener, cst1) == 0.0);
    CHECK(threshold_of_beta(0.5, wiener, cst1) == 0.0);

    SourceParams stable{0.1, 0.0, 1.0, 1.0};
    double prev = 0.0;
    for (double beta = 1.8; beta < 4.9; beta += 0.25) {
        double v = threshold_of_beta(beta, stable, exp2);
        CHECK(v >= prev);
        if (prev > 0.0) CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(threshold_of_beta(5.0, stable, exp2), std::domain_error);  // cap = 5

    SourceParams unstable{-0.2, 0.0, 1.0, 1.0};
    auto exp1 = TransmissionModel::exponential(1.0);
    double floor = unstable.weight * (1.0 - exp1.moment_e2theta(-0.2)) / (2.0 * -0.2);
    double v1 = threshold_of_beta(floor * 1.5, unstable, exp1);
    double v2 = threshold_of_beta(floor * 3.0, unstable, exp1);
    CHECK(v1 > 0.0);
    CHECK(v2 > v1);
    CHECK(threshold_of_beta(floor * 0.5, unstable, exp1) == 0.0);
}

TEST_CASE("per_cycle_expectations: zero-wait and Wiener examples") {
    SourceParams wiener{0.0, 0.0, 1.0, 1.0};
    auto cst1 = TransmissionModel::constant(1.0);
    RngStream rng(5, 0);
    auto zw = per_cycle_expectations(0.0, wiener, cst1, 50000, rng);
    // v = 0: E[cycle] = E[R1(|O_Y|)] = E[Y]
    CHECK(zw.et == doctest::Approx(1.0).epsilon(1e-12));
    // theta=0, constant Y=1, v=1: E[cycle] = E[max{1, W_1^2}]
    auto est = per_cycle_expectations(1.0, wiener, cst1, 400000, rng);
    Welford mc;
    RngStream rng2(6, 0);
    for (int i = 0; i < 400000; ++i) {
        double w1 = rng2.normal();
        mc.add(std::max(1.0, w1 * w1));
    }
    CHECK(std::fabs(est.et - mc.mean) < 3.0 * (est.et_se + mc.se()) + 1e-3);
}

TEST_CASE("per_cycle_expectations agree with trajectory cycles") {
    struct Cfg {
        double theta, v;
        TransmissionModel tm;
    };
    Cfg cfgs[] = {{0.0, 0.8, TransmissionModel::exponential(1.0)},
                  {0.25, 1.0, TransmissionModel::constant(1.0)},
                  {-0.2, 0.9, TransmissionModel::exponential(1.0)}};
    for (const auto& c : cfgs) {
        SourceParams p{c.theta, 0.0, 1.0, 1.0};
        RngStream rng(77, 0);
        Welford et, ei;
        simulate_cycles(p, c.tm, c.v, 3000, 2e-4, rng, &et, &ei);
        auto scalar = per_cycle_expectations(c.v, p, c.tm, 200000, RngStream(78, 0));
        CHECK(std::fabs(scalar.et - et.mean) < 3.0 * (scalar.et_se + et.se()) + 0.01);
        CHECK(std::fabs(scalar.ei - ei.mean) < 3.0 * (scalar.ei_se + ei.se()) + 0.02);
    }
}

TEST_CASE("solve_beta: monotonicity in lambda and weight homogeneity") {
    SourceParams p{0.1, 0.0, 1.0, 1.0};
    auto exp2 = TransmissionModel::exponential(2.0);
    SolverConfig cfg;
    cfg.mc_budget = 100000;
    auto s0 = solve_beta(0.0, p, exp2, cfg);
    auto s1 = solve_beta(1.0, p, exp2, cfg);
    auto s2 = solve_beta(3.0, p, exp2, cfg);
    CHECK(s0.beta > 0.0);
    CHECK(s1.beta > s0.beta);
    CHECK(s2.beta > s1.beta);
    CHECK(s1.v > s0.v);
    CHECK(s2.v > s1.v);
    // residual of the root equation at the solution, in cycle units
    CycleKit kit(p, exp2, cfg.mc_budget, RngStream(cfg.seed, 0));
    double res = p.weight * kit.ei(s0.v) - s0.beta * kit.et(s0.v);
    CHECK(std::fabs(res / kit.et(s0.v)) < 1e-3);

    // weight scaling at lambda = 0: beta scales, v unchanged
    SourceParams scaled = p;
    scaled.weight = 2.5;
    auto ss = solve_beta(0.0, scaled, exp2, cfg);
    CHECK(ss.beta == doctest::Approx(2.5 * s0.beta).epsilon(1e-4));
    CHECK(ss.v == doctest::Approx(s0.v).epsilon(1e-4));
}

TEST_CASE("solve_beta handles all three regimes and negative lambda") {
    auto exp1 = TransmissionModel::exponential(1.0);
    for (double theta : {-0.2, 0.0, 0.3}) {
        SourceParams p{theta, 0.0, 1.0, 1.0};
        SolverConfig cfg;
        cfg.mc_budget = 50000;
        auto s = solve_beta(0.0, p, exp1, cfg);
        CHECK(s.beta > 0.0);
        CHECK(s.v > 0.0);
        // strongly negative activation cost floors the threshold at zero
        auto sneg = solve_beta(-50.0, p, exp1, cfg);
        CHECK(sneg.v == 0.0);
        CHECK(sneg.beta < s.beta);
    }
}

TEST_CASE("solve_beta_age: deterministic-delay closed form") {
    // constant Y = c, theta = 0, lambda = 0, w = 1: beta_age = 3c/2 sigma^2
    for (double c : {0.7, 1.0, 2.0}) {
        SourceParams p{0.0, 0.0, 1.0, 1.0};
        auto tm = TransmissionModel::constant(c);
        SolverConfig cfg;
        cfg.mc_budget = 20000;
        auto s = solve_beta_age(0.0, p, tm, cfg);
        CHECK(s.beta == doctest::Approx(1.5 * c).epsilon(1e-6));
        CHECK(s.v == doctest::Approx(0.5 * c).epsilon(1e-6));  // age threshold c/2
    }
}

TEST_CASE("solve_beta_age: weight homogeneity and lambda monotonicity") {
    SourceParams p{0.15, 0.0, 1.0, 1.0};
    auto exp1 = TransmissionModel::exponential(1.0);
    SolverConfig cfg;
    cfg.mc_budget = 100000;
    auto s0 = solve_beta_age(0.0, p, exp1, cfg);
    auto s1 = solve_beta_age(0.5, p, exp1, cfg);
    CHECK(s1.beta > s0.beta);
    CHECK(s1.v > s0.v);
    SourceParams scaled = p;
    scaled.weight = 3.0;
    auto ss = solve_beta_age(0.0, scaled, exp1, cfg);
    CHECK(ss.beta == doctest::Approx(3.0 * s0.beta).epsilon(1e-4));
    CHECK(ss.v == doctest::Approx(s0.v).epsilon(1e-4));
}

TEST_CASE("v(beta(lambda)) increasing on a lambda grid across regimes") {
    auto exp1 = TransmissionModel::exponential(1.0);
    for (double theta : {-0.2, 0.0, 0.2}) {
        SourceParams p{theta, 0.0, 1.0, 1.0};
        SolverConfig cfg;
        cfg.mc_budget = 50000;
        double prev_v = -1.0, prev_b = -1e300;
        for (double lam : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            auto s = solve_beta(lam, p, exp1, cfg);
            CHECK(s.beta > prev_b);
            CHECK(s.v >= prev_v);
            prev_v = s.v;
            prev_b = s.beta;
        }
    }
}

TEST_CASE("large activation cost: age problem saturates, aware problem does not") {
    SourceParams p{0.2, 0.0, 1.0, 1.0};
    auto exp1 = TransmissionModel::exponential(1.0);
    SolverConfig cfg;
    cfg.mc_budget = 20000;
    // bounded age penalty: beyond some lambda it is optimal never to sample
    CHECK_THROWS_AS(solve_beta_age(50.0, p, exp1, cfg), NumericError);
    // unbounded squared error: a root exists for every lambda, beta below the cap
    auto s = solve_beta(50.0, p, exp1, cfg);
    double cap = p.weight * p.sigma * p.sigma / (2.0 * p.theta);
    CHECK(s.beta < cap);
    CHECK(s.beta > 0.9 * cap);
    CHECK(s.v > 5.0);
}

TEST_CASE("age_threshold_of_beta inverts E[p(delta + Y)]") {
    SourceParams p{0.2, 0.0, 1.0, 1.0};
    auto exp1 = TransmissionModel::exponential(1.0);
    double beta = 1.1;
    double dstar = age_threshold_of_beta(beta, p, exp1);
    double m = exp1.moment_e2theta(0.2);
    double ep = 1.0 / 0.4 * (1.0 - std::exp(-0.4 * dstar) * m);
    CHECK(ep == doctest::Approx(beta).epsilon(1e-9));
    // below the floor: zero wait
    CHECK(age_threshold_of_beta(0.1, p, exp1) == 0.0);
}
