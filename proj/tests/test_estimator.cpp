#include <doctest.h>

#include <cmath>

#include "remest/estimator.hpp"
#include "remest/process.hpp"

using namespace remest;

TEST_CASE("mmse_estimate evaluates the conditional mean") {
    SourceParams p{0.1, 0.0, 1.0, 1.0};
    SampleRecord s{0, 1.0, 1.0, 1.5, 2.0};
    CHECK(mmse_estimate(s, 11.0, p) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    // strong mean reversion pulls the estimate to mu
    SourceParams fast{50.0, 3.0, 1.0, 1.0};
    CHECK(mmse_estimate(s, 10.0, fast) == doctest::Approx(3.0).epsilon(1e-12));
    // Wiener case holds the last sample value
    SourceParams wiener{0.0, 0.0, 1.0, 1.0};
    CHECK(mmse_estimate(s, 7.0, wiener) == 2.0);
    CHECK_THROWS_AS(mmse_estimate(s, 1.2, p), std::domain_error);
}

TEST_CASE("estimator interpolates its own sample") {
    SourceParams p{0.3, -1.0, 1.0, 1.0};
    SampleRecord s{0, 2.0, 2.0, 2.0, 0.7};  // zero delay
    CHECK(mmse_estimate(s, 2.0, p) == doctest::Approx(0.7).epsilon(1e-14));
    BanditState st = advance_error(BanditState{}, 0.7, 2.0, s, p);
    CHECK(st.epsilon == doctest::Approx(0.0));
    CHECK(st.delta == 0.0);
}

TEST_CASE("advance_error fills error and age") {
    SourceParams p{0.0, 0.0, 1.0, 1.0};
    SampleRecord s{0, 1.0, 1.0, 2.0, 0.5};
    BanditState st = advance_error(BanditState{}, 1.3, 4.0, s, p);
    CHECK(st.xhat == 0.5);
    CHECK(st.epsilon == doctest::Approx(0.8));
    CHECK(st.delta == doctest::Approx(3.0));
}

TEST_CASE("age_penalty branches and monotonicity") {
    SourceParams w{0.0, 0.0, 1.0, 1.0};
    CHECK(age_penalty(0.0, w) == 0.0);
    CHECK(age_penalty(3.0, w) == doctest::Approx(3.0).epsilon(1e-15));
    SourceParams neg{-0.1, 0.0, 1.0, 1.0};
    CHECK(age_penalty(1.0, neg) == doctest::Approx(5.0 * (std::exp(0.2) - 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(age_penalty(-1.0, w), std::domain_error);
    for (double theta : {-0.3, 0.0, 0.3}) {
        SourceParams p{theta, 0.0, 1.0, 1.0};
        double prev = 0.0;
        for (int i = 1; i <= 60; ++i) {
            double v = age_penalty(0.1 * i, p);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("error at age delta has mean square p(delta)") {
    // advance the true process and the estimate on a shared grid; at age
    // delta the squared error averages to the age penalty
    for (double theta : {0.25, -0.15}) {
        SourceParams p{theta, 0.5, 1.0, 1.0};
        const double delta = 1.3, dt = 1e-3;
        RngStream rng(31, 0);
        double acc = 0.0;
        const int reps = 20000;
        for (int r = 0; r < reps; ++r) {
            double x = 0.4;  // sample value at S
            SampleRecord s{0, 0.0, 0.0, 0.0, x};
            double t = 0.0;
            while (t < delta - dt / 2) {
                x = step_process(x, dt, p, rng);
                t += dt;
            }
            BanditState st = advance_error(BanditState{}, x, t, s, p);
            acc += st.epsilon * st.epsilon;
        }
        double emp = acc / reps;
        CHECK(emp == doctest::Approx(age_penalty(delta, p)).epsilon(0.05));
    }
}
