#include <doctest.h>

#include <sstream>

#include "remest/config.hpp"

using namespace remest;

namespace {

const char* kSample = R"(# four sources, two channels
horizon 200
step 0.02
replications 2
seed 42
channels 2
policies whittle_signal_aware maf_zw
transmission lognormal 1.5
sweep sigma 1 0.6 1.0 1.4
source theta=-0.1 mu=0 sigma=1 weight=1
source theta=0.1 mu=0 sigma=0.8 weight=1
source theta=0.1 mu=0 sigma=0.9 weight=1
source theta=0.1 mu=0 sigma=1 weight=1
)";

}  // namespace

TEST_CASE("config parse and round-trip identity") {
    auto cfg = parse_config(kSample);
    CHECK(cfg.sources.size() == 4);
    CHECK(cfg.channels == 2);
    CHECK(cfg.policies.size() == 2);
    CHECK(cfg.sweep.has_value());
    CHECK(cfg.sweep->source == 0);
    CHECK(cfg.transmission->kind() == DelayKind::NormalizedLognormal);
    auto again = parse_config(serialize_config(cfg));
    CHECK(cfg == again);
    auto thrice = parse_config(serialize_config(again));
    CHECK(again == thrice);
}

TEST_CASE("config validation errors carry line context") {
    // missing source weight names the field
    try {
        parse_config("horizon 10\nchannels 1\npolicies maf_zw\ntransmission constant 1\n"
                     "source theta=0 sigma=1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 5") != std::string::npos);
        CHECK(msg.find("weight") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("horizon 10\nbogus 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("channels 1\npolicies maf_zw\ntransmission constant 1\n"
                                 "source theta=0 sigma=1 weight=1\n"),
                    ConfigError);  // missing horizon
    // non-increasing sweep grid
    CHECK_THROWS_AS(parse_config("horizon 10\nchannels 1\npolicies maf_zw\n"
                                 "transmission constant 1\nsweep sigma 1 1.0 0.5\n"
                                 "source theta=0 sigma=1 weight=1\n"),
                    ConfigError);
    // single_threshold needs N = L = 1
    CHECK_THROWS_AS(parse_config("horizon 10\nchannels 2\npolicies single_threshold=1\n"
                                 "transmission constant 1\n"
                                 "source theta=0 sigma=1 weight=1\n"
                                 "source theta=0 sigma=1 weight=1\n"),
                    ConfigError);
}

TEST_CASE("policy name round-trip") {
    for (const char* name :
         {"whittle_signal_aware", "whittle_age", "maf_zw", "single_threshold=1.25"}) {
        Policy p = parse_policy(name);
        CHECK(policy_name(p) == name);
    }
    CHECK_THROWS_AS(parse_policy("nonsense"), ConfigError);
}

TEST_CASE("run_experiment produces one row per (policy, sweep, replication)") {
    ExperimentConfig cfg = parse_config(
        "horizon 30\nstep 0.05\nwarmup 5\nreplications 2\nseed 9\nchannels 1\n"
        "policies maf_zw\ntransmission constant 1\n"
        "source theta=0.2 mu=0 sigma=1 weight=1\n"
        "source theta=0 mu=0 sigma=0.5 weight=2\n");
    auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].replication == 0);
    CHECK(rows[1].replication == 1);
    CHECK(rows[0].report.total_weighted_mse > 0.0);
    // determinism of the whole pipeline
    auto rows2 = run_experiment(cfg);
    std::ostringstream a, b;
    write_summary_csv(a, cfg, rows);
    write_summary_csv(b, cfg, rows2);
    CHECK(a.str() == b.str());
    // schema header
    CHECK(a.str().rfind("policy,sweep_var,sweep_value,replication,seed,total_weighted_mse,"
                        "per_source_mse_1,per_source_mse_2,samples_sent_1,samples_sent_2\n",
                        0) == 0);
}

#include "remest/selftest.hpp"
#include "remest/special.hpp"

TEST_CASE("selftest passes and the ODE check catches a corrupted R1") {
    for (std::uint64_t seed : {1ull, 99ull}) {
        auto results = run_selftest(seed);
        for (const auto& r : results) {
            INFO(r.name, ": ", r.detail);
            CHECK(r.pass);
        }
    }
    // negative control: fault-injected R1 must fail the residual check
    auto bad = check_ode_residuals(
        [](double e, const SourceParams& p) { return 1.02 * special::r1(e, p); },
        [](double e, const SourceParams& p) { return special::r2(e, p); });
    CHECK_FALSE(bad.pass);
}
