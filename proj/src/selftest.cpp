#include "remest/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "remest/process.hpp"
#include "remest/sim.hpp"
#include "remest/special.hpp"
#include "remest/threshold.hpp"

namespace remest {

namespace {

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

}  // namespace

CheckResult check_ode_residuals(const RFunc& r1f, const RFunc& r2f) {
    CheckResult res{"ode_residuals", true, ""};
    double worst = 0.0;
    for (double theta : {-0.3, 0.3}) {
        SourceParams p{theta, 0.0, 1.0, 1.0};
        for (double eps = 0.1; eps <= 2.0; eps += 0.1) {
            double h = 5e-4;
            double d1 = (r1f(eps + h, p) - r1f(eps - h, p)) / (2 * h);
            double d2 = (r1f(eps + h, p) - 2 * r1f(eps, p) + r1f(eps - h, p)) / (h * h);
            worst = std::max(worst, std::fabs(0.5 * d2 - theta * eps * d1 - 1.0));
            double e1 = (r2f(eps + h, p) - r2f(eps - h, p)) / (2 * h);
            double e2 = (r2f(eps + h, p) - 2 * r2f(eps, p) + r2f(eps - h, p)) / (h * h);
            worst = std::max(worst,
                             std::fabs((0.5 * e2 - theta * eps * e1 - eps * eps) / (eps * eps)));
        }
    }
    res.pass = worst < 1e-5;
    res.detail = fmt("max residual %.2e (tol %.0e)", worst, 1e-5);
    return res;
}

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    std::vector<CheckResult> out;

    {
        CheckResult r{"special_identities", true, ""};
        double worst = 0.0;
        worst = std::max(worst, std::fabs(special::q_func(0.0) - 1.0));
        worst = std::max(worst, std::fabs(special::k_func(0.0) - 1.0));
        worst = std::max(worst, std::fabs(special::hyp2f2_1132_2(0.0) - 1.0));
        worst = std::max(worst, std::fabs(special::q_inverse(special::q_func(1.3)) - 1.3));
        worst = std::max(worst, std::fabs(special::k_inverse(special::k_func(0.8)) - 0.8));
        r.pass = worst < 1e-9;
        r.detail = fmt("max deviation %.2e (tol %.0e)", worst, 1e-9);
        out.push_back(r);
    }

    out.push_back(check_ode_residuals(
        [](double e, const SourceParams& p) { return special::r1(e, p); },
        [](double e, const SourceParams& p) { return special::r2(e, p); }));

    {
        CheckResult r{"hitting_time_oracle", true, ""};
        double worst_z = 0.0;
        for (double theta : {0.0, 0.25}) {
            SourceParams p{theta, 0.0, 1.0, 1.0};
            RngStream rng(seed, 17);
            double sum = 0, sum2 = 0;
            const int n = 1500;
            for (int i = 0; i < n; ++i) {
                auto res = hitting_time_mc(0.0, 1.0, p, 5e-4, rng);
                sum += res.tau;
                sum2 += res.tau * res.tau;
            }
            double mean = sum / n;
            double se = std::sqrt((sum2 / n - mean * mean) / n);
            double z = std::fabs(mean - special::r1(1.0, p)) / (se + 0.02);
            worst_z = std::max(worst_z, z);
        }
        r.pass = worst_z < 5.0;
        r.detail = fmt("worst |z| %.2f (tol %.1f)", worst_z, 5.0);
        out.push_back(r);
    }

    {
        CheckResult r{"beta_fixed_point", true, ""};
        SourceParams p{0.1, 0.0, 1.0, 1.0};
        auto tm = TransmissionModel::exponential(2.0);
        SolverConfig cfg;
        cfg.mc_budget = 100000;
        cfg.seed = seed;
        auto sol = solve_beta(0.0, p, tm, cfg);
        SimConfig scfg;
        scfg.horizon = 30000.0;
        scfg.step = 0.01;
        scfg.seed = seed + 1;
        auto rep = run_sim({p}, {tm}, 1, Policy{PolicyKind::SingleThreshold, sol.v}, scfg);
        double rel = std::fabs(rep.total_weighted_mse - sol.beta) / sol.beta;
        r.pass = rel < 0.05;
        r.detail = fmt("relative gap %.3f (tol %.2f)", rel, 0.05);
        out.push_back(r);
    }

    return out;
}

}  // namespace remest
