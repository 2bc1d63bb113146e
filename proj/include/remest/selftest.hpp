#pragma once

#include <functional>
#include <string>
#include <vector>

#include "remest/types.hpp"

namespace remest {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Finite-difference residual check of the exit-time ODEs; the functions are
// injectable so a corrupted implementation can be shown to fail.
using RFunc = std::function<double(double, const SourceParams&)>;
CheckResult check_ode_residuals(const RFunc& r1f, const RFunc& r2f);

// Identities, ODE residuals, hitting-time oracles, and the single-source
// fixed point, at smoke-test budgets with seed-robust tolerances.
std::vector<CheckResult> run_selftest(std::uint64_t seed);

}  // namespace remest
