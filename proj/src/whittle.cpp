#include "remest/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "remest/special.hpp"

namespace remest {

WhittleEvaluator::WhittleEvaluator(const SourceParams& p, const TransmissionModel& tm,
                                   SamplerMode mode, int mc_budget, std::uint64_t seed)
    : mode_(mode) {
    if (mode == SamplerMode::SignalAware)
        aware_ = std::make_shared<CycleKit>(p, tm, mc_budget, RngStream(seed, 0));
    else
        age_ = std::make_shared<AgeKit>(p, tm, mc_budget, RngStream(seed, 1));
}

// w Cfac(v) equals the beta whose optimal threshold is v; the index then
// reads (w/E[Y]) (E[cycle] Cfac - E[int error^2]).
double WhittleEvaluator::cfac(double abs_eps) const {
    const SourceParams& p = aware_->params();
    double s2 = p.sigma * p.sigma;
    if (std::fabs(p.theta) < kThetaBranchTol)
        return abs_eps * abs_eps / 3.0 + s2 * aware_->mean_delay();
    double x = std::sqrt(std::fabs(p.theta)) * abs_eps / p.sigma;
    // K via Dawson stays finite for any x; the guarded k_func contract is for
    // callers that evaluate the literal erfi form
    double qk = p.theta > 0.0 ? special::q_func(x)
                              : (x == 0.0 ? 1.0 : special::dawson(x) / x);
    return s2 / (2.0 * p.theta) * (1.0 - aware_->moment() / qk);
}

double WhittleEvaluator::index(double state, double gamma) const {
    if (!(gamma >= 0.0)) throw std::domain_error("WhittleEvaluator: gamma must be >= 0");
    if (gamma > 0.0) return kPassiveIndex;
    if (mode_ == SamplerMode::SignalAware) {
        double v = std::fabs(state);
        const SourceParams& p = aware_->params();
        return p.weight / aware_->mean_delay() * (aware_->et(v) * cfac(v) - aware_->ei(v));
    }
    if (!(state >= 0.0)) throw std::domain_error("WhittleEvaluator: delta must be >= 0");
    const SourceParams& p = age_->params();
    double ep = age_->ep_at(state);
    return p.weight / age_->mean_delay() * (age_->et(state) * ep - age_->eip(state));
}

double WhittleEvaluator::index_se(double state) const {
    if (mode_ == SamplerMode::SignalAware) return aware_->alpha_se(std::fabs(state), cfac(std::fabs(state)));
    return age_->alpha_se(state, age_->ep_at(state));
}

double whittle_signal_aware(double eps, double gamma, const SourceParams& p,
                            const TransmissionModel& tm, int mc_budget, RngStream rng) {
    if (!std::isfinite(eps)) throw std::domain_error("whittle_signal_aware: eps must be finite");
    if (gamma > 0.0) return kPassiveIndex;
    CycleKit kit(p, tm, mc_budget, rng);
    double v = std::fabs(eps);
    double s2 = p.sigma * p.sigma;
    double cf;
    if (std::fabs(p.theta) < kThetaBranchTol) {
        cf = v * v / 3.0 + s2 * kit.mean_delay();
    } else {
        double x = std::sqrt(std::fabs(p.theta)) * v / p.sigma;
        double qk = p.theta > 0.0 ? special::q_func(x)
                                  : (x == 0.0 ? 1.0 : special::dawson(x) / x);
        cf = s2 / (2.0 * p.theta) * (1.0 - kit.moment() / qk);
    }
    return p.weight / kit.mean_delay() * (kit.et(v) * cf - kit.ei(v));
}

double whittle_age(double delta, double gamma, const SourceParams& p,
                   const TransmissionModel& tm, int mc_budget, RngStream rng) {
    if (!(delta >= 0.0)) throw std::domain_error("whittle_age: delta must be >= 0");
    if (gamma > 0.0) return kPassiveIndex;
    AgeKit kit(p, tm, mc_budget, rng);
    return p.weight / kit.mean_delay() * (kit.et(delta) * kit.ep_at(delta) - kit.eip(delta));
}

IndexGridSpec default_grid(SamplerMode mode, const SourceParams& p, const TransmissionModel& tm,
                           int points) {
    IndexGridSpec g;
    g.points = points;
    g.lo = 0.0;
    if (mode == SamplerMode::SignalAware) {
        double spread = std::max(1.0, 1.0 / (2.0 * std::max(std::fabs(p.theta), kThetaBranchTol)));
        g.hi = 6.0 * p.sigma * std::sqrt(spread);
    } else {
        g.hi = 10.0 * tm.mean();
    }
    return g;
}

double IndexTable::lookup(double state) const {
    double s = mode() == SamplerMode::SignalAware ? std::fabs(state) : state;
    if (s <= grid_.front()) return values_.front();
    if (s > grid_.back())
        return evaluator_ ? evaluator_->index(s, 0.0) : values_.back();
    auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
    std::size_t j = it - grid_.begin();  // s in (grid[j-1], grid[j]]
    double x0 = grid_[j - 1], x1 = grid_[j];
    double t = (s - x0) / (x1 - x0);
    return values_[j - 1] + t * (values_[j] - values_[j - 1]);
}

IndexTable build_index_table(int source, SamplerMode mode, const SourceParams& p,
                             const TransmissionModel& tm, const IndexGridSpec& grid,
                             int mc_budget, std::uint64_t seed) {
    IndexGridSpec g = grid;
    if (g.hi <= g.lo) {
        IndexGridSpec d = default_grid(mode, p, tm, g.points);
        g.lo = d.lo;
        g.hi = d.hi;
    }
    if (g.points < 1) throw std::invalid_argument("build_index_table: need at least 1 point");

    IndexTable table;
    table.source = source;
    table.mc_budget = mc_budget;
    table.seed = seed;
    table.mode_ = mode;
    table.evaluator_ = std::make_shared<WhittleEvaluator>(p, tm, mode, mc_budget, seed);
    table.grid_.resize(g.points);
    table.values_.resize(g.points);
    for (int i = 0; i < g.points; ++i) {
        table.grid_[i] =
            g.points == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.points - 1);
        table.values_[i] = table.evaluator_->index(table.grid_[i], 0.0);
    }

    // Raw monotonicity violations must be within Monte-Carlo noise.
    double max_violation = 0.0;
    for (int i = 0; i + 1 < g.points; ++i)
        max_violation = std::max(max_violation, table.values_[i] - table.values_[i + 1]);
    double max_se = 0.0;
    for (int k = 0; k < 5; ++k) {
        int i = (g.points - 1) * k / 4;
        max_se = std::max(max_se, table.evaluator_->index_se(table.grid_[i]));
    }
    if (max_violation > std::max(1e-9, 10.0 * max_se))
        throw NumericError("build_index_table: non-monotone values beyond MC noise", max_violation,
                           mc_budget);

    // Isotonic projection (pool adjacent violators) for stable tie-breaking.
    std::vector<double> val(table.values_), wgt(val.size(), 1.0);
    std::vector<int> len(val.size(), 1);
    int m = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
        val[m] = table.values_[i];
        wgt[m] = 1.0;
        len[m] = 1;
        while (m > 0 && val[m - 1] > val[m]) {
            double wsum = wgt[m - 1] + wgt[m];
            val[m - 1] = (wgt[m - 1] * val[m - 1] + wgt[m] * val[m]) / wsum;
            wgt[m - 1] = wsum;
            len[m - 1] += len[m];
            --m;
        }
        ++m;
    }
    std::size_t pos = 0;
    for (int b = 0; b < m; ++b)
        for (int r = 0; r < len[b]; ++r) table.values_[pos++] = val[b];
    return table;
}

void write_table_csv(std::ostream& os, const IndexTable& table) {
    os << "# mode "
       << (table.mode() == SamplerMode::SignalAware ? "signal_aware" : "signal_agnostic") << "\n";
    os << "state,alpha\n";
    char buf[64];
    for (std::size_t i = 0; i < table.grid().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", table.grid()[i], table.values()[i]);
        os << buf;
    }
}

IndexTable read_table_csv(std::istream& is) {
    IndexTable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("signal_agnostic") != std::string::npos)
                t.mode_ = SamplerMode::SignalAgnostic;
            continue;
        }
        if (!header_seen) {
            if (line.rfind("state,alpha", 0) != 0)
                throw ConfigError("index table CSV: expected 'state,alpha' header");
            header_seen = true;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("index table CSV: malformed row '" + line + "'");
        t.grid_.push_back(std::stod(line.substr(0, comma)));
        t.values_.push_back(std::stod(line.substr(comma + 1)));
    }
    if (t.grid_.size() < 2) throw ConfigError("index table CSV: need at least two rows");
    for (std::size_t i = 1; i < t.grid_.size(); ++i)
        if (!(t.grid_[i] > t.grid_[i - 1]))
            throw ConfigError("index table CSV: states must be strictly increasing");
    return t;
}

}  // namespace remest
