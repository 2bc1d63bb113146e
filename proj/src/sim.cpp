#include "remest/sim.hpp"

#include <algorithm>
#include <cmath>

#include "remest/process.hpp"

namespace remest {

namespace {

double source_index(const BanditState& st, const IndexTable* table, const Policy& policy) {
    if (st.gamma > 0.0) return kPassiveIndex;
    switch (policy.kind) {
        case PolicyKind::WhittleSignalAware:
            return table->lookup(std::fabs(st.epsilon));
        case PolicyKind::WhittleAge:
            return table->lookup(st.delta);
        case PolicyKind::MafZw:
            return st.delta;
        case PolicyKind::SingleThreshold:
            return std::fabs(st.epsilon) - policy.v;
    }
    return kPassiveIndex;
}

bool needs_floor(PolicyKind kind) {
    // MAF-ZW is zero-wait by definition; the Whittle modes and the
    // single-source threshold activate only at a nonnegative index.
    return kind != PolicyKind::MafZw;
}

}  // namespace

std::vector<std::pair<int, int>> decision_step(const std::vector<BanditState>& states,
                                               const std::vector<ChannelState>& channels,
                                               const std::vector<const IndexTable*>& tables,
                                               const Policy& policy) {
    int n = static_cast<int>(states.size());
    std::vector<double> idx(n);
    for (int i = 0; i < n; ++i)
        idx[i] = source_index(states[i], tables.empty() ? nullptr : tables[i], policy);
    std::vector<bool> taken(n, false);
    std::vector<std::pair<int, int>> acts;
    for (const ChannelState& ch : channels) {
        if (ch.busy) continue;
        int best = -1;
        for (int i = 0; i < n; ++i) {
            if (taken[i] || idx[i] == kPassiveIndex) continue;
            if (best < 0 || idx[i] > idx[best]) best = i;  // ties: lowest id wins
        }
        if (best < 0) continue;
        if (needs_floor(policy.kind) && idx[best] < dummy_index()) continue;
        taken[best] = true;
        acts.emplace_back(best, ch.id);
    }
    return acts;
}

std::vector<IndexTable> prepare_tables(const std::vector<SourceParams>& sources,
                                       const std::vector<TransmissionModel>& tms,
                                       SamplerMode mode, int points, int mc_budget,
                                       std::uint64_t seed) {
    std::vector<IndexTable> tables;
    tables.reserve(sources.size());
    for (std::size_t n = 0; n < sources.size(); ++n) {
        IndexGridSpec grid = default_grid(mode, sources[n], tms[n], points);
        tables.push_back(build_index_table(static_cast<int>(n), mode, sources[n], tms[n], grid,
                                           mc_budget, seed + 0x1000 * n));
    }
    return tables;
}

SimReport run_sim(const std::vector<SourceParams>& sources,
                  const std::vector<TransmissionModel>& tms, int channels, const Policy& policy,
                  const SimConfig& cfg, const std::vector<const IndexTable*>* tables,
                  const TraceSink& trace) {
    int n = static_cast<int>(sources.size());
    if (n < 1) throw ConfigError("run_sim: need at least one source");
    if (static_cast<int>(tms.size()) != n)
        throw ConfigError("run_sim: one transmission model per source required");
    if (channels < 1 || channels > n)
        throw ConfigError("run_sim: channel count must satisfy 1 <= L <= N");
    for (const auto& p : sources) p.validate();
    if (policy.kind == PolicyKind::SingleThreshold && (n != 1 || channels != 1))
        throw ConfigError("run_sim: single_threshold policy requires N = L = 1");
    if (!(cfg.horizon > 0.0)) throw ConfigError("run_sim: horizon must be > 0");

    double min_ey = tms[0].mean(), max_ey = tms[0].mean();
    for (const auto& tm : tms) {
        min_ey = std::min(min_ey, tm.mean());
        max_ey = std::max(max_ey, tm.mean());
    }
    double dt = cfg.step > 0.0 ? cfg.step : 0.01 * min_ey;
    double warmup = cfg.warmup >= 0.0 ? cfg.warmup : 5.0 * max_ey;
    if (warmup >= cfg.horizon) throw ConfigError("run_sim: horizon must exceed the warmup");

    bool whittle = policy.kind == PolicyKind::WhittleSignalAware ||
                   policy.kind == PolicyKind::WhittleAge;
    std::vector<IndexTable> own_tables;
    std::vector<const IndexTable*> table_ptrs(n, nullptr);
    if (whittle) {
        if (tables) {
            if (static_cast<int>(tables->size()) != n)
                throw ConfigError("run_sim: one index table per source required");
            table_ptrs = *tables;
            for (const IndexTable* t : table_ptrs)
                if (!t) throw ConfigError("run_sim: missing index table");
        } else {
            SamplerMode mode = policy.kind == PolicyKind::WhittleSignalAware
                                   ? SamplerMode::SignalAware
                                   : SamplerMode::SignalAgnostic;
            own_tables = prepare_tables(sources, tms, mode, cfg.table_points, cfg.table_mc_budget,
                                        cfg.seed ^ 0x7ab1e5ull);
            for (int i = 0; i < n; ++i) table_ptrs[i] = &own_tables[i];
        }
    }

    // Per-source runtime; the error is tracked against the delivered estimate
    // (eps_cur) and against the in-flight sample (eps_pend), both driven by
    // the same Wiener increments.
    struct Src {
        double eps_cur = 0.0, eps_pend = 0.0;
        bool in_flight = false;
        double s_cur = 0.0, s_pend = 0.0, remaining = 0.0;
        double a = 1.0, sd = 0.0;
        RngStream proc, ys;
    };
    std::vector<Src> rt(n);
    for (int i = 0; i < n; ++i) {
        const SourceParams& p = sources[i];
        bool wiener = std::fabs(p.theta) < kThetaBranchTol;
        rt[i].a = wiener ? 1.0 : std::exp(-p.theta * dt);
        rt[i].sd = p.sigma * std::sqrt(wiener ? dt : dt * em1_over(2.0 * p.theta * dt));
        rt[i].proc = RngStream(cfg.seed, 2 * i);
        rt[i].ys = RngStream(cfg.seed, 2 * i + 1);
    }
    std::vector<ChannelState> chans(channels);
    for (int l = 0; l < channels; ++l) chans[l].id = l;

    SimReport rep;
    rep.step = dt;
    rep.warmup = warmup;
    rep.per_source_mse.assign(n, 0.0);
    rep.per_source_age_penalty.assign(n, 0.0);
    rep.sample_counts.assign(n, 0);

    std::vector<BanditState> states(n);
    auto refresh_states = [&](double t) {
        for (int i = 0; i < n; ++i) {
            states[i].epsilon = rt[i].eps_cur;
            states[i].delta = t - rt[i].s_cur;
            states[i].gamma = rt[i].in_flight ? t - rt[i].s_pend : 0.0;
        }
    };
    auto apply_decisions = [&](double t) {
        auto acts = decision_step(states, chans, table_ptrs, policy);
        for (auto [src, ch] : acts) {
            Src& s = rt[src];
            s.in_flight = true;
            s.s_pend = t;
            s.eps_pend = 0.0;
            s.remaining = tms[src].sample(s.ys);
            chans[ch].busy = true;
            chans[ch].serving = src;
            chans[ch].remaining = s.remaining;
            ++rep.sample_counts[src];
            if (trace)
                trace(TraceRow{t, src, states[src].epsilon, states[src].delta, 0.0,
                               source_index(states[src], table_ptrs[src], policy), 1});
        }
        int busy = 0;
        for (auto& c : chans) busy += c.busy ? 1 : 0;
        if (busy > channels) throw std::logic_error("run_sim: channel capacity violated");
    };

    long long nsteps = std::llround(cfg.horizon / dt);
    double measured = 0.0;
    refresh_states(0.0);
    apply_decisions(0.0);

    for (long long k = 1; k <= nsteps; ++k) {
        double t = k * dt;
        for (int i = 0; i < n; ++i) {
            Src& s = rt[i];
            double prev = s.eps_cur;
            double xi = s.sd * s.proc.normal();
            s.eps_cur = s.a * s.eps_cur + xi;
            if (s.in_flight) {
                s.eps_pend = s.a * s.eps_pend + xi;
                s.remaining -= dt;
            }
            // The slice (t-dt, t] is still governed by the old estimate; a
            // delivery snapped to t switches it for later slices.
            if (t > warmup) {
                const SourceParams& p = sources[i];
                rep.per_source_mse[i] +=
                    p.weight * 0.5 * (prev * prev + s.eps_cur * s.eps_cur) * dt;
                rep.per_source_age_penalty[i] += p.weight * age_penalty(t - s.s_cur, p) * dt;
            }
            if (s.in_flight && s.remaining <= 1e-12) {
                s.eps_cur = s.eps_pend;
                s.s_cur = s.s_pend;
                s.in_flight = false;
                for (auto& c : chans)
                    if (c.busy && c.serving == i) {
                        c.busy = false;
                        c.serving = -1;
                        c.remaining = 0.0;
                    }
            }
        }
        if (t > warmup) measured += dt;
        refresh_states(t);
        if (trace)
            for (int i = 0; i < n; ++i)
                trace(TraceRow{t, i, states[i].epsilon, states[i].delta, states[i].gamma,
                               source_index(states[i], table_ptrs[i], policy), 0});
        apply_decisions(t);
    }

    rep.horizon = nsteps * dt;
    for (int i = 0; i < n; ++i) {
        rep.per_source_mse[i] /= measured;
        rep.per_source_age_penalty[i] /= measured;
        rep.total_weighted_mse += rep.per_source_mse[i];
    }
    return rep;
}

}  // namespace remest
