#include "remest/config.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace remest {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(line, "invalid number for " + field + ": '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Policy parse_policy(const std::string& token) {
    if (token == "whittle_signal_aware") return {PolicyKind::WhittleSignalAware, 0.0};
    if (token == "whittle_age") return {PolicyKind::WhittleAge, 0.0};
    if (token == "maf_zw") return {PolicyKind::MafZw, 0.0};
    if (token.rfind("single_threshold=", 0) == 0) {
        double v = std::stod(token.substr(17));
        return {PolicyKind::SingleThreshold, v};
    }
    throw ConfigError("unknown policy '" + token + "'");
}

std::string policy_name(const Policy& p) {
    switch (p.kind) {
        case PolicyKind::WhittleSignalAware:
            return "whittle_signal_aware";
        case PolicyKind::WhittleAge:
            return "whittle_age";
        case PolicyKind::MafZw:
            return "maf_zw";
        case PolicyKind::SingleThreshold:
            return "single_threshold=" + fmt(p.v);
    }
    return "?";
}

TransmissionModel parse_transmission(const std::string& kind, double param) {
    if (kind == "constant") return TransmissionModel::constant(param);
    if (kind == "exponential") return TransmissionModel::exponential(param);
    if (kind == "lognormal") return TransmissionModel::normalized_lognormal(param);
    throw ConfigError("unknown transmission kind '" + kind + "'");
}

void ExperimentConfig::validate() const {
    if (sources.empty()) throw ConfigError("config: at least one source required");
    for (const auto& s : sources) {
        try {
            s.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (!transmission) throw ConfigError("config: transmission model required");
    if (policies.empty()) throw ConfigError("config: at least one policy required");
    if (channels < 1 || channels > static_cast<int>(sources.size()))
        throw ConfigError("config: channels must satisfy 1 <= L <= N");
    if (!(horizon > 0.0)) throw ConfigError("config: horizon must be > 0");
    if (replications < 1) throw ConfigError("config: replications must be >= 1");
    if (sweep) {
        if (sweep->var != "sigma" && sweep->var != "theta")
            throw ConfigError("config: sweep variable must be sigma or theta");
        if (sweep->source < 0 || sweep->source >= static_cast<int>(sources.size()))
            throw ConfigError("config: sweep source index out of range");
        if (sweep->values.empty()) throw ConfigError("config: sweep needs at least one value");
        for (std::size_t i = 1; i < sweep->values.size(); ++i)
            if (!(sweep->values[i] > sweep->values[i - 1]))
                throw ConfigError("config: sweep grid must be strictly increasing");
    }
    for (const auto& p : policies)
        if (p.kind == PolicyKind::SingleThreshold &&
            (sources.size() != 1 || channels != 1))
            throw ConfigError("config: single_threshold requires N = L = 1");
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    auto pol_eq = [](const Policy& a, const Policy& b) {
        return a.kind == b.kind && a.v == b.v;
    };
    if (policies.size() != o.policies.size()) return false;
    for (std::size_t i = 0; i < policies.size(); ++i)
        if (!pol_eq(policies[i], o.policies[i])) return false;
    bool tm_eq = transmission.has_value() == o.transmission.has_value() &&
                 (!transmission || *transmission == *o.transmission);
    return sources == o.sources && tm_eq && channels == o.channels && sweep == o.sweep &&
           horizon == o.horizon && step == o.step && warmup == o.warmup &&
           replications == o.replications && seed == o.seed && table_points == o.table_points &&
           table_mc_budget == o.table_mc_budget;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    bool have_horizon = false;
    while (std::getline(is, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto toks = split(raw);
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        auto need = [&](std::size_t n) {
            if (toks.size() != n + 1)
                fail(line, "'" + key + "' expects " + std::to_string(n) + " value(s)");
        };
        if (key == "horizon") {
            need(1);
            cfg.horizon = to_double(toks[1], line, key);
            have_horizon = true;
        } else if (key == "step") {
            need(1);
            cfg.step = to_double(toks[1], line, key);
        } else if (key == "warmup") {
            need(1);
            cfg.warmup = to_double(toks[1], line, key);
        } else if (key == "replications") {
            need(1);
            cfg.replications = static_cast<int>(to_double(toks[1], line, key));
        } else if (key == "seed") {
            need(1);
            cfg.seed = static_cast<std::uint64_t>(to_double(toks[1], line, key));
        } else if (key == "channels") {
            need(1);
            cfg.channels = static_cast<int>(to_double(toks[1], line, key));
        } else if (key == "table_points") {
            need(1);
            cfg.table_points = static_cast<int>(to_double(toks[1], line, key));
        } else if (key == "table_mc_budget") {
            need(1);
            cfg.table_mc_budget = static_cast<int>(to_double(toks[1], line, key));
        } else if (key == "policies") {
            if (toks.size() < 2) fail(line, "'policies' expects at least one name");
            for (std::size_t i = 1; i < toks.size(); ++i) {
                try {
                    cfg.policies.push_back(parse_policy(toks[i]));
                } catch (const ConfigError& e) {
                    fail(line, e.what());
                }
            }
        } else if (key == "transmission") {
            need(2);
            try {
                cfg.transmission = parse_transmission(toks[1], to_double(toks[2], line, key));
            } catch (const std::exception& e) {
                fail(line, e.what());
            }
        } else if (key == "sweep") {
            if (toks.size() < 4) fail(line, "'sweep' expects: var source_index values...");
            SweepSpec sw;
            sw.var = toks[1];
            sw.source = static_cast<int>(to_double(toks[2], line, "sweep source")) - 1;
            for (std::size_t i = 3; i < toks.size(); ++i)
                sw.values.push_back(to_double(toks[i], line, "sweep value"));
            cfg.sweep = sw;
        } else if (key == "source") {
            SourceParams p;
            bool has_theta = false, has_sigma = false, has_weight = false;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto eq = toks[i].find('=');
                if (eq == std::string::npos) fail(line, "source fields must be key=value");
                std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
                double x = to_double(v, line, "source " + k);
                if (k == "theta") {
                    p.theta = x;
                    has_theta = true;
                } else if (k == "mu") {
                    p.mu = x;
                } else if (k == "sigma") {
                    p.sigma = x;
                    has_sigma = true;
                } else if (k == "weight") {
                    p.weight = x;
                    has_weight = true;
                } else {
                    fail(line, "unknown source field '" + k + "'");
                }
            }
            if (!has_theta) fail(line, "source is missing the field 'theta'");
            if (!has_sigma) fail(line, "source is missing the field 'sigma'");
            if (!has_weight) fail(line, "source is missing the field 'weight'");
            cfg.sources.push_back(p);
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }
    if (!have_horizon) throw ConfigError("config: horizon is required");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "horizon " << fmt(cfg.horizon) << "\n";
    if (cfg.step > 0.0) os << "step " << fmt(cfg.step) << "\n";
    if (cfg.warmup >= 0.0) os << "warmup " << fmt(cfg.warmup) << "\n";
    os << "replications " << cfg.replications << "\n";
    os << "seed " << cfg.seed << "\n";
    os << "channels " << cfg.channels << "\n";
    os << "table_points " << cfg.table_points << "\n";
    os << "table_mc_budget " << cfg.table_mc_budget << "\n";
    os << "policies";
    for (const auto& p : cfg.policies) os << " " << policy_name(p);
    os << "\n";
    if (cfg.transmission) {
        const char* kind = cfg.transmission->kind() == DelayKind::Constant ? "constant"
                           : cfg.transmission->kind() == DelayKind::Exponential
                               ? "exponential"
                               : "lognormal";
        os << "transmission " << kind << " " << fmt(cfg.transmission->param()) << "\n";
    }
    if (cfg.sweep) {
        os << "sweep " << cfg.sweep->var << " " << (cfg.sweep->source + 1);
        for (double v : cfg.sweep->values) os << " " << fmt(v);
        os << "\n";
    }
    for (const auto& s : cfg.sources)
        os << "source theta=" << fmt(s.theta) << " mu=" << fmt(s.mu) << " sigma=" << fmt(s.sigma)
           << " weight=" << fmt(s.weight) << "\n";
    return os.str();
}

namespace {

// Tables are immutable and reusable across replications and policies; cache
// them per distinct (mode, source, transmission, grid, budget).
struct TableKey {
    int mode;
    double theta, sigma, weight;
    int tm_kind;
    double tm_param;
    int points, budget;
    bool operator<(const TableKey& o) const {
        auto tie = [](const TableKey& k) {
            return std::tuple(k.mode, k.theta, k.sigma, k.weight, k.tm_kind, k.tm_param, k.points,
                              k.budget);
        };
        return tie(*this) < tie(o);
    }
};

}  // namespace

std::vector<RunRow> run_experiment(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    std::vector<double> sweep_values =
        cfg.sweep ? cfg.sweep->values : std::vector<double>{0.0};
    std::string sweep_var = cfg.sweep ? cfg.sweep->var : "none";

    struct Job {
        std::size_t row;
        Policy policy;
        double sweep_value = 0.0;
        int replication = 0;
    };
    std::vector<Job> jobs;
    std::vector<RunRow> rows;
    for (const auto& pol : cfg.policies)
        for (double sv : sweep_values)
            for (int r = 0; r < cfg.replications; ++r) {
                Job j{rows.size(), pol, sv, r};
                RunRow row;
                row.policy = policy_name(pol);
                row.sweep_var = sweep_var;
                row.sweep_value = sv;
                row.replication = r;
                row.seed = cfg.seed + 1000003ull * r;
                rows.push_back(row);
                jobs.push_back(j);
            }

    std::map<TableKey, IndexTable> table_cache;
    std::mutex cache_mu;

    auto sources_at = [&](double sv) {
        std::vector<SourceParams> srcs = cfg.sources;
        if (cfg.sweep) {
            if (cfg.sweep->var == "sigma")
                srcs[cfg.sweep->source].sigma = sv;
            else
                srcs[cfg.sweep->source].theta = sv;
        }
        return srcs;
    };

    auto tables_for = [&](const std::vector<SourceParams>& srcs, SamplerMode mode) {
        std::vector<const IndexTable*> ptrs(srcs.size());
        for (std::size_t i = 0; i < srcs.size(); ++i) {
            TableKey key{static_cast<int>(mode),
                         srcs[i].theta,
                         srcs[i].sigma,
                         srcs[i].weight,
                         static_cast<int>(cfg.transmission->kind()),
                         cfg.transmission->param(),
                         cfg.table_points,
                         cfg.table_mc_budget};
            std::lock_guard<std::mutex> lock(cache_mu);
            auto it = table_cache.find(key);
            if (it == table_cache.end()) {
                IndexTable t = build_index_table(static_cast<int>(i), mode, srcs[i],
                                                 *cfg.transmission, {0.0, 0.0, cfg.table_points},
                                                 cfg.table_mc_budget, cfg.seed ^ 0x7ab1e5ull);
                it = table_cache.emplace(key, std::move(t)).first;
            }
            ptrs[i] = &it->second;
        }
        return ptrs;
    };

    // Prebuild every needed table serially so workers only read the cache.
    for (const auto& pol : cfg.policies) {
        if (pol.kind == PolicyKind::WhittleSignalAware)
            for (double sv : sweep_values) tables_for(sources_at(sv), SamplerMode::SignalAware);
        if (pol.kind == PolicyKind::WhittleAge)
            for (double sv : sweep_values) tables_for(sources_at(sv), SamplerMode::SignalAgnostic);
    }

    auto run_job = [&](const Job& j) {
        auto srcs = sources_at(j.sweep_value);
        std::vector<TransmissionModel> tms(srcs.size(), *cfg.transmission);
        SimConfig scfg;
        scfg.horizon = cfg.horizon;
        scfg.step = cfg.step;
        scfg.warmup = cfg.warmup;
        scfg.seed = rows[j.row].seed;
        scfg.table_points = cfg.table_points;
        scfg.table_mc_budget = cfg.table_mc_budget;
        std::vector<const IndexTable*> ptrs;
        const std::vector<const IndexTable*>* tables = nullptr;
        if (j.policy.kind == PolicyKind::WhittleSignalAware) {
            ptrs = tables_for(srcs, SamplerMode::SignalAware);
            tables = &ptrs;
        } else if (j.policy.kind == PolicyKind::WhittleAge) {
            ptrs = tables_for(srcs, SamplerMode::SignalAgnostic);
            tables = &ptrs;
        }
        rows[j.row].report = run_sim(srcs, tms, cfg.channels, j.policy, scfg, tables);
    };

    threads = std::max(1, threads);
    if (threads == 1) {
        for (const auto& j : jobs) run_job(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= jobs.size()) return;
                    run_job(jobs[i]);
                }
            });
        for (auto& t : pool) t.join();
    }
    return rows;
}

void write_summary_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<RunRow>& rows) {
    std::size_t n = cfg.sources.size();
    os << "policy,sweep_var,sweep_value,replication,seed,total_weighted_mse";
    for (std::size_t i = 1; i <= n; ++i) os << ",per_source_mse_" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",samples_sent_" << i;
    os << "\n";
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        os << r.policy << "," << r.sweep_var << "," << num(r.sweep_value) << "," << r.replication
           << "," << r.seed << "," << num(r.report.total_weighted_mse);
        for (double v : r.report.per_source_mse) os << "," << num(v);
        for (long long c : r.report.sample_counts) os << "," << c;
        os << "\n";
    }
}

}  // namespace remest
