#include "mg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "mg/game.hpp"
#include "mg/rng.hpp"

namespace mg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Welford {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double se() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

bool convergence_applicable(const GameConfig& cfg) {
    return cfg.update_mode == UpdateMode::online && cfg.signal_mode == SignalMode::endogenous &&
           cfg.m == 1;
}

EnsembleSummary summarize(const GameConfig& cfg, const std::vector<SampleStats>& samples) {
    EnsembleSummary out;
    out.n_samples = static_cast<int>(samples.size());
    const int d = cfg.signal_dim();

    Welford sigma2, act, u1, v1, t_state, t_pop;
    std::vector<Welford> ranks(d);
    std::array<double, 4> classes{0.0, 0.0, 0.0, 0.0};
    for (const auto& s : samples) {
        sigma2.add(s.sigma2_over_n);
        act.add(s.activity);
        if (s.u1) u1.add(*s.u1);
        if (s.v1) v1.add(*s.v1);
        if (s.t_state) t_state.add(static_cast<double>(*s.t_state));
        if (s.t_pop) t_pop.add(*s.t_pop);
        for (int r = 0; r < d; ++r)
            if (s.s_ranked[r]) ranks[r].add(*s.s_ranked[r]);
        for (int c = 0; c < 4; ++c) classes[c] += s.class_fractions[c];
    }
    out.sigma2_over_n = sigma2.mean;
    out.sigma2_se = sigma2.se();
    out.activity = act.mean;
    out.activity_se = act.se();
    if (u1.n > 0) {
        out.u1 = u1.mean;
        out.u1_se = u1.se();
    }
    if (v1.n > 0) {
        out.v1 = v1.mean;
        out.v1_se = v1.se();
    }
    out.s_ranked.resize(d);
    out.s_ranked_se.assign(d, 0.0);
    for (int r = 0; r < d; ++r) {
        if (ranks[r].n > 0) {
            out.s_ranked[r] = ranks[r].mean;
            out.s_ranked_se[r] = ranks[r].se();
        }
    }
    if (t_state.n > 0) out.t_state = t_state.mean;
    if (t_pop.n > 0) out.t_pop = t_pop.mean;
    if (convergence_applicable(cfg) && !samples.empty())
        out.state_discard_fraction =
            1.0 - static_cast<double>(t_state.n) / static_cast<double>(samples.size());
    if (!samples.empty())
        for (int c = 0; c < 4; ++c) out.class_fractions[c] = classes[c] / samples.size();
    return out;
}

} // namespace

SampleStats run_sample(const GameConfig& cfg, std::uint64_t sample_seed,
                       ObservableSeries* keep_series) {
    cfg.validate();
    GameConfig c = cfg;
    c.seed = sample_seed;
    Game game(c);
    const int d = game.signal_dim();
    const long t_eq = c.equilibration_steps();
    const bool conv = convergence_applicable(c);
    const bool record_k = keep_series != nullptr;

    SampleStats stats;
    stats.initial_a = game.a_vec();

    ObservableSeries full;   // transient included, for convergence times
    ObservableSeries window; // measurement window
    window.d = d;
    window.n_agents = c.n_agents;
    if (conv) {
        full.d = d;
        full.n_agents = c.n_agents;
        full.records.reserve(t_eq + c.t_measure);
    }
    window.records.reserve(c.t_measure);

    for (long t = 0; t < t_eq + c.t_measure; ++t) {
        StepRecord rec = game.step();
        if (t >= t_eq) {
            if (record_k) window.k_snapshots.push_back(game.k_vec());
            if (conv) window.records.push_back(rec);
            else window.records.push_back(std::move(rec));
        }
        if (conv) full.records.push_back(std::move(rec));
    }

    stats.sigma2_over_n = attendance_variance(window);
    stats.s_ranked = ranked_signal_variances(window);
    if (d == 2) {
        const auto iso = isotropy_params(window);
        stats.u1 = iso.u1;
        stats.v1 = iso.v1;
    }
    stats.activity = activity(window, default_activity_epsilon);
    stats.class_fractions = step_class_fractions(window, default_theta_large);
    if (conv) {
        stats.t_state = state_convergence_time(full, 1);
        if (stats.t_state && static_cast<long>(full.records.size()) >= 40L * d)
            stats.t_pop = population_convergence_time(full, d);
    }
    if (keep_series) *keep_series = std::move(window);
    return stats;
}

EnsembleResult run_ensemble(const GameConfig& cfg, int n_samples, int workers) {
    cfg.validate();
    if (n_samples < 1) throw std::invalid_argument("run_ensemble: n_samples must be >= 1");
    workers = std::clamp(workers, 1, n_samples);

    std::vector<SampleStats> samples(n_samples);
    std::vector<std::string> errors(n_samples);
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_samples) return;
            try {
                samples[i] = run_sample(cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (int i = 0; i < n_samples; ++i)
        if (!errors[i].empty())
            throw std::runtime_error("sample " + std::to_string(i) + " failed: " + errors[i]);

    EnsembleResult result;
    result.samples = std::move(samples);
    result.summary = summarize(cfg, result.samples);
    return result;
}

SweepSpec parse_sweep_text(const std::string& text) {
    SweepSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("sweep line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("sweep ", 0) == 0) {
            SweepAxis axis;
            axis.key = trim(key.substr(6));
            axis.values = split_list(value);
            if (axis.values.empty())
                throw ConfigError("sweep axis '" + axis.key + "' has no values");
            spec.axes.push_back(std::move(axis));
        } else if (key == "n_samples") {
            spec.n_samples = std::stoi(value);
            if (spec.n_samples < 1) throw ConfigError("n_samples must be >= 1");
        } else if (key == "outputs") {
            spec.outputs = split_list(value);
        } else {
            apply_config_key(spec.base, key, value);
        }
    }
    spec.base.validate();
    return spec;
}

SweepSpec load_sweep_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sweep_text(ss.str());
}

namespace {

const std::vector<std::string>& known_observables() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v{"sigma2_over_n", "u1", "v1", "activity", "t_state",
                                   "t_pop", "state_discard_fraction"};
        for (int r = 1; r <= 16; ++r) v.push_back("s" + std::to_string(r));
        for (int c = 1; c <= 4; ++c) v.push_back("class" + std::to_string(c));
        return v;
    }();
    return names;
}

std::vector<std::string> default_outputs(const GameConfig& cfg) {
    std::vector<std::string> out{"sigma2_over_n"};
    const int d = cfg.signal_dim();
    for (int r = 1; r <= std::min(d, 8); ++r) out.push_back("s" + std::to_string(r));
    if (d == 2) {
        out.push_back("u1");
        out.push_back("v1");
    }
    out.push_back("activity");
    for (int c = 1; c <= 4; ++c) out.push_back("class" + std::to_string(c));
    if (convergence_applicable(cfg)) {
        out.push_back("t_state");
        out.push_back("t_pop");
        out.push_back("state_discard_fraction");
    }
    return out;
}

std::optional<std::pair<double, double>> observable_value(const EnsembleSummary& s,
                                                          const std::string& name) {
    const double nan = std::nan("");
    if (name == "sigma2_over_n") return {{s.sigma2_over_n, s.sigma2_se}};
    if (name == "u1") return {{s.u1 ? *s.u1 : nan, s.u1_se}};
    if (name == "v1") return {{s.v1 ? *s.v1 : nan, s.v1_se}};
    if (name == "activity") return {{s.activity, s.activity_se}};
    if (name == "t_state") return {{s.t_state ? *s.t_state : nan, 0.0}};
    if (name == "t_pop") return {{s.t_pop ? *s.t_pop : nan, 0.0}};
    if (name == "state_discard_fraction") return {{s.state_discard_fraction, 0.0}};
    if (name.size() >= 2 && name[0] == 's') {
        const int r = std::atoi(name.c_str() + 1);
        if (r >= 1 && r <= static_cast<int>(s.s_ranked.size()))
            return {{s.s_ranked[r - 1] ? *s.s_ranked[r - 1] : nan, s.s_ranked_se[r - 1]}};
        return {{nan, 0.0}};
    }
    if (name.rfind("class", 0) == 0) {
        const int c = std::atoi(name.c_str() + 5);
        if (c >= 1 && c <= 4) return {{s.class_fractions[c - 1], 0.0}};
    }
    return std::nullopt;
}

} // namespace

std::vector<ResultRow> rows_from_ensemble(const GameConfig& cfg, int n_samples,
                                          const EnsembleSummary& summary,
                                          const std::vector<std::string>& outputs) {
    const auto names = outputs.empty() ? default_outputs(cfg) : outputs;
    std::vector<ResultRow> rows;
    rows.reserve(names.size());
    for (const auto& name : names) {
        const auto v = observable_value(summary, name);
        if (!v) throw ConfigError("unknown observable '" + name + "'");
        rows.push_back({cfg, n_samples, name, v->first, v->second});
    }
    return rows;
}

std::vector<ResultRow> sweep(const SweepSpec& spec, int workers) {
    for (const auto& name : spec.outputs) {
        const auto& known = known_observables();
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ConfigError("unknown observable '" + name + "' in outputs");
    }

    // Expand and validate the whole grid before running anything.
    std::vector<GameConfig> points;
    const std::size_t n_axes = spec.axes.size();
    std::vector<std::size_t> idx(n_axes, 0);
    bool done = false;
    while (!done) {
        GameConfig cfg = spec.base;
        std::string where;
        for (std::size_t a = 0; a < n_axes; ++a) {
            const auto& axis = spec.axes[a];
            const auto& value = axis.values[idx[a]];
            if (!where.empty()) where += ", ";
            where += axis.key + "=" + value;
            apply_config_key(cfg, axis.key, value);
        }
        try {
            cfg.validate();
        } catch (const std::exception& e) {
            throw ConfigError("invalid grid point (" + where + "): " + e.what());
        }
        points.push_back(cfg);
        // Odometer increment, last axis fastest.
        done = true;
        for (std::size_t a = n_axes; a-- > 0;) {
            if (++idx[a] < spec.axes[a].values.size()) {
                done = false;
                break;
            }
            idx[a] = 0;
        }
    }

    std::vector<ResultRow> rows;
    for (const auto& cfg : points) {
        const auto result = run_ensemble(cfg, spec.n_samples, workers);
        auto point_rows = rows_from_ensemble(cfg, spec.n_samples, result.summary, spec.outputs);
        rows.insert(rows.end(), point_rows.begin(), point_rows.end());
    }
    return rows;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_result_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "# mg-csv v1\n";
    out << "n_agents,s,signal_mode,m,d,update_mode,payoff_kind,pref_dist,rho,t_equil,t_measure,"
           "seed,n_samples,observable,mean,se\n";
    for (const auto& r : rows) {
        const auto& c = r.cfg;
        out << c.n_agents << ',' << c.s << ',' << to_string(c.signal_mode) << ',' << c.m << ','
            << c.signal_dim() << ',' << to_string(c.update_mode) << ',' << to_string(c.payoff_kind)
            << ',' << to_string(c.pref_dist) << ',' << format_real(c.rho) << ','
            << c.equilibration_steps() << ',' << c.t_measure << ',' << c.seed << ',' << r.n_samples
            << ',' << r.observable << ',' << format_real(r.mean) << ',' << format_real(r.se)
            << '\n';
    }
}

} // namespace mg
