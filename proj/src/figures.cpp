#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "mg/game.hpp"
#include "mg/harness.hpp"
#include "mg/rng.hpp"
#include "mg/theory.hpp"
#include "mg/version.hpp"

namespace mg {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(n);
    const double step = (std::log(hi) - std::log(lo)) / (n - 1);
    for (int i = 0; i < n; ++i) out.push_back(std::exp(std::log(lo) + step * i));
    return out;
}

class CsvFile {
  public:
    CsvFile(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        out_ << "# mg-csv v1\n" << header << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

std::string fmt(double x) { return format_real(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(long x) { return std::to_string(x); }

json config_json(const GameConfig& c) {
    return json{{"n_agents", c.n_agents},
                {"s", c.s},
                {"m", c.m},
                {"d", c.signal_dim()},
                {"signal_mode", to_string(c.signal_mode)},
                {"update_mode", to_string(c.update_mode)},
                {"payoff_kind", to_string(c.payoff_kind)},
                {"pref_dist", to_string(c.pref_dist)},
                {"rho", c.rho},
                {"t_equil", c.equilibration_steps()},
                {"t_measure", c.t_measure},
                {"seed", c.seed}};
}

// One figure job: runs body() with a context for emitting files, then writes
// the metadata sidecar (configs, seeds, build version, wall time).
struct JobContext {
    fs::path dir;
    int scale = 1;
    int workers = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> files;
    json configs = json::array();

    int samples(int paper_count) const { return std::max(1, paper_count / scale); }
    long window(long paper_window) const { return std::max<long>(100, paper_window / scale); }

    GameConfig base() const {
        GameConfig c;
        c.seed = seed;
        return c;
    }
    void note(const GameConfig& c, int n_samples) {
        json j = config_json(c);
        j["n_samples"] = n_samples;
        configs.push_back(j);
    }
    fs::path file(const std::string& name) {
        files.push_back((dir / name).string());
        return dir / name;
    }
};

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

void job_fig1(JobContext& ctx) {
    CsvFile csv(ctx.file("fig1.csv"), "payoff_kind,m,alpha,rho,sigma2_over_n,se");
    const int n_samples = ctx.samples(1000);
    for (PayoffKind kind : {PayoffKind::linear, PayoffKind::step}) {
        for (int m = 1; m <= 7; ++m) {
            for (double rho : {0.0, 0.25, 1.0, 4.0}) {
                GameConfig c = ctx.base();
                c.n_agents = 251;
                c.m = m;
                c.payoff_kind = kind;
                c.rho = rho;
                c.t_measure = ctx.window(2000);
                ctx.note(c, n_samples);
                const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
                csv.row({to_string(kind), fmt(m), fmt(c.alpha()), fmt(rho),
                         fmt(r.sigma2_over_n), fmt(r.sigma2_se)});
            }
        }
    }
}

void job_fig2(JobContext& ctx) {
    CsvFile csv(ctx.file("fig2.csv"), "payoff_kind,m,n_agents,alpha,rho,sigma2_over_n,se");
    const int n_samples = ctx.samples(1000);
    const auto rhos_linear = log_grid(1e-3, 10.0, 14);
    const struct {
        int m;
        int n;
    } linear_cases[] = {{1, 1001}, {2, 401}, {3, 401}};
    for (const auto& lc : linear_cases) {
        GameConfig c = ctx.base();
        c.n_agents = lc.n;
        c.m = lc.m;
        c.t_measure = ctx.window(2000);
        for (double rho : rhos_linear) {
            c.rho = rho;
            ctx.note(c, n_samples);
            const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
            csv.row({"linear", fmt(lc.m), fmt(lc.n), fmt(c.alpha()), fmt(rho),
                     fmt(r.sigma2_over_n), fmt(r.sigma2_se)});
        }
    }
    const auto rhos_step = log_grid(1e-2, 100.0, 10);
    for (int n : {127, 511, 2047}) {
        GameConfig c = ctx.base();
        c.n_agents = n;
        c.m = 1;
        c.payoff_kind = PayoffKind::step;
        c.t_measure = ctx.window(2000);
        for (double rho : rhos_step) {
            c.rho = rho;
            ctx.note(c, n_samples);
            const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
            csv.row({"step", "1", fmt(n), fmt(c.alpha()), fmt(rho), fmt(r.sigma2_over_n),
                     fmt(r.sigma2_se)});
        }
    }
}

void job_fig4(JobContext& ctx) {
    CsvFile csv(ctx.file("fig4.csv"), "rho,t_state,t_pop,discard_fraction");
    const int n_samples = ctx.samples(1000);
    GameConfig c = ctx.base();
    c.n_agents = 255;
    c.m = 1;
    c.t_measure = ctx.window(4000);
    for (double rho : log_grid(1e-3, 10.0, 13)) {
        c.rho = rho;
        ctx.note(c, n_samples);
        const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
        csv.row({fmt(rho), fmt(r.t_state ? *r.t_state : std::nan("")),
                 fmt(r.t_pop ? *r.t_pop : std::nan("")), fmt(r.state_discard_fraction)});
    }
}

void job_fig5(JobContext& ctx) {
    CsvFile csv(ctx.file("fig5.csv"),
                "rho,s1,s1_se,s2,s2_se,sigma2_over_n,se,theory_sigma2_map,theory_sigma2_selfcons");
    const int n_samples = ctx.samples(1000);
    const int n_real = ctx.samples(1000);
    GameConfig c = ctx.base();
    c.n_agents = 1001;
    c.m = 1;
    c.t_measure = ctx.window(2000);
    for (double rho : log_grid(0.01, 1.0, 15)) {
        c.rho = rho;
        ctx.note(c, n_samples);
        const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
        const double map_sigma2 = gaussian_map_sigma2(rho, c.n_agents, c.equilibration_steps(),
                                                      ctx.window(2000), n_real, ctx.seed);
        const double selfcons = theory_sigma2(solve_delta_a1(rho), c.n_agents);
        csv.row({fmt(rho), fmt(r.s_ranked[0] ? *r.s_ranked[0] : std::nan("")),
                 fmt(r.s_ranked_se[0]), fmt(r.s_ranked[1] ? *r.s_ranked[1] : std::nan("")),
                 fmt(r.s_ranked_se[1]), fmt(r.sigma2_over_n), fmt(r.sigma2_se), fmt(map_sigma2),
                 fmt(selfcons)});
    }
}

void job_fig6(JobContext& ctx, int m) {
    const std::string name = m == 2 ? "fig6a.csv" : "fig6b.csv";
    const int d = 1 << m;
    std::string header = "rho";
    for (int r = 1; r <= d; ++r) header += ",s" + std::to_string(r);
    CsvFile csv(ctx.file(name), header);
    const int n_samples = ctx.samples(1000);
    GameConfig c = ctx.base();
    c.n_agents = 1001;
    c.m = m;
    c.t_measure = ctx.window(2000);
    for (double rho : log_grid(0.01, 1.0, 15)) {
        c.rho = rho;
        ctx.note(c, n_samples);
        const auto res = run_ensemble(c, n_samples, ctx.workers).summary;
        std::vector<std::string> cells{fmt(rho)};
        for (int r = 0; r < d; ++r)
            cells.push_back(fmt(res.s_ranked[r] ? *res.s_ranked[r] : std::nan("")));
        csv.row(cells);
    }
}

void job_fig7(JobContext& ctx) {
    CsvFile csv(ctx.file("fig7.csv"), "m,update_mode,rho,sigma2_over_n,se");
    const int n_samples = ctx.samples(1000);
    for (int m : {1, 4}) {
        for (UpdateMode mode : {UpdateMode::online, UpdateMode::batch}) {
            GameConfig c = ctx.base();
            c.n_agents = 1001;
            c.m = m;
            c.update_mode = mode;
            c.t_measure = ctx.window(2000);
            for (double rho : log_grid(0.01, 1.0, 12)) {
                c.rho = rho;
                ctx.note(c, n_samples);
                const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
                csv.row({fmt(m), to_string(mode), fmt(rho), fmt(r.sigma2_over_n),
                         fmt(r.sigma2_se)});
            }
        }
    }
}

// Time-averaged isotropy of the batch bimodal theory map over random initial
// conditions.
std::pair<double, double> bimodal_map_isotropy(double rho, int n_agents, long t_equil,
                                               long t_measure, int n_real, std::uint64_t seed) {
    double u_acc = 0.0, v_acc = 0.0;
    const double init_sd = 1.0 / std::sqrt(static_cast<double>(n_agents));
    for (int r = 0; r < n_real; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        TheoryState st;
        st.a_vec = {init_sd * rng.normal(), init_sd * rng.normal()};
        st.k_vec = {0.0, 0.0};
        st.rho = rho;
        st.n_agents = n_agents;
        for (long t = 0; t < t_equil; ++t) bimodal_map_m1(st, UpdateMode::batch);
        double u_sum = 0.0, v_sum = 0.0;
        for (long t = 0; t < t_measure; ++t) {
            const double a0 = st.a_vec[0];
            const double a1 = st.a_vec[1];
            bimodal_map_m1(st, UpdateMode::batch);
            const double d0 = st.a_vec[0] - a0;
            const double d1 = st.a_vec[1] - a1;
            const double axial = d1 * d1 - d0 * d0;
            const double diag = 2.0 * d1 * d0;
            u_sum += axial * axial;
            v_sum += diag * diag;
        }
        u_acc += u_sum / t_measure;
        v_acc += v_sum / t_measure;
    }
    return {u_acc / n_real, v_acc / n_real};
}

void job_fig8(JobContext& ctx) {
    CsvFile csv(ctx.file("fig8.csv"), "rho,u1,u1_se,v1,v1_se,theory_u1,theory_v1");
    const int n_samples = ctx.samples(1000);
    GameConfig c = ctx.base();
    c.n_agents = 1001;
    c.m = 1;
    c.update_mode = UpdateMode::batch;
    c.pref_dist = PrefDist::bimodal;
    c.t_measure = ctx.window(2000);
    for (double rho : log_grid(0.01, 1.0, 15)) {
        c.rho = rho;
        ctx.note(c, n_samples);
        const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
        const auto [tu, tv] = bimodal_map_isotropy(rho, c.n_agents, c.equilibration_steps(),
                                                   ctx.window(2000), ctx.samples(1000), ctx.seed);
        csv.row({fmt(rho), fmt(r.u1 ? *r.u1 : std::nan("")), fmt(r.u1_se),
                 fmt(r.v1 ? *r.v1 : std::nan("")), fmt(r.v1_se), fmt(tu), fmt(tv)});
    }
}

void job_fig10(JobContext& ctx) {
    {
        CsvFile csv(ctx.file("fig10_fractions.csv"), "rho,class1,class2,class3,class4");
        const int n_samples = ctx.samples(200);
        GameConfig c = ctx.base();
        c.n_agents = 1001;
        c.m = 3;
        c.update_mode = UpdateMode::batch;
        c.pref_dist = PrefDist::bimodal;
        c.t_measure = ctx.window(2000);
        for (double rho : log_grid(0.01, 1.0, 13)) {
            c.rho = rho;
            ctx.note(c, n_samples);
            const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
            csv.row({fmt(rho), fmt(r.class_fractions[0]), fmt(r.class_fractions[1]),
                     fmt(r.class_fractions[2]), fmt(r.class_fractions[3])});
        }
    }
    const struct {
        const char* name;
        PrefDist dist;
        double rho;
    } cases[] = {{"fig10_attractor_gaussian.csv", PrefDist::gaussian, 0.01},
                 {"fig10_attractor_bimodal_low.csv", PrefDist::bimodal, 0.004},
                 {"fig10_attractor_bimodal_high.csv", PrefDist::bimodal, 0.04}};
    for (const auto& cs : cases) {
        GameConfig c = ctx.base();
        c.n_agents = 1001;
        c.m = 1;
        c.update_mode = UpdateMode::batch;
        c.pref_dist = cs.dist;
        c.rho = cs.rho;
        c.t_measure = ctx.window(4000);
        ctx.note(c, 1);
        ObservableSeries series;
        run_sample(c, derive_seed(c.seed, 0), &series);
        CsvFile csv(ctx.file(cs.name), "t,a0,a1");
        for (const auto& rec : series.records)
            csv.row({fmt(rec.t), fmt(rec.a_vec_before[0]), fmt(rec.a_vec_before[1])});
    }
}

void job_fig11(JobContext& ctx) {
    CsvFile csv(ctx.file("fig11.csv"), "alpha,n_agents,rho,activity,se");
    const int n_samples = ctx.samples(1000);
    for (int n : {125, 63}) { // alpha = 2/N: 0.016 and ~0.032
        GameConfig c = ctx.base();
        c.n_agents = n;
        c.m = 1;
        c.update_mode = UpdateMode::batch;
        c.pref_dist = PrefDist::bimodal;
        c.t_measure = ctx.window(4000);
        for (double rho : log_grid(0.01, 1.0, 15)) {
            c.rho = rho;
            ctx.note(c, n_samples);
            const auto r = run_ensemble(c, n_samples, ctx.workers).summary;
            csv.row({fmt(c.alpha()), fmt(n), fmt(rho), fmt(r.activity), fmt(r.activity_se)});
        }
    }
}

void job_fig12(JobContext& ctx) {
    for (double rho : {0.01, 0.4}) {
        GameConfig c = ctx.base();
        c.n_agents = 1001;
        c.m = 1;
        c.update_mode = UpdateMode::batch;
        c.pref_dist = PrefDist::bimodal;
        c.rho = rho;
        c.t_measure = ctx.window(20000);
        ctx.note(c, 1);
        ObservableSeries series;
        run_sample(c, derive_seed(c.seed, 0), &series);
        const auto traces = payoff_component_series(series);
        const std::string name = rho < 0.1 ? "fig12_low_rho.csv" : "fig12_high_rho.csv";
        CsvFile csv(ctx.file(name), "t,k0,k1");
        for (std::size_t t = 0; t < traces[0].size(); ++t)
            csv.row({fmt(static_cast<long>(t)), fmt(traces[0][t]), fmt(traces[1][t])});
    }
}

GameConfig quadratic_base(JobContext& ctx) {
    GameConfig c = ctx.base();
    c.n_agents = 255;
    c.m = 1;
    c.payoff_kind = PayoffKind::quadratic;
    c.t_measure = ctx.window(2000);
    return c;
}

void job_fig13(JobContext& ctx) {
    CsvFile csv(ctx.file("fig13.csv"), "rho,rank,sigma2_over_n");
    CsvFile frac(ctx.file("fig13_fractions.csv"), "rho,small_fraction");
    const int n_samples = ctx.samples(1000);
    GameConfig c = quadratic_base(ctx);
    for (double rho : {0.004, 0.008, 0.032, 1.0}) {
        c.rho = rho;
        ctx.note(c, n_samples);
        const auto result = run_ensemble(c, n_samples, ctx.workers);
        std::vector<double> variances;
        variances.reserve(result.samples.size());
        for (const auto& s : result.samples) variances.push_back(s.sigma2_over_n);
        std::sort(variances.begin(), variances.end());
        for (std::size_t i = 0; i < variances.size(); ++i)
            csv.row({fmt(rho), fmt(static_cast<long>(i + 1)), fmt(variances[i])});
        frac.row({fmt(rho), fmt(small_variance_fraction(variances))});
    }
}

void job_fig14(JobContext& ctx) {
    CsvFile csv(ctx.file("fig14.csv"), "rho,boundary,sqrtN_a0_init,sqrtN_a1_init,sigma2_over_n,small");
    const int n_samples = ctx.samples(1000);
    GameConfig c = quadratic_base(ctx);
    const double sqrt_n = std::sqrt(static_cast<double>(c.n_agents));
    for (double rho : {0.004, 0.063, 0.251, 0.501}) {
        c.rho = rho;
        ctx.note(c, n_samples);
        const auto result = run_ensemble(c, n_samples, ctx.workers);
        std::vector<double> variances;
        for (const auto& s : result.samples) variances.push_back(s.sigma2_over_n);
        std::vector<double> sorted = variances;
        std::sort(sorted.begin(), sorted.end());
        const double frac = small_variance_fraction(sorted);
        const std::size_t n_small = static_cast<std::size_t>(std::lround(frac * sorted.size()));
        const double threshold = n_small < sorted.size() ? sorted[n_small] : sorted.back() + 1.0;
        const auto [boundary, p_small] = quadratic_basin(rho);
        (void)p_small;
        for (const auto& s : result.samples)
            csv.row({fmt(rho), fmt(boundary), fmt(sqrt_n * s.initial_a[0]),
                     fmt(sqrt_n * s.initial_a[1]), fmt(s.sigma2_over_n),
                     s.sigma2_over_n < threshold ? "1" : "0"});
    }
}

void job_fig15(JobContext& ctx) {
    CsvFile csv(ctx.file("fig15.csv"), "rho,p_small_theory,p_small_sim");
    const int n_samples = ctx.samples(1000);
    GameConfig c = quadratic_base(ctx);
    for (double rho : log_grid(0.004, 1.0, 12)) {
        c.rho = rho;
        ctx.note(c, n_samples);
        const auto result = run_ensemble(c, n_samples, ctx.workers);
        std::vector<double> variances;
        for (const auto& s : result.samples) variances.push_back(s.sigma2_over_n);
        csv.row({fmt(rho), fmt(quadratic_basin(rho).second),
                 fmt(small_variance_fraction(std::move(variances)))});
    }
}

} // namespace

std::vector<std::string> figure_job_names() {
    return {"fig1", "fig2", "fig4", "fig5", "fig6a", "fig6b", "fig7",
            "fig8", "fig10", "fig11", "fig12", "fig13", "fig14", "fig15"};
}

FigureOutput figure_job(const std::string& name, const std::string& out_dir, int scale,
                        int workers, std::uint64_t seed) {
    if (scale < 1) throw ConfigError("scale must be >= 1");
    const auto names = figure_job_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string known;
        for (const auto& n : names) {
            if (!known.empty()) known += ", ";
            known += n;
        }
        throw ConfigError("unknown figure job '" + name + "'; available: " + known);
    }

    JobContext ctx;
    ctx.dir = out_dir;
    ctx.scale = scale;
    ctx.workers = workers;
    ctx.seed = seed;
    fs::create_directories(ctx.dir);

    const std::string started = iso_now();
    const auto t0 = std::chrono::steady_clock::now();
    if (name == "fig1") job_fig1(ctx);
    else if (name == "fig2") job_fig2(ctx);
    else if (name == "fig4") job_fig4(ctx);
    else if (name == "fig5") job_fig5(ctx);
    else if (name == "fig6a") job_fig6(ctx, 2);
    else if (name == "fig6b") job_fig6(ctx, 3);
    else if (name == "fig7") job_fig7(ctx);
    else if (name == "fig8") job_fig8(ctx);
    else if (name == "fig10") job_fig10(ctx);
    else if (name == "fig11") job_fig11(ctx);
    else if (name == "fig12") job_fig12(ctx);
    else if (name == "fig13") job_fig13(ctx);
    else if (name == "fig14") job_fig14(ctx);
    else if (name == "fig15") job_fig15(ctx);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);

    json meta{{"tool", "mg"},
              {"version", build_version},
              {"job", name},
              {"scale", scale},
              {"workers", workers},
              {"seed_base", seed},
              {"started_at", started},
              {"duration_seconds", elapsed.count()},
              {"files", ctx.files},
              {"configs", ctx.configs}};
    const fs::path meta_path = ctx.dir / (name + ".meta.json");
    std::ofstream out(meta_path);
    out << meta.dump(2) << '\n';

    FigureOutput result;
    result.files = ctx.files;
    result.files.push_back(meta_path.string());
    return result;
}

} // namespace mg
