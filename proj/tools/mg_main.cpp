#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mg/harness.hpp"
#include "mg/theory.hpp"
#include "mg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_config_error = 2;
constexpr int exit_runtime_error = 3;

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

json config_json(const mg::GameConfig& c) {
    return json{{"n_agents", c.n_agents},
                {"s", c.s},
                {"m", c.m},
                {"d", c.signal_dim()},
                {"signal_mode", mg::to_string(c.signal_mode)},
                {"update_mode", mg::to_string(c.update_mode)},
                {"payoff_kind", mg::to_string(c.payoff_kind)},
                {"pref_dist", mg::to_string(c.pref_dist)},
                {"rho", c.rho},
                {"t_equil", c.equilibration_steps()},
                {"t_measure", c.t_measure},
                {"seed", c.seed}};
}

void write_metadata(const fs::path& path, json meta) {
    meta["tool"] = "mg";
    meta["version"] = mg::build_version;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << meta.dump(2) << '\n';
}

void apply_scale(mg::GameConfig& cfg, int& n_samples, int scale) {
    if (scale < 1) throw mg::ConfigError("scale must be >= 1");
    n_samples = std::max(1, n_samples / scale);
    cfg.t_measure = std::max<long>(100, cfg.t_measure / scale);
}

int cmd_run(const std::string& config_path, int n_samples, int scale, int workers,
            const std::string& out_dir) {
    mg::GameConfig cfg = mg::load_config_file(config_path);
    apply_scale(cfg, n_samples, scale);
    fs::create_directories(out_dir);

    const std::string started = iso_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = mg::run_ensemble(cfg, n_samples, workers);
    const auto rows = mg::rows_from_ensemble(cfg, n_samples, result.summary, {});
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);

    const fs::path csv_path = fs::path(out_dir) / "results.csv";
    mg::write_result_csv(csv_path.string(), rows);
    write_metadata(fs::path(out_dir) / "results.meta.json",
                   json{{"kind", "run"},
                        {"config", config_json(cfg)},
                        {"n_samples", n_samples},
                        {"workers", workers},
                        {"seed_base", cfg.seed},
                        {"started_at", started},
                        {"duration_seconds", elapsed.count()},
                        {"files", {csv_path.string()}}});
    std::cout << csv_path.string() << '\n';
    return 0;
}

int cmd_sweep(const std::string& spec_path, int scale, int workers, const std::string& out_dir) {
    mg::SweepSpec spec = mg::load_sweep_file(spec_path);
    apply_scale(spec.base, spec.n_samples, scale);
    fs::create_directories(out_dir);

    const std::string started = iso_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = mg::sweep(spec, workers);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);

    const fs::path csv_path = fs::path(out_dir) / "sweep.csv";
    mg::write_result_csv(csv_path.string(), rows);
    json axes = json::array();
    for (const auto& a : spec.axes) axes.push_back({{"key", a.key}, {"values", a.values}});
    write_metadata(fs::path(out_dir) / "sweep.meta.json",
                   json{{"kind", "sweep"},
                        {"base_config", config_json(spec.base)},
                        {"axes", axes},
                        {"n_samples", spec.n_samples},
                        {"workers", workers},
                        {"seed_base", spec.base.seed},
                        {"started_at", started},
                        {"duration_seconds", elapsed.count()},
                        {"files", {csv_path.string()}}});
    std::cout << csv_path.string() << '\n';
    return 0;
}

int cmd_fig(const std::string& name, int scale, int workers, const std::string& out_dir,
            std::uint64_t seed) {
    const auto out = mg::figure_job(name, out_dir, scale, workers, seed);
    for (const auto& f : out.files) std::cout << f << '\n';
    return 0;
}

int cmd_theory(const std::string& op, double rho, double delta, int n_agents) {
    if (op == "delta_a1") {
        std::cout << mg::format_real(mg::solve_delta_a1(rho)) << '\n';
    } else if (op == "stability") {
        const double da = delta >= 0.0 ? delta : mg::solve_delta_a1(rho);
        std::cout << mg::format_real(mg::stability_coefficient(rho, da)) << '\n';
    } else if (op == "critical_rho") {
        std::cout << mg::format_real(mg::critical_rho_second()) << '\n';
    } else if (op == "sigma2") {
        const double da = delta >= 0.0 ? delta : mg::solve_delta_a1(rho);
        std::cout << mg::format_real(mg::theory_sigma2(da, n_agents)) << '\n';
    } else if (op == "basin") {
        const auto [boundary, p_small] = mg::quadratic_basin(rho);
        std::cout << "boundary " << mg::format_real(boundary) << '\n'
                  << "p_small " << mg::format_real(p_small) << '\n';
    } else if (op == "transitions") {
        for (const auto& b : {mg::first_transition(), mg::second_transition()})
            std::cout << "order " << b.order << " rho_c " << mg::format_real(b.rho_c)
                      << " onset " << mg::format_real(b.onset_value) << '\n';
    } else {
        throw mg::ConfigError("unknown theory op '" + op +
                              "'; available: delta_a1, stability, critical_rho, sigma2, basin, "
                              "transitions");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minority Game simulator and phase-space toolkit"};
    app.set_version_flag("--version", mg::build_version);
    app.require_subcommand(1);

    std::string config_path, spec_path, fig_name, theory_op, out_dir = "mg-out";
    int n_samples = 100, scale = 1, workers = 1;
    double rho = 0.1, delta = -1.0;
    int n_agents = 1001;
    std::uint64_t fig_seed = 9001;

    auto* run = app.add_subcommand("run", "Run one ensemble from a config file");
    run->add_option("--config", config_path, "Config file (key = value lines)")->required();
    run->add_option("--samples", n_samples, "Samples in the ensemble");
    run->add_option("--scale", scale, "Divide sample count and window by this factor");
    run->add_option("--workers", workers, "Worker threads");
    run->add_option("--out", out_dir, "Output directory");

    auto* sw = app.add_subcommand("sweep", "Run a parameter grid from a sweep file");
    sw->add_option("--spec", spec_path, "Sweep spec file")->required();
    sw->add_option("--scale", scale, "Divide sample count and window by this factor");
    sw->add_option("--workers", workers, "Worker threads");
    sw->add_option("--out", out_dir, "Output directory");

    auto* fig = app.add_subcommand("fig", "Reproduce a named figure dataset");
    fig->add_option("name", fig_name, "Figure job name")->required();
    fig->add_option("--scale", scale, "Divide sample count and window by this factor");
    fig->add_option("--workers", workers, "Worker threads");
    fig->add_option("--out", out_dir, "Output directory");
    fig->add_option("--seed", fig_seed, "Ensemble seed base");

    auto* th = app.add_subcommand("theory", "Evaluate the analytical solvers");
    th->add_option("op", theory_op, "delta_a1|stability|critical_rho|sigma2|basin|transitions")
        ->required();
    th->add_option("--rho", rho, "Diversity");
    th->add_option("--delta", delta, "Step size dA1 (defaults to the self-consistent root)");
    th->add_option("--n", n_agents, "Population size N");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, n_samples, scale, workers, out_dir);
        if (sw->parsed()) return cmd_sweep(spec_path, scale, workers, out_dir);
        if (fig->parsed()) return cmd_fig(fig_name, scale, workers, out_dir, fig_seed);
        if (th->parsed()) return cmd_theory(theory_op, rho, delta, n_agents);
    } catch (const mg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime_error;
    }
    return 0;
}
