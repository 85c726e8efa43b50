#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mg/config.hpp"
#include "mg/measure.hpp"

namespace mg {

// Everything measured on one seeded game.
struct SampleStats {
    double sigma2_over_n = 0.0;
    std::vector<std::optional<double>> s_ranked;
    std::optional<double> u1, v1;
    double activity = 0.0;
    std::optional<double> t_state;
    std::optional<double> t_pop;
    std::array<double, 4> class_fractions{0.0, 0.0, 0.0, 0.0};
    std::vector<double> initial_a; // A^mu(0)
};

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<SampleStats> samples;
};

// Runs one game with the given per-sample seed and measures it. Convergence
// times are produced for online endogenous m=1 runs. When keep_series is
// given, the measurement-window series (with k snapshots) is copied there.
SampleStats run_sample(const GameConfig& cfg, std::uint64_t sample_seed,
                       ObservableSeries* keep_series = nullptr);

// n_samples independent games seeded from cfg.seed; results are combined in
// sample-index order, so the outcome does not depend on the worker count.
EnsembleResult run_ensemble(const GameConfig& cfg, int n_samples, int workers = 1);

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepSpec {
    GameConfig base;
    std::vector<SweepAxis> axes;
    int n_samples = 100;
    std::vector<std::string> outputs; // empty = every applicable observable
};

SweepSpec parse_sweep_text(const std::string& text);
SweepSpec load_sweep_file(const std::string& path);

struct ResultRow {
    GameConfig cfg;
    int n_samples = 0;
    std::string observable;
    double mean = 0.0;
    double se = 0.0;
};

// Expands the Cartesian grid (validating every point first), runs each
// point and returns one row per (point, observable).
std::vector<ResultRow> sweep(const SweepSpec& spec, int workers = 1);

std::vector<ResultRow> rows_from_ensemble(const GameConfig& cfg, int n_samples,
                                          const EnsembleSummary& summary,
                                          const std::vector<std::string>& outputs);

// CSV v1: "# mg-csv v1" header line, then column names; reals at 17
// significant digits. Byte-identical for identical inputs.
void write_result_csv(const std::string& path, const std::vector<ResultRow>& rows);

std::string format_real(double x);

// Figure-reproduction jobs. Every job writes its dataset CSVs plus one
// metadata sidecar into out_dir; scale divides sample counts and the
// measurement window, never the population size.
struct FigureOutput {
    std::vector<std::string> files;
};
FigureOutput figure_job(const std::string& name, const std::string& out_dir, int scale = 1,
                        int workers = 1, std::uint64_t seed = 9001);
std::vector<std::string> figure_job_names();

} // namespace mg
