#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mg/game.hpp"

namespace mg {

// Consecutive step records over a measurement window, plus optional k_mu
// snapshots (taken after each step) when the caller asked for them.
struct ObservableSeries {
    std::vector<StepRecord> records;
    std::vector<std::vector<double>> k_snapshots;
    int d = 0;
    int n_agents = 0;
};

// Aggregated observables over an ensemble of samples.
struct EnsembleSummary {
    double sigma2_over_n = 0.0;
    double sigma2_se = 0.0;
    std::vector<std::optional<double>> s_ranked; // descending, absent if a rank never resolved
    std::vector<double> s_ranked_se;
    std::optional<double> u1, v1;
    double u1_se = 0.0, v1_se = 0.0;
    double activity = 0.0;
    double activity_se = 0.0;
    std::optional<double> t_state;  // mean over converged samples
    std::optional<double> t_pop;
    double state_discard_fraction = 0.0; // samples that never reached the attractor
    std::array<double, 4> class_fractions{0.0, 0.0, 0.0, 0.0};
    int n_samples = 0;
};

// (N/4) Var(A^{mu*}) over the window.
double attendance_variance(const ObservableSeries& series);

// Per-signal conditional variance (N/4) Var(A^mu | mu = mu*), sorted
// descending. Signals seen fewer than twice yield an absent rank.
std::vector<std::optional<double>> ranked_signal_variances(const ObservableSeries& series);

// First step at which the mu* sequence enters the period-4 attractor
// 0,1,1,0 (any cyclic shift, one full period). Empty if never.
std::optional<long> state_convergence_time(const ObservableSeries& series, int m);

// Inverse exponential decay rate of |A(t) - periodic trend|. The trend is
// the phase average over t mod 2D on the steady tail; the baseline is the
// median residual of the final quartile. Empty when the fit fails.
std::optional<double> population_convergence_time(const ObservableSeries& series, int d);

// Axial/diagonal anisotropy of the step vectors, D = 2 only:
// U1 = <[(dA^1)^2 - (dA^0)^2]^2>, V1 = <[2 dA^1 dA^0]^2>.
struct IsotropyParams {
    double u1 = 0.0;
    double v1 = 0.0;
};
IsotropyParams isotropy_params(const ObservableSeries& series);

// Classes 1..4 by the number of components above theta_large (0, 1, 2, >2).
int classify_step_vector(std::span<const double> abs_delta, double theta_large);

// Fraction of steps with max_mu |A^mu| > epsilon.
double activity(const ObservableSeries& series, double epsilon);

// Per-signal cumulative payoff traces k_mu(t), for burst analysis.
std::vector<std::vector<double>> payoff_component_series(const ObservableSeries& series);

// Distribution of step-vector classes over the window.
std::array<double, 4> step_class_fractions(const ObservableSeries& series, double theta_large);

// Splits sample variances at the largest gap in log variance; returns the
// fraction that falls below the gap ("small variance" group).
double small_variance_fraction(std::vector<double> variances);

// Fixed analysis thresholds: bifurcated steps are O(1), quiet-phase motion
// O(N^{-1/2}), so 0.1 separates them for the population sizes in use.
inline constexpr double default_theta_large = 0.1;
inline constexpr double default_activity_epsilon = 0.1;

} // namespace mg
