#include "mg/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mg {

namespace {

struct Moments {
    long n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double variance() const {
        if (n == 0) return 0.0;
        const double m = mean();
        return std::max(0.0, sum_sq / n - m * m);
    }
};

} // namespace

double attendance_variance(const ObservableSeries& series) {
    if (series.records.empty()) throw std::invalid_argument("attendance_variance: empty window");
    Moments m;
    for (const auto& r : series.records) m.add(r.attendance);
    return 0.25 * series.n_agents * m.variance();
}

std::vector<std::optional<double>> ranked_signal_variances(const ObservableSeries& series) {
    std::vector<Moments> per_signal(series.d);
    for (const auto& r : series.records) per_signal[r.mu_star].add(r.a_vec_before[r.mu_star]);
    std::vector<std::optional<double>> out;
    out.reserve(series.d);
    std::vector<double> present;
    int absent = 0;
    for (const auto& m : per_signal) {
        if (m.n >= 2) present.push_back(0.25 * series.n_agents * m.variance());
        else ++absent;
    }
    std::sort(present.begin(), present.end(), std::greater<>());
    for (double v : present) out.emplace_back(v);
    for (int i = 0; i < absent; ++i) out.emplace_back(std::nullopt);
    return out;
}

std::optional<long> state_convergence_time(const ObservableSeries& series, int m) {
    if (m != 1) throw std::invalid_argument("state_convergence_time: attractor defined for m = 1 only");
    // Cyclic shifts of 0,1,1,0.
    static constexpr std::array<std::array<int, 4>, 4> patterns{{
        {0, 1, 1, 0}, {1, 1, 0, 0}, {1, 0, 0, 1}, {0, 0, 1, 1}}};
    const auto& recs = series.records;
    if (recs.size() < 4) return std::nullopt;
    for (std::size_t t = 0; t + 4 <= recs.size(); ++t) {
        for (const auto& p : patterns) {
            bool match = true;
            for (int j = 0; j < 4; ++j) {
                if (recs[t + j].mu_star != p[j]) {
                    match = false;
                    break;
                }
            }
            if (match) return static_cast<long>(t);
        }
    }
    return std::nullopt;
}

std::optional<double> population_convergence_time(const ObservableSeries& series, int d) {
    const long period = 2L * d;
    const auto& recs = series.records;
    const long n = static_cast<long>(recs.size());
    if (n < 20 * period)
        throw std::invalid_argument("population_convergence_time: window shorter than 20 periods");

    // Periodic trend from the steady tail (final half).
    std::vector<Moments> phase(period);
    for (long t = n / 2; t < n; ++t) phase[t % period].add(recs[t].attendance);
    std::vector<double> trend(period);
    for (long i = 0; i < period; ++i) trend[i] = phase[i].mean();

    std::vector<double> residual(n);
    for (long t = 0; t < n; ++t) residual[t] = std::abs(recs[t].attendance - trend[t % period]);

    // Baseline: median residual of the final quartile.
    std::vector<double> tail(residual.begin() + 3 * n / 4, residual.end());
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    const double baseline = tail[tail.size() / 2];

    long t_end = n;
    for (long t = 0; t < n; ++t) {
        if (residual[t] <= baseline) {
            t_end = t;
            break;
        }
    }
    if (t_end < 2) return 0.0; // no transient

    // Least squares on log(residual - baseline) over the transient.
    Moments mx, my;
    double sxy = 0.0, sxx = 0.0;
    long count = 0;
    for (long t = 0; t < t_end; ++t) {
        const double y = residual[t] - baseline;
        if (y <= 0.0) continue;
        const double ly = std::log(y);
        mx.add(static_cast<double>(t));
        my.add(ly);
        sxy += static_cast<double>(t) * ly;
        sxx += static_cast<double>(t) * static_cast<double>(t);
        ++count;
    }
    if (count < 2) return 0.0;
    const double denom = sxx - mx.sum * mx.sum / count;
    if (denom <= 0.0) return std::nullopt;
    const double slope = (sxy - mx.sum * my.sum / count) / denom;
    if (slope >= 0.0) return std::nullopt;
    const double tau = -1.0 / slope;
    // A decay slower than the observed window is indistinguishable from no
    // decay at all.
    if (tau > static_cast<double>(n)) return std::nullopt;
    return tau;
}

IsotropyParams isotropy_params(const ObservableSeries& series) {
    if (series.d != 2) throw std::invalid_argument("isotropy_params: requires D = 2");
    Moments u, v;
    for (const auto& r : series.records) {
        const double d0 = r.delta_a[0];
        const double d1 = r.delta_a[1];
        const double axial = d1 * d1 - d0 * d0;
        const double diag = 2.0 * d1 * d0;
        u.add(axial * axial);
        v.add(diag * diag);
    }
    return {u.mean(), v.mean()};
}

int classify_step_vector(std::span<const double> abs_delta, double theta_large) {
    int large = 0;
    for (double x : abs_delta)
        if (x > theta_large) ++large;
    if (large == 0) return 1;
    if (large == 1) return 2;
    if (large == 2) return 3;
    return 4;
}

double activity(const ObservableSeries& series, double epsilon) {
    if (series.records.empty()) throw std::invalid_argument("activity: empty window");
    long away = 0;
    for (const auto& r : series.records) {
        double peak = 0.0;
        for (double a : r.a_vec_before) peak = std::max(peak, std::abs(a));
        if (peak > epsilon) ++away;
    }
    return static_cast<double>(away) / series.records.size();
}

std::vector<std::vector<double>> payoff_component_series(const ObservableSeries& series) {
    if (series.k_snapshots.empty())
        throw std::invalid_argument("payoff_component_series: k snapshots were not recorded");
    std::vector<std::vector<double>> traces(series.d);
    for (auto& t : traces) t.reserve(series.k_snapshots.size());
    for (const auto& snap : series.k_snapshots)
        for (int mu = 0; mu < series.d; ++mu) traces[mu].push_back(snap[mu]);
    return traces;
}

std::array<double, 4> step_class_fractions(const ObservableSeries& series, double theta_large) {
    std::array<double, 4> counts{0.0, 0.0, 0.0, 0.0};
    if (series.records.empty()) return counts;
    std::vector<double> abs_delta(series.d);
    for (const auto& r : series.records) {
        for (int mu = 0; mu < series.d; ++mu) abs_delta[mu] = std::abs(r.delta_a[mu]);
        counts[classify_step_vector(abs_delta, theta_large) - 1] += 1.0;
    }
    for (auto& c : counts) c /= static_cast<double>(series.records.size());
    return counts;
}

double small_variance_fraction(std::vector<double> variances) {
    const std::size_t n = variances.size();
    if (n == 0) return 0.0;
    if (n == 1) return 1.0;
    std::sort(variances.begin(), variances.end());
    // Zero variances cannot be logged; clamp to a floor well below anything
    // a finite window can produce.
    const double floor_v = 1e-300;
    double best_gap = -1.0;
    std::size_t split = n; // all small when no gap found
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double gap = std::log(std::max(variances[i + 1], floor_v)) -
                           std::log(std::max(variances[i], floor_v));
        if (gap > best_gap) {
            best_gap = gap;
            split = i + 1;
        }
    }
    return static_cast<double>(split) / static_cast<double>(n);
}

} // namespace mg
