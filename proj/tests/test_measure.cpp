#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mg/game.hpp"
#include "mg/measure.hpp"
#include "mg/rng.hpp"

using namespace mg;

namespace {

// Synthetic series with the given attendance stream; a_vec carries the
// attendance in component mu_star and zero elsewhere unless provided.
ObservableSeries series_from_attendance(const std::vector<double>& att,
                                        const std::vector<int>& mu, int d, int n_agents) {
    ObservableSeries s;
    s.d = d;
    s.n_agents = n_agents;
    for (std::size_t t = 0; t < att.size(); ++t) {
        StepRecord r;
        r.t = static_cast<long>(t);
        r.mu_star = mu[t % mu.size()];
        r.attendance = att[t];
        r.a_vec_before.assign(d, 0.0);
        r.a_vec_before[r.mu_star] = att[t];
        r.delta_a.assign(d, 0.0);
        s.records.push_back(std::move(r));
    }
    return s;
}

} // namespace

TEST_CASE("attendance_variance: constant series is zero") {
    const auto s = series_from_attendance(std::vector<double>(64, 0.37), {0, 1}, 2, 255);
    CHECK(attendance_variance(s) == 0.0);
}

TEST_CASE("attendance_variance: alternating and period-4 patterns") {
    const double delta = 0.6;
    const int n = 1001;
    // +-delta/2 in equal proportion: (N/16) delta^2.
    std::vector<double> alt;
    for (int t = 0; t < 400; ++t) alt.push_back(t % 2 ? delta / 2 : -delta / 2);
    const auto s1 = series_from_attendance(alt, {0, 1}, 2, n);
    CHECK(attendance_variance(s1) == doctest::Approx(n / 16.0 * delta * delta));

    // The attractor pattern (0, -delta/2, +delta/2, 0): (N/32) delta^2.
    std::vector<double> l_shape;
    for (int t = 0; t < 400; ++t) {
        const int phase = t % 4;
        l_shape.push_back(phase == 1 ? -delta / 2 : (phase == 2 ? delta / 2 : 0.0));
    }
    const auto s2 = series_from_attendance(l_shape, {0, 1, 1, 0}, 2, n);
    CHECK(attendance_variance(s2) == doctest::Approx(n / 32.0 * delta * delta));
}

TEST_CASE("attendance_variance: binomial coin oracle") {
    // A = (2 Binomial(N, 1/2) - N)/N gives sigma^2/N = 1/4.
    const int n = 255;
    Rng rng(99);
    std::vector<double> att;
    att.reserve(100000);
    for (int t = 0; t < 100000; ++t) {
        int ones = 0;
        for (int i = 0; i < n; i += 64) {
            const int bits = std::min(64, n - i);
            std::uint64_t w = rng.next_u64();
            if (bits < 64) w &= (1ULL << bits) - 1;
            ones += __builtin_popcountll(w);
        }
        att.push_back((2.0 * ones - n) / n);
    }
    const auto s = series_from_attendance(att, {0}, 1, n);
    CHECK(attendance_variance(s) == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("ranked_signal_variances: direct D=2 evaluation") {
    const int n = 1001;
    ObservableSeries s;
    s.d = 2;
    s.n_agents = n;
    for (int t = 0; t < 200; ++t) {
        StepRecord r;
        r.mu_star = t % 2;
        r.a_vec_before = {0.0, (t / 2) % 2 ? 0.5 : -0.5};
        r.attendance = r.a_vec_before[r.mu_star];
        r.delta_a = {0.0, 0.0};
        s.records.push_back(std::move(r));
    }
    const auto ranked = ranked_signal_variances(s);
    REQUIRE(ranked.size() == 2);
    CHECK(*ranked[0] == doctest::Approx(n / 16.0));
    CHECK(*ranked[1] == doctest::Approx(0.0));
}

TEST_CASE("ranked_signal_variances: sorted and relabel-invariant") {
    Rng rng(5);
    ObservableSeries s;
    s.d = 4;
    s.n_agents = 101;
    for (int t = 0; t < 2000; ++t) {
        StepRecord r;
        r.mu_star = static_cast<int>(rng.below(4));
        r.a_vec_before = {rng.uniform01() - 0.5, 0.3 * (rng.uniform01() - 0.5),
                          2.0 * (rng.uniform01() - 0.5), 0.0};
        r.attendance = r.a_vec_before[r.mu_star];
        r.delta_a.assign(4, 0.0);
        s.records.push_back(std::move(r));
    }
    const auto ranked = ranked_signal_variances(s);
    for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
        REQUIRE(ranked[i].has_value());
        CHECK(*ranked[i] >= *ranked[i + 1]);
    }

    // Relabel signals 0<->3, 1<->2: same multiset of variances.
    ObservableSeries relabeled = s;
    const int perm[4] = {3, 2, 1, 0};
    for (auto& r : relabeled.records) {
        r.mu_star = perm[r.mu_star];
        std::vector<double> a(4);
        for (int mu = 0; mu < 4; ++mu) a[perm[mu]] = r.a_vec_before[mu];
        r.a_vec_before = a;
    }
    const auto ranked2 = ranked_signal_variances(relabeled);
    for (std::size_t i = 0; i < ranked.size(); ++i)
        CHECK(*ranked[i] == doctest::Approx(*ranked2[i]));
}

TEST_CASE("ranked_signal_variances: unvisited signals are absent") {
    const auto s = series_from_attendance(std::vector<double>(50, 0.1), {0}, 2, 11);
    const auto ranked = ranked_signal_variances(s);
    CHECK(ranked[0].has_value());
    CHECK_FALSE(ranked[1].has_value());
}

TEST_CASE("state_convergence_time: immediate and shifted matches") {
    auto mk = [](std::vector<int> mus) {
        std::vector<double> att(mus.size(), 0.1);
        ObservableSeries s;
        s.d = 2;
        s.n_agents = 11;
        for (std::size_t t = 0; t < mus.size(); ++t) {
            StepRecord r;
            r.mu_star = mus[t];
            r.attendance = att[t];
            r.a_vec_before = {0.0, 0.0};
            r.delta_a = {0.0, 0.0};
            s.records.push_back(std::move(r));
        }
        return s;
    };
    CHECK(*state_convergence_time(mk({0, 1, 1, 0, 0, 1, 1, 0}), 1) == 0);
    CHECK(*state_convergence_time(mk({1, 1, 0, 0, 1, 1, 0}), 1) == 0);
    CHECK(*state_convergence_time(mk({1, 0, 1, 0, 1, 1, 0, 0}), 1) == 3);
    CHECK_FALSE(state_convergence_time(mk({0, 0, 0, 0, 0, 0, 0, 0}), 1).has_value());
    CHECK_THROWS_AS(state_convergence_time(mk({0, 1, 1, 0}), 2), std::invalid_argument);
}

// trend + sign-modulated residual: |A - trend| = c exp(-t/tau) + baseline,
// with the sign alternating per period so the phase averages stay on trend.
static std::vector<double> synthetic_decay(long len, double tau, double c, double baseline) {
    const double trend[4] = {0.0, -0.2, 0.2, 0.0};
    std::vector<double> att;
    att.reserve(len);
    for (long t = 0; t < len; ++t) {
        const double sign = (t / 4) % 2 == 0 ? 1.0 : -1.0;
        att.push_back(trend[t % 4] + sign * (c * std::exp(-t / tau) + baseline));
    }
    return att;
}

TEST_CASE("population_convergence_time: synthetic exponential") {
    const auto att = synthetic_decay(2000, 50.0, 0.5, 0.002);
    const auto s = series_from_attendance(att, {0, 1, 1, 0}, 2, 255);
    const auto got = population_convergence_time(s, 2);
    REQUIRE(got.has_value());
    CHECK(*got == doctest::Approx(50.0).epsilon(0.04));
}

TEST_CASE("population_convergence_time: no transient gives zero") {
    std::vector<double> att;
    for (long t = 0; t < 500; ++t) att.push_back(t % 4 == 1 ? -0.2 : (t % 4 == 2 ? 0.2 : 0.0));
    const auto s = series_from_attendance(att, {0, 1, 1, 0}, 2, 255);
    CHECK(*population_convergence_time(s, 2) == 0.0);
}

TEST_CASE("population_convergence_time: recovers tau across the range") {
    for (double tau : {10.0, 50.0, 150.0, 500.0}) {
        const long len = std::max<long>(2000, static_cast<long>(tau * 20));
        const auto att = synthetic_decay(len, tau, 0.8, 1e-3);
        const auto s = series_from_attendance(att, {0, 1, 1, 0}, 2, 1001);
        const auto got = population_convergence_time(s, 2);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(tau).epsilon(0.05));
    }
}

TEST_CASE("population_convergence_time: rejects short windows") {
    const auto s = series_from_attendance(std::vector<double>(30, 0.0), {0, 1, 1, 0}, 2, 11);
    CHECK_THROWS_AS(population_convergence_time(s, 2), std::invalid_argument);
}

TEST_CASE("isotropy_params: axial and diagonal motion") {
    ObservableSeries axial;
    axial.d = 2;
    axial.n_agents = 11;
    for (int t = 0; t < 10; ++t) {
        StepRecord r;
        r.mu_star = 0;
        r.a_vec_before = {0.0, 0.0};
        r.delta_a = {0.0, 1.0};
        axial.records.push_back(std::move(r));
    }
    const auto u = isotropy_params(axial);
    CHECK(u.u1 == 1.0);
    CHECK(u.v1 == 0.0);

    const double c = 0.7;
    ObservableSeries diag = axial;
    for (auto& r : diag.records) r.delta_a = {c, c};
    const auto v = isotropy_params(diag);
    CHECK(v.u1 == 0.0);
    CHECK(v.v1 == doctest::Approx(4.0 * c * c * c * c));

    ObservableSeries wrong;
    wrong.d = 3;
    CHECK_THROWS_AS(isotropy_params(wrong), std::invalid_argument);
}

TEST_CASE("classify_step_vector examples and permutation invariance") {
    const std::vector<double> small{0.01, 0.02, 0.0, 0.01};
    CHECK(classify_step_vector(small, 0.1) == 1);
    const std::vector<double> one{0.9, 0.02, 0.01, 0.0};
    CHECK(classify_step_vector(one, 0.1) == 2);
    const std::vector<double> two{0.9, 0.8, 0.01, 0.0};
    CHECK(classify_step_vector(two, 0.1) == 3);
    const std::vector<double> many{0.9, 0.8, 0.7, 0.6};
    CHECK(classify_step_vector(many, 0.1) == 4);

    Rng rng(2);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v;
        for (int i = 0; i < 4; ++i) v.push_back(rng.uniform01());
        std::vector<double> shuffled = v;
        std::swap(shuffled[0], shuffled[3]);
        std::swap(shuffled[1], shuffled[2]);
        CHECK(classify_step_vector(v, 0.1) == classify_step_vector(shuffled, 0.1));
    }
}

TEST_CASE("activity: extremes and monotonicity in epsilon") {
    const auto zeros = series_from_attendance(std::vector<double>(40, 0.0), {0}, 2, 11);
    CHECK(activity(zeros, 0.1) == 0.0);

    ObservableSeries ones;
    ones.d = 2;
    ones.n_agents = 11;
    for (int t = 0; t < 40; ++t) {
        StepRecord r;
        r.mu_star = 0;
        r.a_vec_before = {1.0, 1.0};
        r.attendance = 1.0;
        r.delta_a = {0.0, 0.0};
        ones.records.push_back(std::move(r));
    }
    CHECK(activity(ones, 0.1) == 1.0);

    Rng rng(31);
    ObservableSeries mixed;
    mixed.d = 2;
    mixed.n_agents = 11;
    for (int t = 0; t < 500; ++t) {
        StepRecord r;
        r.mu_star = 0;
        r.a_vec_before = {rng.uniform01() - 0.5, rng.uniform01() - 0.5};
        r.delta_a = {0.0, 0.0};
        mixed.records.push_back(std::move(r));
    }
    double prev = 2.0;
    for (double eps : {0.0, 0.1, 0.2, 0.3, 0.4}) {
        const double a = activity(mixed, eps);
        CHECK(a <= prev);
        prev = a;
    }
}

TEST_CASE("payoff_component_series: one online step moves only k_mu*") {
    GameConfig c;
    c.n_agents = 3;
    c.s = 1;
    c.m = 1;
    c.rho = 0.0;
    c.seed = 7;
    StrategyTable t(3, 1, 2);
    t.set(0, 0, 0, 1);
    t.set(1, 0, 0, 1);
    t.set(2, 0, 0, -1);
    t.set(0, 0, 1, -1);
    t.set(1, 0, 1, 1);
    t.set(2, 0, 1, 1);
    Game g(c, std::move(t), {0.0, 0.0, 0.0});
    const int mu0 = g.history();
    const double a0 = g.a_vec()[mu0];
    g.step();

    ObservableSeries s;
    s.d = 2;
    s.n_agents = 3;
    s.records.resize(1);
    s.k_snapshots.push_back(g.k_vec());
    const auto traces = payoff_component_series(s);
    CHECK(traces[mu0][0] == -std::sqrt(3.0) * a0);
    CHECK(traces[1 - mu0][0] == 0.0);

    ObservableSeries empty;
    empty.d = 2;
    CHECK_THROWS_AS(payoff_component_series(empty), std::invalid_argument);
}

TEST_CASE("small_variance_fraction: splits at the log gap") {
    CHECK(small_variance_fraction({1e-3, 2e-3, 4e-3, 10.0, 20.0}) == doctest::Approx(0.6));
    CHECK(small_variance_fraction({5.0, 50.0, 1e-4}) == doctest::Approx(1.0 / 3.0));
    CHECK(small_variance_fraction({}) == 0.0);
    CHECK(small_variance_fraction({1.0}) == 1.0);
    // Zero variances stay in the small group.
    CHECK(small_variance_fraction({0.0, 0.0, 1.0}) == doctest::Approx(2.0 / 3.0));
}
