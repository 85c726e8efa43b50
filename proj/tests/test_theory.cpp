#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mg/game.hpp"
#include "mg/harness.hpp"
#include "mg/rng.hpp"
#include "mg/theory.hpp"

using namespace mg;

namespace {

constexpr double pi = 3.14159265358979323846;

// Independent route to the m=1 population mean: enumerate the 16 ordered
// strategy pairs, with the preference bias acting on the second strategy.
// P(play first) = P(omega < score gap). Gaussian uses the normal CDF,
// bimodal the two-atom distribution with ties counted half.
double enum_mean_a(int mu, double k0, double k1, double r, bool bimodal) {
    static constexpr int strat[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    auto heaviside = [](double y) { return y > 0.0 ? 1.0 : (y < 0.0 ? 0.0 : 0.5); };
    double total = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double gap = k0 * (strat[a][0] - strat[b][0]) + k1 * (strat[a][1] - strat[b][1]);
            double p;
            if (bimodal) {
                const double c = std::sqrt(r);
                p = 0.5 * (heaviside(gap - c) + heaviside(gap + c));
            } else {
                p = 0.5 * (1.0 + std::erf(gap / std::sqrt(2.0 * r)));
            }
            total += strat[b][mu] + (strat[a][mu] - strat[b][mu]) * p;
        }
    }
    return total / 16.0;
}

} // namespace

TEST_CASE("reduced_map_step: linear slopes at the marked diversities") {
    // rho = 2/pi: slope 0, the component lands on zero.
    std::vector<double> a{0.0, 0.7};
    reduced_map_step(a, 2.0 / pi, PayoffKind::linear, 1);
    CHECK(std::abs(a[1]) < 1e-14);

    // rho = 1/(2 pi): slope -1, marginal oscillation.
    a = {0.0, 0.7};
    reduced_map_step(a, 1.0 / (2.0 * pi), PayoffKind::linear, 1);
    CHECK(a[1] == doctest::Approx(-0.7).epsilon(1e-12));

    // rho below the transition: |slope| > 1, the component grows.
    a = {0.0, 0.01};
    double prev = 0.01;
    for (int t = 0; t < 20; ++t) {
        reduced_map_step(a, 0.05, PayoffKind::linear, 1);
        CHECK(std::abs(a[1]) > std::abs(prev));
        prev = a[1];
    }

    CHECK_THROWS_AS(reduced_map_step(a, 0.0, PayoffKind::linear, 1), std::invalid_argument);
    CHECK_THROWS_AS(reduced_map_step(a, -1.0, PayoffKind::linear, 1), std::invalid_argument);
}

TEST_CASE("reduced_map_step: exactly linear in the component") {
    for (double rho : {0.05, 0.2, 1.0}) {
        std::vector<double> a{0.3, 0.0}, b{0.6, 0.0};
        reduced_map_step(a, rho, PayoffKind::linear, 0);
        reduced_map_step(b, rho, PayoffKind::linear, 0);
        CHECK(b[0] == 2.0 * a[0]);
    }
}

TEST_CASE("solve_delta_a1: roots and paper point") {
    CHECK(solve_delta_a1(0.2) == 0.0);
    CHECK(solve_delta_a1(1.0 / (2.0 * pi)) == 0.0);
    CHECK(solve_delta_a1(0.0459) == doctest::Approx(0.9775).epsilon(5e-4));

    // Damped fixed-point iteration as an independent solver at rho = 0.1.
    double x = 0.5;
    for (int i = 0; i < 200; ++i) x = std::erf(x / std::sqrt(0.8));
    CHECK(solve_delta_a1(0.1) == doctest::Approx(x).epsilon(1e-8));
    CHECK(solve_delta_a1(0.1) == doctest::Approx(0.79).epsilon(0.01));

    CHECK_THROWS_AS(solve_delta_a1(0.0), std::invalid_argument);
}

TEST_CASE("solve_delta_a1: residual, positivity and monotonicity") {
    double prev = 1.5;
    for (double rho : {0.001, 0.01, 0.03, 0.0459, 0.08, 0.1, 0.12, 0.14, 0.155}) {
        const double root = solve_delta_a1(rho);
        CHECK(root > 0.0);
        CHECK(std::abs(root - std::erf(root / std::sqrt(8.0 * rho))) < 1e-9);
        CHECK(root <= prev);
        prev = root;
    }
}

TEST_CASE("theory_sigma2 values") {
    CHECK(theory_sigma2(0.0, 1001) == 0.0);
    CHECK(theory_sigma2(1.0, 1001) == 31.28125);
    const double composed = theory_sigma2(solve_delta_a1(0.0459), 1001);
    CHECK(composed == doctest::Approx(29.9).epsilon(0.01));
}

TEST_CASE("cascade transition points") {
    const auto first = first_transition();
    CHECK(first.rho_c == doctest::Approx(0.1591549).epsilon(1e-6));
    CHECK(first.onset_value == 0.0);
    CHECK(first.order == 1);
    const auto second = second_transition();
    CHECK(second.rho_c == doctest::Approx(0.0459).epsilon(0.02));
    CHECK(second.onset_value == doctest::Approx(0.9775).epsilon(1e-3));
    CHECK(second.order == 2);
    CHECK(second.rho_c < first.rho_c);
}

TEST_CASE("stability coefficient and second critical diversity") {
    CHECK(stability_coefficient(0.0459, 0.9775) == doctest::Approx(1.0).epsilon(0.01));
    const double rho = 0.15;
    CHECK(stability_coefficient(rho, solve_delta_a1(rho)) < 1.0);
    // Algebraic identity at the first transition with a vanishing step.
    CHECK(stability_coefficient(1.0 / (2.0 * pi), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(critical_rho_second() == doctest::Approx(0.0459).epsilon(0.03));
    CHECK(std::abs(critical_rho_second() - 0.0459) < 0.001);
}

TEST_CASE("gaussian_map_m1: origin is a fixed point") {
    TheoryState st;
    st.a_vec = {0.0, 0.0};
    st.k_vec = {0.0, 0.0};
    st.rho = 0.1;
    st.n_agents = 1001;
    for (int t = 0; t < 8; ++t) {
        gaussian_map_m1(st);
        CHECK(st.a_vec[0] == 0.0);
        CHECK(st.a_vec[1] == 0.0);
    }
}

TEST_CASE("gaussian_map_m1: origin Jacobian matches the reduced-map slope") {
    const double h = 1e-6;
    for (double rho : {0.05, 0.1, 0.3}) {
        TheoryState st;
        st.a_vec = {h, 0.0};
        st.k_vec = {0.0, 0.0};
        st.rho = rho;
        st.n_agents = 1001;
        st.mu_star = 0;
        gaussian_map_m1(st);
        const double slope = st.a_vec[0] / h;
        CHECK(slope == doctest::Approx(1.0 - std::sqrt(2.0 / (pi * rho))).epsilon(1e-4));
        // The non-historical component stays put at linear order.
        CHECK(std::abs(st.a_vec[1]) < 1e-9);
    }
}

TEST_CASE("gaussian_map_m1 matches the pair-enumeration oracle") {
    Rng rng(404);
    for (int rep = 0; rep < 50; ++rep) {
        const double rho = 0.02 + rng.uniform01();
        const int n = 1001;
        const double r = rho * n;
        TheoryState st;
        st.a_vec = {0.2 * (rng.uniform01() - 0.5), 0.2 * (rng.uniform01() - 0.5)};
        st.k_vec = {3.0 * (rng.uniform01() - 0.5), 3.0 * (rng.uniform01() - 0.5)};
        st.rho = rho;
        st.n_agents = n;
        st.t = 0;
        st.mu_star = 0;
        const auto a_before = st.a_vec;
        const auto k_before = st.k_vec;
        gaussian_map_m1(st);
        const double k0_next = k_before[0] - std::sqrt(static_cast<double>(n)) * a_before[0];
        for (int mu = 0; mu < 2; ++mu) {
            const double expect = a_before[mu] +
                                  enum_mean_a(mu, k0_next, k_before[1], r, false) -
                                  enum_mean_a(mu, k_before[0], k_before[1], r, false);
            CHECK(st.a_vec[mu] == doctest::Approx(expect).epsilon(1e-12));
        }
        CHECK(st.k_vec[0] == k0_next);
        CHECK(st.k_vec[1] == k_before[1]);
    }
}

TEST_CASE("bimodal_map_m1: origin is a fixed point in both modes") {
    for (auto mode : {UpdateMode::online, UpdateMode::batch}) {
        TheoryState st;
        st.a_vec = {0.0, 0.0};
        st.k_vec = {0.0, 0.0};
        st.rho = 0.04;
        st.n_agents = 1001;
        for (int t = 0; t < 8; ++t) {
            bimodal_map_m1(st, mode);
            CHECK(st.a_vec[0] == 0.0);
            CHECK(st.a_vec[1] == 0.0);
        }
    }
}

TEST_CASE("bimodal_map_m1 matches the pair-enumeration oracle") {
    Rng rng(405);
    for (int rep = 0; rep < 50; ++rep) {
        const double rho = rng.uniform01();
        const int n = 441; // sqrt(N) integral keeps the Theta arguments clean
        const double r = rho * n;
        for (auto mode : {UpdateMode::online, UpdateMode::batch}) {
            TheoryState st;
            st.a_vec = {0.2 * (rng.uniform01() - 0.5), 0.2 * (rng.uniform01() - 0.5)};
            st.k_vec = {3.0 * (rng.uniform01() - 0.5), 3.0 * (rng.uniform01() - 0.5)};
            st.rho = rho;
            st.n_agents = n;
            st.t = 0;
            st.mu_star = 0;
            const auto a_before = st.a_vec;
            const auto k_before = st.k_vec;
            bimodal_map_m1(st, mode);
            const double sqrt_n = std::sqrt(static_cast<double>(n));
            const double k0_next = k_before[0] - sqrt_n * a_before[0];
            const double k1_next =
                mode == UpdateMode::batch ? k_before[1] - sqrt_n * a_before[1] : k_before[1];
            for (int mu = 0; mu < 2; ++mu) {
                const double expect = a_before[mu] +
                                      enum_mean_a(mu, k0_next, k1_next, r, true) -
                                      enum_mean_a(mu, k_before[0], k_before[1], r, true);
                CHECK(st.a_vec[mu] == doctest::Approx(expect).epsilon(1e-12));
            }
            // Step bound: each Theta combination sums at most 16 unit terms.
            CHECK(std::abs(st.a_vec[0] - a_before[0]) <= 1.0);
            CHECK(std::abs(st.a_vec[1] - a_before[1]) <= 1.0);
        }
    }
}

TEST_CASE("bimodal map at rho=0 matches a one-step batch simulation") {
    // With vanishing diversity the Theta map collapses to sign counting;
    // compare the predicted mean step against the engine over fresh samples.
    const int n = 1001;
    const int n_samples = 400;
    GameConfig cfg;
    cfg.n_agents = n;
    cfg.s = 2;
    cfg.m = 1;
    cfg.update_mode = UpdateMode::batch;
    cfg.pref_dist = PrefDist::bimodal;
    cfg.rho = 0.0;
    double sim0 = 0.0, sim1 = 0.0, map0 = 0.0, map1 = 0.0;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n_samples; ++i) {
        cfg.seed = 7000 + i;
        Game g(cfg);
        const auto a0 = g.a_vec();
        const auto rec = g.step();
        sim0 += rec.delta_a[0];
        sim1 += rec.delta_a[1];

        TheoryState st;
        st.a_vec = a0;
        st.k_vec = {0.0, 0.0};
        st.rho = 0.0;
        st.n_agents = n;
        bimodal_map_m1(st, UpdateMode::batch);
        map0 += st.a_vec[0] - a0[0];
        map1 += st.a_vec[1] - a0[1];
        // Cross-check the map against the enumeration at these arguments.
        const double expect0 = enum_mean_a(0, -sqrt_n * a0[0], -sqrt_n * a0[1], 0.0, true);
        CHECK(st.a_vec[0] - a0[0] == doctest::Approx(expect0).epsilon(1e-12));
    }
    CHECK(sim0 / n_samples == doctest::Approx(map0 / n_samples).epsilon(0.05));
    CHECK(sim1 / n_samples == doctest::Approx(map1 / n_samples).epsilon(0.05));
}

TEST_CASE("quadratic_map_step: fixed point, boundary orbit, interior decay") {
    const int n = 255;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (double rho : {0.01, 0.1, 1.0}) {
        const double boundary = std::sqrt(2.0 * pi * rho); // sqrt(N) A units

        std::vector<double> a{0.0, 0.0};
        quadratic_map_step(a, rho, n, 0);
        CHECK(a[0] == 0.0);

        // On the boundary the map reflects the component.
        a = {boundary / sqrt_n, 0.0};
        quadratic_map_step(a, rho, n, 0);
        CHECK(a[0] == doctest::Approx(-boundary / sqrt_n).epsilon(1e-10));

        // Inside: strict decay toward the origin.
        a = {0.5 * boundary / sqrt_n, 0.0};
        double prev = std::abs(a[0]);
        for (int it = 0; it < 200; ++it) {
            quadratic_map_step(a, rho, n, 0);
            CHECK(std::abs(a[0]) <= prev);
            prev = std::abs(a[0]);
        }
        CHECK(std::abs(a[0]) < 1e-10);
    }
    std::vector<double> a{0.1};
    CHECK_THROWS_AS(quadratic_map_step(a, 0.0, 255, 0), std::invalid_argument);
}

TEST_CASE("quadratic_map_step: basin dichotomy") {
    // Inside the basin the decay is algebraic (u -> u - 2u^2 in boundary
    // units, so u ~ 1/2t); outside, growth is superexponential.
    const int n = 255;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (double rho : {0.01, 0.1, 1.0}) {
        const auto [boundary, p_small] = quadratic_basin(rho);
        (void)p_small;

        std::vector<double> inside{0.9 * boundary / sqrt_n};
        for (int it = 0; it < 50000; ++it) quadratic_map_step(inside, rho, n, 0);
        CHECK(std::abs(inside[0]) * sqrt_n < 1e-4 * boundary);

        std::vector<double> outside{(1.0 + 1e-3) * boundary / sqrt_n};
        bool diverged = false;
        for (int it = 0; it < 100 && !diverged; ++it) {
            quadratic_map_step(outside, rho, n, 0);
            if (std::abs(outside[0]) * sqrt_n > 1e6) diverged = true;
        }
        CHECK(diverged);
    }
}

TEST_CASE("quadratic_basin: values, monotonicity and limits") {
    CHECK(quadratic_basin(0.0).first == 0.0);
    CHECK(quadratic_basin(0.0).second == 0.0);
    CHECK(quadratic_basin(1.0).second == doctest::Approx(0.976).epsilon(1e-3));
    CHECK(quadratic_basin(0.251).second == doctest::Approx(0.626).epsilon(2e-3));
    double prev = -1.0;
    for (double rho = 0.0; rho <= 5.0; rho += 0.05) {
        const double p = quadratic_basin(rho).second;
        CHECK(p >= prev);
        CHECK(p <= 1.0);
        prev = p;
    }
    CHECK(quadratic_basin(50.0).second == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gaussian_map_sigma2 approaches the self-consistent value") {
    // Between the two transitions a single direction bifurcates, so the
    // iterated map should reproduce N (dA1)^2 / 32.
    const int n = 1001;
    const double rho = 0.1;
    const double expect = theory_sigma2(solve_delta_a1(rho), n);
    const double got = gaussian_map_sigma2(rho, n, 400, 2000, 200, 42);
    CHECK(got == doctest::Approx(expect).epsilon(0.05));
}
