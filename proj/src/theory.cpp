#include "mg/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "mg/game.hpp"
#include "mg/rng.hpp"

namespace mg {

namespace {

constexpr double pi = 3.14159265358979323846;

// Historical signal sequence of the m=1 attractor.
constexpr int attractor_cycle[4] = {0, 1, 1, 0};

double bisect(double lo, double hi, double tol, auto&& f) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void check_rho(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("map requires rho > 0");
}

// Mean A^mu of a Gaussian-preference population as a function of the payoff
// components, m=1: (1/8)[erf((2u+2v)/s) + erf((2u-2v)/s) + 2 erf(2u/s)],
// s = sqrt(2R). The equations of motion are differences of this functional.
double gaussian_mean_a(double k_mu, double k_bar, double sqrt_2r) {
    return 0.125 * (std::erf((2.0 * k_mu + 2.0 * k_bar) / sqrt_2r) +
                    std::erf((2.0 * k_mu - 2.0 * k_bar) / sqrt_2r) +
                    2.0 * std::erf(2.0 * k_mu / sqrt_2r));
}

// Cross term erf((2u+2v)/s) - erf((2u-2v)/s) driving the non-historical
// component.
double gaussian_cross(double k_mu, double k_bar, double sqrt_2r) {
    return 0.125 * (std::erf((2.0 * k_mu + 2.0 * k_bar) / sqrt_2r) -
                    std::erf((2.0 * k_mu - 2.0 * k_bar) / sqrt_2r));
}

double sgn0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Theta1(y) + Theta2(y) - Theta1(-y) - Theta2(-y) with Theta(0) = 1/2
// collapses to sgn(y + c) + sgn(y - c), c = sqrt(rho N).
double bimodal_pair_sum(double y, double c) { return sgn0(y + c) + sgn0(y - c); }

double bimodal_mean_a(double k_mu, double k_bar, double c) {
    return (bimodal_pair_sum(2.0 * k_mu + 2.0 * k_bar, c) +
            2.0 * bimodal_pair_sum(2.0 * k_mu, c) +
            bimodal_pair_sum(2.0 * k_mu - 2.0 * k_bar, c)) /
           16.0;
}

double bimodal_cross(double k_mu, double k_bar, double c) {
    return (bimodal_pair_sum(2.0 * k_mu + 2.0 * k_bar, c) -
            bimodal_pair_sum(2.0 * k_mu - 2.0 * k_bar, c)) /
           16.0;
}

void check_m1_state(const TheoryState& state) {
    if (state.a_vec.size() != 2 || state.k_vec.size() != 2)
        throw std::invalid_argument("m=1 map requires D = 2");
    if (state.n_agents < 1) throw std::invalid_argument("m=1 map requires n_agents >= 1");
}

} // namespace

void reduced_map_step(std::vector<double>& a_vec, double rho, PayoffKind kind, int mu_star) {
    check_rho(rho);
    double& x = a_vec.at(mu_star);
    x -= std::sqrt(2.0 / (pi * rho)) * payoff_value(kind, x);
}

double solve_delta_a1(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("solve_delta_a1: rho must be > 0");
    if (rho >= rho_critical_first) return 0.0;
    const double denom = std::sqrt(8.0 * rho);
    return bisect(1e-6, 1.0, 1e-10, [&](double x) { return x - std::erf(x / denom); });
}

double theory_sigma2(double delta_a1, int n_agents) {
    return n_agents * delta_a1 * delta_a1 / 32.0;
}

double stability_coefficient(double rho, double delta_a1) {
    if (!(rho > 0.0)) throw std::invalid_argument("stability_coefficient: rho must be > 0");
    const double c = 1.0 - (1.0 + std::exp(-delta_a1 * delta_a1 / (8.0 * rho))) / std::sqrt(2.0 * pi * rho);
    return c * c;
}

double critical_rho_second() {
    // Unstable below the root; lambda crosses 1 from above as rho grows
    // through ~0.046 and stays below 1 until the first transition.
    return bisect(0.01, 0.1, 1e-10,
                  [](double rho) { return stability_coefficient(rho, solve_delta_a1(rho)) - 1.0; });
}

BifurcationPoint first_transition() { return {rho_critical_first, 0.0, 1}; }

BifurcationPoint second_transition() {
    const double rho = critical_rho_second();
    return {rho, solve_delta_a1(rho), 2};
}

void gaussian_map_m1(TheoryState& state) {
    check_m1_state(state);
    check_rho(state.rho);
    const double sqrt_2r = std::sqrt(2.0 * state.rho * state.n_agents);
    const double sqrt_n = std::sqrt(static_cast<double>(state.n_agents));
    const int mu = state.mu_star;
    const int bar = 1 - mu;

    const double k_mu = state.k_vec[mu];
    const double k_bar = state.k_vec[bar];
    const double k_mu_next = k_mu - sqrt_n * state.a_vec[mu];

    state.a_vec[mu] += gaussian_mean_a(k_mu_next, k_bar, sqrt_2r) - gaussian_mean_a(k_mu, k_bar, sqrt_2r);
    state.a_vec[bar] += gaussian_cross(k_mu_next, k_bar, sqrt_2r) - gaussian_cross(k_mu, k_bar, sqrt_2r);
    state.k_vec[mu] = k_mu_next;

    ++state.t;
    state.mu_star = attractor_cycle[state.t & 3];
}

void bimodal_map_m1(TheoryState& state, UpdateMode mode) {
    check_m1_state(state);
    if (!(state.rho >= 0.0)) throw std::invalid_argument("bimodal_map_m1: rho must be >= 0");
    const double c = std::sqrt(state.rho * state.n_agents);
    const double sqrt_n = std::sqrt(static_cast<double>(state.n_agents));

    if (mode == UpdateMode::online) {
        const int mu = state.mu_star;
        const int bar = 1 - mu;
        const double k_mu = state.k_vec[mu];
        const double k_bar = state.k_vec[bar];
        const double k_mu_next = k_mu - sqrt_n * state.a_vec[mu];
        state.a_vec[mu] += bimodal_mean_a(k_mu_next, k_bar, c) - bimodal_mean_a(k_mu, k_bar, c);
        state.a_vec[bar] += bimodal_cross(k_mu_next, k_bar, c) - bimodal_cross(k_mu, k_bar, c);
        state.k_vec[mu] = k_mu_next;
        ++state.t;
        state.mu_star = attractor_cycle[state.t & 3];
        return;
    }

    const double k0 = state.k_vec[0];
    const double k1 = state.k_vec[1];
    const double k0_next = k0 - sqrt_n * state.a_vec[0];
    const double k1_next = k1 - sqrt_n * state.a_vec[1];
    state.a_vec[0] += bimodal_mean_a(k0_next, k1_next, c) - bimodal_mean_a(k0, k1, c);
    state.a_vec[1] += bimodal_mean_a(k1_next, k0_next, c) - bimodal_mean_a(k1, k0, c);
    state.k_vec[0] = k0_next;
    state.k_vec[1] = k1_next;
    ++state.t;
}

void quadratic_map_step(std::vector<double>& a_vec, double rho, int n_agents, int mu_star) {
    check_rho(rho);
    const double r = rho * n_agents;
    double& a = a_vec.at(mu_star);
    const double x = std::sqrt(static_cast<double>(n_agents)) * a;
    a -= std::sqrt(2.0 / (pi * r)) * x * x * sgn0(a);
}

std::pair<double, double> quadratic_basin(double rho) {
    if (!(rho >= 0.0)) throw std::invalid_argument("quadratic_basin: rho must be >= 0");
    const double boundary = std::sqrt(2.0 * pi * rho);
    const double e = std::erf(std::sqrt(pi * rho));
    return {boundary, e * e};
}

double gaussian_map_sigma2(double rho, int n_agents, long t_equil, long t_measure,
                           int n_realizations, std::uint64_t seed) {
    if (n_realizations < 1) throw std::invalid_argument("gaussian_map_sigma2: need >= 1 realization");
    const double init_sd = 1.0 / std::sqrt(static_cast<double>(n_agents));
    double acc = 0.0;
    for (int r = 0; r < n_realizations; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        TheoryState st;
        st.a_vec = {init_sd * rng.normal(), init_sd * rng.normal()};
        st.k_vec = {0.0, 0.0};
        st.rho = rho;
        st.n_agents = n_agents;
        st.mu_star = attractor_cycle[0];
        for (long t = 0; t < t_equil; ++t) gaussian_map_m1(st);
        double sum = 0.0, sum_sq = 0.0;
        for (long t = 0; t < t_measure; ++t) {
            const double att = st.a_vec[st.mu_star];
            sum += att;
            sum_sq += att * att;
            gaussian_map_m1(st);
        }
        const double mean = sum / t_measure;
        const double var = std::max(0.0, sum_sq / t_measure - mean * mean);
        acc += 0.25 * n_agents * var;
    }
    return acc / n_realizations;
}

} // namespace mg
