#pragma once

#include <utility>
#include <vector>

#include "mg/config.hpp"

namespace mg {

// Deterministic analogue of the game state for the analytical maps.
// k_vec holds raw payoff components, updated as k_mu <- k_mu - sqrt(N) A^mu.
struct TheoryState {
    std::vector<double> a_vec;
    std::vector<double> k_vec;
    double rho = 0.0;
    int n_agents = 0;
    long t = 0;
    int mu_star = 0;
};

struct BifurcationPoint {
    double rho_c = 0.0;
    double onset_value = 0.0;
    int order = 0;
};

// One step of the reduced single-signal map in sqrt(N)*A units:
// x <- x - sqrt(2/(pi rho)) phi(x) on the mu* component. For linear payoffs
// this multiplies the component by 1 - sqrt(2/(pi rho)).
void reduced_map_step(std::vector<double>& a_vec, double rho, PayoffKind kind, int mu_star);

// Largest non-negative root of x = erf(x / sqrt(8 rho)). Zero is the only
// root for rho >= 1/(2 pi).
double solve_delta_a1(double rho);

// sigma^2/N = N (dA^1)^2 / 32.
double theory_sigma2(double delta_a1, int n_agents);

// Four-step amplification factor of a perturbation along the quiet
// direction; the secondary bifurcation sits where it reaches 1.
double stability_coefficient(double rho, double delta_a1);
double critical_rho_second();

// The two dynamical transitions of the linear-payoff m=1 cascade: step
// sizes bifurcate from zero at 1/(2 pi), the second direction follows near
// rho = 0.0459 where the step size is already large.
BifurcationPoint first_transition();
BifurcationPoint second_transition();

// Full m=1 equations of motion with Gaussian preferences, linear payoffs,
// online update. The historical signal follows the period-4 attractor cycle
// 0,1,1,0. Advances the state in place.
void gaussian_map_m1(TheoryState& state);

// m=1 equations of motion with bimodal preferences and linear payoffs.
// Online updates follow the same 0,1,1,0 cycle; batch updates act on both
// components. The step function evaluates to 1/2 at exactly zero.
void bimodal_map_m1(TheoryState& state, UpdateMode mode);

// One step of the quadratic reduced map on the mu* component (raw A units).
void quadratic_map_step(std::vector<double>& a_vec, double rho, int n_agents, int mu_star);

// Separatrix of the quadratic map in sqrt(N)*A units, and the probability
// that a fresh D=2 sample starts inside it on both components:
// boundary = sqrt(2 pi rho), p_small = erf(sqrt(pi rho))^2.
std::pair<double, double> quadratic_basin(double rho);

// Ensemble iteration of the m=1 Gaussian map from randomized initial
// conditions; returns the mean sigma^2/N over realizations.
double gaussian_map_sigma2(double rho, int n_agents, long t_equil, long t_measure,
                           int n_realizations, std::uint64_t seed);

inline constexpr double rho_critical_first = 0.15915494309189533577; // 1/(2 pi)

} // namespace mg
