#include "mg/game.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mg {

StrategyTable::StrategyTable(int n_agents, int s, int d)
    : n_(n_agents), s_(s), d_(d),
      data_(static_cast<std::size_t>(n_agents) * s * d, 1) {}

StrategyTable StrategyTable::random(int n_agents, int s, int d, Rng& rng) {
    StrategyTable t(n_agents, s, d);
    // Fill from 64-bit blocks, one bit per entry.
    std::uint64_t block = 0;
    int bits_left = 0;
    for (auto& v : t.data_) {
        if (bits_left == 0) {
            block = rng.next_u64();
            bits_left = 64;
        }
        v = (block & 1u) ? std::int8_t{1} : std::int8_t{-1};
        block >>= 1;
        --bits_left;
    }
    return t;
}

std::vector<double> sample_preferences(PrefDist dist, double rho, int n_agents, int s, Rng& rng) {
    if (!(rho >= 0.0)) throw std::invalid_argument("sample_preferences: rho must be >= 0");
    if (n_agents < 1) throw std::invalid_argument("sample_preferences: n_agents must be >= 1");
    std::vector<double> omega(static_cast<std::size_t>(n_agents) * s, 0.0);
    const double scale = std::sqrt(rho * n_agents);
    for (int i = 0; i < n_agents; ++i) {
        for (int a = 1; a < s; ++a) {
            double w = 0.0;
            if (scale > 0.0) {
                if (dist == PrefDist::gaussian) w = scale * rng.normal();
                else w = rng.coin() ? scale : -scale;
            }
            omega[static_cast<std::size_t>(i) * s + a] = w;
        }
    }
    return omega;
}

double payoff_value(PayoffKind kind, double x) {
    switch (kind) {
        case PayoffKind::step: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        case PayoffKind::linear: return x;
        case PayoffKind::quadratic: return x > 0.0 ? x * x : (x < 0.0 ? -x * x : 0.0);
    }
    return 0.0;
}

int select_strategy(std::span<const double> scores, Rng& rng) {
    assert(!scores.empty());
    int best = 0;
    std::uint64_t tied = 1;
    for (int a = 1; a < static_cast<int>(scores.size()); ++a) {
        if (scores[a] > scores[best]) {
            best = a;
            tied = 1;
        } else if (scores[a] == scores[best]) {
            // Reservoir draw keeps the choice uniform over the tied set.
            ++tied;
            if (rng.below(tied) == 0) best = a;
        }
    }
    return best;
}

Game::Game(const GameConfig& cfg)
    : cfg_(cfg), d_(cfg.signal_dim()), sqrt_n_(std::sqrt(static_cast<double>(cfg.n_agents))),
      rng_(cfg.seed), table_(StrategyTable::random(cfg.n_agents, cfg.s, cfg.signal_dim(), rng_)) {
    cfg_.validate();
    board_.omega_bias = sample_preferences(cfg_.pref_dist, cfg_.rho, cfg_.n_agents, cfg_.s, rng_);
    board_.score = board_.omega_bias;
    init_state();
}

Game::Game(const GameConfig& cfg, StrategyTable table, std::vector<double> omega)
    : cfg_(cfg), d_(cfg.signal_dim()), sqrt_n_(std::sqrt(static_cast<double>(cfg.n_agents))),
      rng_(cfg.seed), table_(std::move(table)) {
    cfg_.validate();
    if (table_.n_agents() != cfg_.n_agents || table_.strategies() != cfg_.s ||
        table_.signal_dim() != d_)
        throw std::invalid_argument("Game: strategy table dimensions do not match config");
    if (omega.size() != static_cast<std::size_t>(cfg_.n_agents) * cfg_.s)
        throw std::invalid_argument("Game: omega table has wrong size");
    for (int i = 0; i < cfg_.n_agents; ++i)
        if (omega[static_cast<std::size_t>(i) * cfg_.s] != 0.0)
            throw std::invalid_argument("Game: omega for the first strategy must be 0");
    board_.omega_bias = std::move(omega);
    board_.score = board_.omega_bias;
    init_state();
}

void Game::init_state() {
    if (cfg_.signal_mode == SignalMode::endogenous) {
        history_ = 0;
        for (int b = 0; b < cfg_.m; ++b) history_ = (history_ << 1) | (rng_.coin() ? 1 : 0);
    }
    active_.assign(cfg_.n_agents, 0);
    sum_vec_.assign(d_, 0.0);
    a_vec_.assign(d_, 0.0);
    k_vec_.assign(d_, 0.0);
    for (int i = 0; i < cfg_.n_agents; ++i) {
        const std::span<const double> row{board_.score.data() + static_cast<std::size_t>(i) * cfg_.s,
                                          static_cast<std::size_t>(cfg_.s)};
        const int a = select_strategy(row, rng_);
        active_[i] = a;
        const auto xi = table_.row(i, a);
        for (int mu = 0; mu < d_; ++mu) sum_vec_[mu] += xi[mu];
    }
    for (int mu = 0; mu < d_; ++mu) a_vec_[mu] = sum_vec_[mu] / cfg_.n_agents;
}

int Game::next_signal() {
    if (cfg_.signal_mode == SignalMode::endogenous) return history_;
    return static_cast<int>(rng_.below(static_cast<std::uint64_t>(d_)));
}

double Game::excess_demand(int mu) const {
    if (mu < 0 || mu >= d_) throw std::out_of_range("excess_demand: mu outside [0, D)");
    double sum = 0.0;
    for (int i = 0; i < cfg_.n_agents; ++i) sum += table_.at(i, active_[i], mu);
    return sum / cfg_.n_agents;
}

void Game::reassign_actives() {
    for (int i = 0; i < cfg_.n_agents; ++i) {
        const std::span<const double> row{board_.score.data() + static_cast<std::size_t>(i) * cfg_.s,
                                          static_cast<std::size_t>(cfg_.s)};
        const int a = select_strategy(row, rng_);
        const int prev = active_[i];
        if (a != prev) {
            const auto xi_new = table_.row(i, a);
            const auto xi_old = table_.row(i, prev);
            for (int mu = 0; mu < d_; ++mu) sum_vec_[mu] += xi_new[mu] - xi_old[mu];
            active_[i] = a;
        }
    }
    for (int mu = 0; mu < d_; ++mu) a_vec_[mu] = sum_vec_[mu] / cfg_.n_agents;
}

StepRecord Game::step() {
    // Batch updates act on every signal at once; the step's mu* is then only
    // a uniformly drawn reporting signal and no history is kept.
    const int mu = cfg_.update_mode == UpdateMode::batch
                       ? static_cast<int>(rng_.below(static_cast<std::uint64_t>(d_)))
                       : next_signal();
    mu_star_ = mu;
    if (cfg_.update_mode == UpdateMode::online) return advance_online(mu);
    return advance_batch(mu);
}

StepRecord Game::advance_online(int mu) {
    StepRecord rec;
    rec.t = t_;
    rec.mu_star = mu;
    rec.a_vec_before = a_vec_;
    const double attendance = a_vec_[mu];
    rec.attendance = attendance;

    const double phi = payoff_value(cfg_.payoff_kind, sqrt_n_ * attendance);
    double* score = board_.score.data();
    for (int i = 0; i < cfg_.n_agents; ++i) {
        for (int a = 0; a < cfg_.s; ++a)
            score[static_cast<std::size_t>(i) * cfg_.s + a] -= table_.at(i, a, mu) * phi;
    }
    k_vec_[mu] -= phi;

    if (cfg_.signal_mode == SignalMode::endogenous) {
        // Minority wins: the winning bit is 1 exactly when A(t) < 0.
        history_ = append_winning_bit(history_, attendance < 0.0 ? 1 : 0, cfg_.m);
    }

    reassign_actives();
    rec.delta_a.resize(d_);
    for (int nu = 0; nu < d_; ++nu) rec.delta_a[nu] = a_vec_[nu] - rec.a_vec_before[nu];
    ++t_;
    return rec;
}

StepRecord Game::advance_batch(int mu) {
    StepRecord rec;
    rec.t = t_;
    rec.mu_star = mu; // reporting signal only; the update touches every component
    rec.a_vec_before = a_vec_;
    rec.attendance = a_vec_[mu];

    std::vector<double> phi(d_);
    for (int nu = 0; nu < d_; ++nu) phi[nu] = payoff_value(cfg_.payoff_kind, sqrt_n_ * a_vec_[nu]);
    double* score = board_.score.data();
    for (int i = 0; i < cfg_.n_agents; ++i) {
        for (int a = 0; a < cfg_.s; ++a) {
            const auto xi = table_.row(i, a);
            double& sc = score[static_cast<std::size_t>(i) * cfg_.s + a];
            for (int nu = 0; nu < d_; ++nu) sc -= xi[nu] * phi[nu];
        }
    }
    for (int nu = 0; nu < d_; ++nu) k_vec_[nu] -= phi[nu];

    reassign_actives();
    rec.delta_a.resize(d_);
    for (int nu = 0; nu < d_; ++nu) rec.delta_a[nu] = a_vec_[nu] - rec.a_vec_before[nu];
    ++t_;
    return rec;
}

} // namespace mg
