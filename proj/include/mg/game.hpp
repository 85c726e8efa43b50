#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mg/config.hpp"
#include "mg/rng.hpp"

namespace mg {

// Signed unit decisions xi[i][a][mu] in {-1,+1}, dimensions N x s x D.
class StrategyTable {
  public:
    StrategyTable(int n_agents, int s, int d);
    static StrategyTable random(int n_agents, int s, int d, Rng& rng);

    std::int8_t at(int agent, int strat, int mu) const {
        return data_[(static_cast<std::size_t>(agent) * s_ + strat) * d_ + mu];
    }
    void set(int agent, int strat, int mu, std::int8_t v) {
        data_[(static_cast<std::size_t>(agent) * s_ + strat) * d_ + mu] = v;
    }
    std::span<const std::int8_t> row(int agent, int strat) const {
        return {data_.data() + (static_cast<std::size_t>(agent) * s_ + strat) * d_,
                static_cast<std::size_t>(d_)};
    }

    int n_agents() const { return n_; }
    int strategies() const { return s_; }
    int signal_dim() const { return d_; }

  private:
    int n_, s_, d_;
    std::vector<std::int8_t> data_;
};

// Initial preferences omega[i][a] (omega[i][0] == 0) plus the running
// cumulative payoffs, which start at the biases.
struct ScoreBoard {
    std::vector<double> omega_bias; // N x s, row-major
    std::vector<double> score;      // N x s, row-major

    double bias(int agent, int strat, int s) const { return omega_bias[static_cast<std::size_t>(agent) * s + strat]; }
    double at(int agent, int strat, int s) const { return score[static_cast<std::size_t>(agent) * s + strat]; }
};

// One time step: signal, attendance, the full phase-space vector before the
// step, and the signed step vector. delta_a can move in every component when
// agents switch strategies, not just along mu_star.
struct StepRecord {
    long t = 0;
    int mu_star = 0;
    double attendance = 0.0;           // A^{mu*}(t)
    std::vector<double> a_vec_before;  // A^mu(t)
    std::vector<double> delta_a;       // A^mu(t+1) - A^mu(t), signed
};

// Bias table with omega[i][0] = 0; gaussian draws have variance R = rho*N,
// bimodal draws are +-sqrt(rho*N) with equal probability.
std::vector<double> sample_preferences(PrefDist dist, double rho, int n_agents, int s, Rng& rng);

// step -> sgn(x), linear -> x, quadratic -> x^2 sgn(x); sgn(0) == 0.
double payoff_value(PayoffKind kind, double x);

// Index of the maximal score; exact ties broken uniformly at random.
int select_strategy(std::span<const double> scores, Rng& rng);

// History encoding: the most recent winning bit is the least significant bit
// of the signal.
inline int append_winning_bit(int history, int bit, int m) {
    return ((history << 1) | bit) & ((1 << m) - 1);
}

class Game {
  public:
    explicit Game(const GameConfig& cfg);
    // Injected tables, for hand-built instances. omega is N x s row-major.
    Game(const GameConfig& cfg, StrategyTable table, std::vector<double> omega);

    // Chooses the next signal (history encoding or uniform draw), runs one
    // update of the configured mode and returns the step's record.
    StepRecord step();

    // A^mu recomputed from the current active strategies.
    double excess_demand(int mu) const;

    const GameConfig& config() const { return cfg_; }
    int signal_dim() const { return d_; }
    long time() const { return t_; }
    int history() const { return history_; }
    int mu_star() const { return mu_star_; }
    const std::vector<double>& a_vec() const { return a_vec_; }
    const std::vector<double>& k_vec() const { return k_vec_; }
    const std::vector<int>& active() const { return active_; }
    const StrategyTable& strategy_table() const { return table_; }
    const ScoreBoard& scores() const { return board_; }
    Rng& rng() { return rng_; }

  private:
    void init_state();
    int next_signal();
    StepRecord advance_online(int mu);
    StepRecord advance_batch(int mu);
    // Re-runs the argmax for every agent against current scores and updates
    // the strategy-sum vector incrementally.
    void reassign_actives();

    GameConfig cfg_;
    int d_;
    double sqrt_n_;
    Rng rng_;
    StrategyTable table_;
    ScoreBoard board_;
    std::vector<int> active_;      // a*(i)
    std::vector<double> sum_vec_;  // sum_i xi[i][a*(i)][mu], integer-valued
    std::vector<double> a_vec_;    // sum_vec / N
    std::vector<double> k_vec_;    // cumulative payoff of decision 1 per signal
    long t_ = 0;
    int history_ = 0;              // last m winning bits, most recent = LSB
    int mu_star_ = 0;
};

} // namespace mg
