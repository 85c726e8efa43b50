#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mg {

enum class SignalMode { endogenous, exogenous };
enum class UpdateMode { online, batch };
enum class PayoffKind { step, linear, quadratic };
enum class PrefDist { gaussian, bimodal };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complete immutable description of one experiment.
struct GameConfig {
    int n_agents = 255;       // N, odd
    int s = 2;                // strategies per agent
    int m = 1;                // memory bits (endogenous mode)
    int d = 2;                // signal dimension (exogenous mode)
    SignalMode signal_mode = SignalMode::endogenous;
    UpdateMode update_mode = UpdateMode::online;
    PayoffKind payoff_kind = PayoffKind::linear;
    PrefDist pref_dist = PrefDist::gaussian;
    double rho = 0.0;         // diversity, R = rho * N
    long t_equil = -1;        // discarded transient steps; <0 means default
    long t_measure = 2000;    // measurement window
    std::uint64_t seed = 1;

    int signal_dim() const {
        return signal_mode == SignalMode::endogenous ? (1 << m) : d;
    }
    double bias_variance() const { return rho * n_agents; }
    double alpha() const { return static_cast<double>(signal_dim()) / n_agents; }

    // Convergence to the attractor slows roughly as sqrt(R), so the default
    // transient scales with it.
    long equilibration_steps() const {
        if (t_equil >= 0) return t_equil;
        return static_cast<long>(20.0 * std::sqrt(rho * n_agents + 1.0)) + 200;
    }

    void validate() const;
};

const char* to_string(SignalMode v);
const char* to_string(UpdateMode v);
const char* to_string(PayoffKind v);
const char* to_string(PrefDist v);

SignalMode signal_mode_from_string(const std::string& s);
UpdateMode update_mode_from_string(const std::string& s);
PayoffKind payoff_kind_from_string(const std::string& s);
PrefDist pref_dist_from_string(const std::string& s);

// Parses the flat "key = value" config format. Unknown keys are errors.
GameConfig parse_config_text(const std::string& text);
GameConfig load_config_file(const std::string& path);

// Assigns one field by key name; shared by the config parser and sweep axes.
void apply_config_key(GameConfig& cfg, const std::string& key, const std::string& value);

} // namespace mg
