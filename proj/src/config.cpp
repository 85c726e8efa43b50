#include "mg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mg {

void GameConfig::validate() const {
    if (n_agents < 1 || n_agents % 2 == 0)
        throw ConfigError("n_agents must be a positive odd integer, got " + std::to_string(n_agents));
    if (s < 1) throw ConfigError("s must be >= 1");
    if (signal_mode == SignalMode::endogenous) {
        if (m < 1 || m > 20) throw ConfigError("m must be in [1, 20] for endogenous signals");
    } else {
        if (d < 1) throw ConfigError("d must be >= 1 for exogenous signals");
    }
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be finite and >= 0");
    if (t_measure < 1) throw ConfigError("t_measure must be >= 1");
}

const char* to_string(SignalMode v) { return v == SignalMode::endogenous ? "endogenous" : "exogenous"; }
const char* to_string(UpdateMode v) { return v == UpdateMode::online ? "online" : "batch"; }
const char* to_string(PayoffKind v) {
    switch (v) {
        case PayoffKind::step: return "step";
        case PayoffKind::linear: return "linear";
        default: return "quadratic";
    }
}
const char* to_string(PrefDist v) { return v == PrefDist::gaussian ? "gaussian" : "bimodal"; }

SignalMode signal_mode_from_string(const std::string& s) {
    if (s == "endogenous") return SignalMode::endogenous;
    if (s == "exogenous") return SignalMode::exogenous;
    throw ConfigError("unknown signal_mode '" + s + "' (endogenous|exogenous)");
}
UpdateMode update_mode_from_string(const std::string& s) {
    if (s == "online") return UpdateMode::online;
    if (s == "batch") return UpdateMode::batch;
    throw ConfigError("unknown update_mode '" + s + "' (online|batch)");
}
PayoffKind payoff_kind_from_string(const std::string& s) {
    if (s == "step") return PayoffKind::step;
    if (s == "linear") return PayoffKind::linear;
    if (s == "quadratic") return PayoffKind::quadratic;
    throw ConfigError("unknown payoff_kind '" + s + "' (step|linear|quadratic)");
}
PrefDist pref_dist_from_string(const std::string& s) {
    if (s == "gaussian") return PrefDist::gaussian;
    if (s == "bimodal") return PrefDist::bimodal;
    throw ConfigError("unknown pref_dist '" + s + "' (gaussian|bimodal)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

} // namespace

void apply_config_key(GameConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n_agents") cfg.n_agents = static_cast<int>(parse_long(key, value));
    else if (key == "s") cfg.s = static_cast<int>(parse_long(key, value));
    else if (key == "m") cfg.m = static_cast<int>(parse_long(key, value));
    else if (key == "d") cfg.d = static_cast<int>(parse_long(key, value));
    else if (key == "signal_mode") cfg.signal_mode = signal_mode_from_string(value);
    else if (key == "update_mode") cfg.update_mode = update_mode_from_string(value);
    else if (key == "payoff_kind") cfg.payoff_kind = payoff_kind_from_string(value);
    else if (key == "pref_dist") cfg.pref_dist = pref_dist_from_string(value);
    else if (key == "rho") cfg.rho = parse_double(key, value);
    else if (key == "t_equil") cfg.t_equil = parse_long(key, value);
    else if (key == "t_measure") cfg.t_measure = parse_long(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    else throw ConfigError("unknown config key '" + key + "'");
}

GameConfig parse_config_text(const std::string& text) {
    GameConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

GameConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace mg
