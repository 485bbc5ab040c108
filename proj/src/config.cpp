#include "bassdp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bassdp/experiments.hpp"
#include "bassdp/io.hpp"

namespace bassdp {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + " expects a number, got '" + value + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + " expects an integer, got '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + " expects an unsigned integer, got '" + value + "'");
    }
}

std::vector<std::int64_t> parse_grid(const std::string& key, const std::string& value) {
    std::vector<std::int64_t> grid;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw ConfigError(key + " has an empty list entry");
        grid.push_back(parse_int(key, item));
    }
    return grid;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void config_apply(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "config_version") c.config_version = int(parse_int(key, value));
    else if (key == "alpha") c.alpha = parse_double(key, value);
    else if (key == "beta") c.beta = parse_double(key, value);
    else if (key == "m") c.m = parse_int(key, value);
    else if (key == "m_grid") c.m_grid = parse_grid(key, value);
    else if (key == "horizon") c.horizon = parse_double(key, value);
    else if (key == "phi") c.phi = parse_double(key, value);
    else if (key == "delta") c.delta = parse_double(key, value);
    else if (key == "p_explore") c.p_explore = parse_double(key, value);
    else if (key == "policy") c.policy = value;
    else if (key == "fixed_price") c.fixed_price = parse_double(key, value);
    else if (key == "replicates") c.replicates = int(parse_int(key, value));
    else if (key == "seed") c.seed = parse_uint(key, value);
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "points") c.points = int(parse_int(key, value));
    else if (key == "epsilon") c.epsilon = parse_double(key, value);
    else if (key == "budget_n") c.budget_n = parse_int(key, value);
    else if (key == "dp_time_steps") c.dp_time_steps = int(parse_int(key, value));
    else if (key == "dp_price_points") c.dp_price_points = int(parse_int(key, value));
    else if (key == "dp_price_max") c.dp_price_max = parse_double(key, value);
    else if (key == "slack_derivative") c.slack_derivative = parse_double(key, value);
    else if (key == "slack_kl") c.slack_kl = parse_double(key, value);
    else if (key == "slope_min") c.slope_min = parse_double(key, value);
    else if (key == "slope_max") c.slope_max = parse_double(key, value);
    else throw ConfigError("unknown key '" + key + "'");
}

RunConfig config_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig config;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        try {
            config_apply(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return config;
}

void RunConfig::validate_and_materialize() {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(beta >= 0.0)) throw ConfigError("beta must be nonnegative");
    if (!(phi > 0.0)) throw ConfigError("phi must be positive");
    if (alpha + beta > phi * (1.0 + 1e-12))
        throw ConfigError("phi must upper-bound alpha+beta");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (m < 1) throw ConfigError("m must be a positive integer");
    for (auto mg : m_grid)
        if (mg < 1) throw ConfigError("m_grid entries must be positive integers");
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    if (points < 2) throw ConfigError("points must be at least 2");
    if (dp_time_steps < 1 || dp_time_steps > 2000)
        throw ConfigError("dp_time_steps must lie in [1, 2000]");
    if (dp_price_points < 2) throw ConfigError("dp_price_points must be at least 2");
    if (!(slack_derivative >= 0.0)) throw ConfigError("slack_derivative must be nonnegative");
    if (!(slack_kl >= 0.0)) throw ConfigError("slack_kl must be nonnegative");
    if (!(slope_min < slope_max)) throw ConfigError("slope_min must be below slope_max");
    if (fixed_price < 0.0) throw ConfigError("fixed_price must be nonnegative");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
    policy_kind_from_string(policy);  // rejects unknown names

    if (horizon <= 0.0) horizon = default_horizon(alpha, beta);
    if (epsilon < 0.0) epsilon = (alpha + beta) * (alpha + beta) / alpha;
    if (budget_n < 0) {
        const double frac = std::pow(alpha / (alpha + beta), 4.0 / 3.0);
        budget_n = floor_count(frac * std::pow(double(m), 2.0 / 3.0));
    }
    if (dp_price_max <= 0.0) dp_price_max = std::log(std::exp(1.0) + (alpha + beta) * horizon);
    const double cap = std::log(std::exp(1.0) + phi * horizon);
    if (!(p_explore >= 0.0 && p_explore <= cap))
        throw ConfigError("p_explore must lie in [0, log(e+phi*horizon)]");
}

std::string RunConfig::echo() const {
    std::ostringstream out;
    out << "config_version = " << config_version << "\n";
    out << "alpha = " << fmt17(alpha) << "\n";
    out << "beta = " << fmt17(beta) << "\n";
    out << "m = " << m << "\n";
    out << "m_grid = ";
    for (std::size_t i = 0; i < m_grid.size(); ++i) out << (i ? "," : "") << m_grid[i];
    out << "\n";
    out << "horizon = " << fmt17(horizon) << "\n";
    out << "phi = " << fmt17(phi) << "\n";
    out << "delta = " << fmt17(delta) << "\n";
    out << "p_explore = " << fmt17(p_explore) << "\n";
    out << "policy = " << policy << "\n";
    out << "fixed_price = " << fmt17(fixed_price) << "\n";
    out << "replicates = " << replicates << "\n";
    out << "seed = " << seed << "\n";
    out << "out_dir = " << out_dir << "\n";
    out << "points = " << points << "\n";
    out << "epsilon = " << fmt17(epsilon) << "\n";
    out << "budget_n = " << budget_n << "\n";
    out << "dp_time_steps = " << dp_time_steps << "\n";
    out << "dp_price_points = " << dp_price_points << "\n";
    out << "dp_price_max = " << fmt17(dp_price_max) << "\n";
    out << "slack_derivative = " << fmt17(slack_derivative) << "\n";
    out << "slack_kl = " << fmt17(slack_kl) << "\n";
    out << "slope_min = " << fmt17(slope_min) << "\n";
    out << "slope_max = " << fmt17(slope_max) << "\n";
    return out.str();
}

}  // namespace bassdp
