#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bassdp {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Flat key=value run configuration. Negative sentinels mean "derive the
// default"; validate_and_materialize() replaces every sentinel with its
// concrete value so the echoed config is self-contained.
struct RunConfig {
    int config_version = 1;
    double alpha = -1.0;
    double beta = -1.0;
    std::int64_t m = 10000;
    std::vector<std::int64_t> m_grid;
    double horizon = -1.0;     // default 2(1+sqrt(2))e/(alpha+beta)
    double phi = 1.0;
    double delta = 0.1;
    double p_explore = 0.0;
    std::string policy = "algorithm1";
    double fixed_price = 0.0;
    int replicates = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "bassdp-out";
    int points = 101;          // optimal-curve grid size
    double epsilon = -1.0;     // default (alpha+beta)^2 / alpha
    std::int64_t budget_n = -1;  // default floor((alpha/(alpha+beta))^{4/3} m^{2/3})
    int dp_time_steps = 2000;
    int dp_price_points = 200;
    double dp_price_max = -1.0;  // default log(e + (alpha+beta) horizon)
    double slack_derivative = 0.05;
    double slack_kl = 0.1;
    double slope_min = 0.5;
    double slope_max = 0.85;

    void validate_and_materialize();
    std::string echo() const;  // canonical serialization, fixed key order
};

// Parse a config file; unknown or duplicate keys and malformed values are
// ConfigErrors naming the line.
RunConfig config_load(const std::string& path);

// Apply "key=value" assignments (CLI flags mirror config keys one-to-one).
void config_apply(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace bassdp
