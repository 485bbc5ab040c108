#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bassdp/bass.hpp"
#include "bassdp/simulate.hpp"

namespace bassdp {

// Everything the learner is told about the market. True alpha/beta stay with
// the simulator.
struct PolicyConfig {
    std::int64_t m = 0;
    double horizon = 0.0;
    double phi = 1.0;
    double delta = 0.1;
    double p_explore = 0.0;

    double price_cap() const;
    void validate() const;
};

// Confidence-bound state of the epoch learner. gamma = m^{-1/3},
// gamma_i = 2^{i-1} * gamma; epoch i spans customers (gamma_i*m, 2*gamma_i*m].
struct EstimatorState {
    double alpha_hat = 0.0;
    double alpha_radius = 0.0;  // A
    double beta_hat = 0.0;      // per-epoch estimate
    double beta_radius = 0.0;   // B_i
    int epoch = 0;              // i >= 1
    double gamma = 0.0;
    double gamma_i = 0.0;
    bool beta_valid = false;
};

// Per-epoch snapshot for CSV export and coverage experiments.
struct EpochSnapshot {
    int epoch = 0;
    double gamma_i = 0.0;
    double alpha_hat = 0.0;
    double alpha_radius = 0.0;
    double beta_hat = 0.0;
    double beta_radius = 0.0;
};

enum class PriceBranch : std::uint8_t { Explore = 0, Lcb = 1, Fallback = 2 };

double alpha_error_radius(const PolicyConfig& config);
double beta_error_radius(const PolicyConfig& config, double gamma_i);

// Invert the expected waiting time of the first floor(gamma*m) exploration
// arrivals. `times` are the arrival times of those customers.
std::pair<double, double> estimate_alpha(std::span<const double> times,
                                         const PolicyConfig& config);

// Invert the expected elapsed time of epoch i's exploration block.
// elapsed = tau_{gamma_i*m + n0} - tau_{gamma_i*m}.
std::pair<double, double> estimate_beta(int epoch, double alpha_hat, double elapsed,
                                        const PolicyConfig& config);

// Confidence-bound price for pricing at adoption fraction d/m. When both
// intervals clear zero this is the curve value minus Lipschitz-scaled radii;
// otherwise the radii carry no information and the clamped plug-in price is
// used. Output always lies in [0, price_cap].
double lcb_price(const EstimatorState& est, std::int64_t d, const PolicyConfig& config,
                 PriceBranch* branch = nullptr);

// The epoch-doubling explore/estimate/price policy.
class Algorithm1Policy : public PricingPolicy {
  public:
    explicit Algorithm1Policy(const PolicyConfig& config);

    double next_price(const MarketView& view) override;
    void reset() override;

    const std::vector<EpochSnapshot>& snapshots() const { return snapshots_; }
    // Branch taken for each priced customer, aligned with the trace prices.
    const std::vector<PriceBranch>& branches() const { return branches_; }
    const PolicyConfig& config() const { return config_; }

    // Customer-index layout of epoch i (1-based, inclusive bounds).
    std::int64_t epoch_start(int epoch) const;
    std::int64_t epoch_end(int epoch) const;
    std::int64_t explore_block() const { return explore_count_; }
    bool is_final_epoch(int epoch) const;

  private:
    PolicyConfig config_;
    std::int64_t explore_count_ = 0;  // floor(gamma*m), at least 1
    double gamma_ = 0.0;
    EstimatorState est_;
    bool alpha_ready_ = false;
    // cached per-epoch pricing pieces
    double log_denom_ = 0.0;
    double subtract_ = 0.0;
    bool use_lcb_ = false;
    double beta_price_ = 0.0;  // beta clamped for plug-in pricing
    int cur_epoch_ = 0;
    std::int64_t cur_end_ = 0;
    std::int64_t cur_explore_end_ = 0;
    std::vector<EpochSnapshot> snapshots_;
    std::vector<PriceBranch> branches_;

    void open_epoch(int epoch, const MarketView& view);
};

// Reference policies sharing the PricingPolicy contract.
class OraclePolicy : public PricingPolicy {
  public:
    OraclePolicy(const MarketParams& params, double horizon);
    double next_price(const MarketView& view) override;

  private:
    MarketParams params_;
    double x_star_ = 0.0;
    std::int64_t last_curve_customer_ = 0;
    double log_denom_ = 0.0;
    double cap_ = 0.0;
};

class FixedPricePolicy : public PricingPolicy {
  public:
    explicit FixedPricePolicy(double price) : price_(price) {}
    double next_price(const MarketView&) override { return price_; }

  private:
    double price_;
};

enum class PolicyKind { Algorithm1, Oracle, MaxPrice, FixedPrice, ExploreOnly };

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

// Factory; `params` is consulted only by the oracle kind (true parameters).
std::unique_ptr<PricingPolicy> make_policy(PolicyKind kind, const PolicyConfig& config,
                                           const MarketParams& params, double fixed_price = 0.0);

}  // namespace bassdp
