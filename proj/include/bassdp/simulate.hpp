#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bassdp/bass.hpp"

namespace bassdp {

// What a policy is allowed to see when pricing the next customer: the full
// history of arrival times and posted prices. Prices are set at arrivals and
// held constant in between, so a policy is queried exactly once per customer.
struct MarketView {
    std::span<const double> arrival_times;
    std::span<const double> prices;

    std::int64_t adopters() const { return static_cast<std::int64_t>(arrival_times.size()); }
};

class PricingPolicy {
  public:
    virtual ~PricingPolicy() = default;
    // Price for customer adopters()+1. Must be finite and >= 0.
    virtual double next_price(const MarketView& view) = 0;
    // Prepare for a fresh run; an instance serves one simulation at a time.
    virtual void reset() {}
};

struct SimTrace {
    std::vector<double> arrival_times;  // strictly increasing, all <= horizon
    std::vector<double> prices;         // price paid by each adopter
    double revenue = 0.0;
    std::uint64_t seed = 0;

    std::int64_t adopters() const { return static_cast<std::int64_t>(arrival_times.size()); }
};

// Exact event-driven simulation of the stochastic Bass market: inter-arrival
// times are exponential because the rate is constant between arrivals.
// Identical seeds produce bit-identical traces.
SimTrace simulate(const MarketParams& params, double horizon, PricingPolicy& policy,
                  std::uint64_t seed);

// Run until exactly n arrivals regardless of any horizon (n <= m).
SimTrace simulate_n_arrivals(const MarketParams& params, std::int64_t n, PricingPolicy& policy,
                             std::uint64_t seed);

// Optimal fluid revenue minus realized revenue. Can be negative on a lucky
// path; only its expectation is nonnegative.
double pseudo_regret(const SimTrace& trace, const MarketParams& params, double horizon);

}  // namespace bassdp
