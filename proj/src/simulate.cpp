#include "bassdp/simulate.hpp"

#include <cmath>
#include <limits>

#include "bassdp/det_optimal.hpp"
#include "bassdp/rng.hpp"

namespace bassdp {

namespace {

SimTrace run(const MarketParams& params, double horizon, std::int64_t max_arrivals,
             PricingPolicy& policy, std::uint64_t seed) {
    params.validate();
    policy.reset();
    Rng rng(seed);
    SimTrace trace;
    trace.seed = seed;
    const double m = static_cast<double>(params.m);
    double t = 0.0;
    for (std::int64_t d = 1; d <= max_arrivals; ++d) {
        const MarketView view{trace.arrival_times, trace.prices};
        const double p = policy.next_price(view);
        if (!std::isfinite(p) || p < 0.0)
            throw PolicyFault("policy produced a negative or non-finite price");
        const double x = static_cast<double>(d - 1) / m;
        const double rate = arrival_rate(params, p, x);
        if (rate <= 0.0) break;  // market exhausted
        t += rng.exponential(rate);
        if (t > horizon) break;
        trace.arrival_times.push_back(t);
        trace.prices.push_back(p);
        trace.revenue += p;
    }
    return trace;
}

}  // namespace

SimTrace simulate(const MarketParams& params, double horizon, PricingPolicy& policy,
                  std::uint64_t seed) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
    return run(params, horizon, params.m, policy, seed);
}

SimTrace simulate_n_arrivals(const MarketParams& params, std::int64_t n, PricingPolicy& policy,
                             std::uint64_t seed) {
    if (n < 0 || n > params.m) throw std::invalid_argument("arrival budget must lie in [0, m]");
    return run(params, std::numeric_limits<double>::infinity(), n, policy, seed);
}

double pseudo_regret(const SimTrace& trace, const MarketParams& params, double horizon) {
    return det_value(params, 0.0, horizon) - trace.revenue;
}

}  // namespace bassdp
