#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bassdp/bass.hpp"

namespace bassdp {

// One constant-price stretch of a fluid adoption path.
struct FluidSegment {
    double price = 0.0;
    double x_start = 0.0;
    double x_end = 0.0;
    double duration = 0.0;
};

struct FluidTrajectory {
    std::vector<FluidSegment> segments;
    double total_time = 0.0;
    double total_revenue = 0.0;

    double x_start() const { return segments.empty() ? 0.0 : segments.front().x_start; }
    double x_end() const { return segments.empty() ? 0.0 : segments.back().x_end; }
};

// A price schedule indexed by adoption level: price applies from its
// breakpoint to the next one. The final entry's breakpoint terminates the
// schedule (its price is an end marker and is never charged).
struct PricePoint {
    double breakpoint = 0.0;
    double price = 0.0;
};

struct LipschitzBounds {
    double alpha_bound = 0.0;
    std::optional<double> beta_bound;  // unavailable when beta == 0
};

// Final adoption level reached from x0 with remaining time T under the
// optimal price path: the root X in [x0, 1) of X - x0 = (T/e)(a+bX)(1-X).
double final_adoption(const MarketParams& params, double horizon, double x0);

// Price at adoption level x on the optimal curve started from zero adoption;
// defined for 0 <= x <= final_adoption(params, horizon, 0).
double optimal_price_curve(const MarketParams& params, double horizon, double x);

// Curve value 1 + log[(a+bx)(1-x) / ((a+bX)(1-X))] against an explicit
// endpoint X. Algebraic extension: no domain restriction on x vs X. The
// confidence-bound learner needs this when adoption overshoots its estimated
// endpoint.
double price_curve_at(const MarketParams& params, double x, double x_final);

// Optimal price at an arbitrary state (x, remaining time).
double optimal_policy_price(const MarketParams& params, double x, double t_remaining);

// Optimal fluid revenue from state (x, remaining time T).
double det_value(const MarketParams& params, double x, double horizon);

// Closed-form m * integral of the optimal price curve over [a, b],
// a <= b <= final_adoption(params, horizon, 0).
double price_curve_integral(const MarketParams& params, double horizon, double a, double b);

// log(e + (alpha+beta) T); upper bound on every optimal price.
double price_upper_bound(const MarketParams& params, double horizon);

// Analytic ceilings for |dp*/dalpha| and |dp*/dbeta|.
LipschitzBounds lipschitz_bounds(const MarketParams& params);

// Time for adoption to move x1 -> x2 at constant price.
double segment_time(const MarketParams& params, double price, double x1, double x2);

// Adoption level reached from x1 after `duration` at constant price
// (closed-form inverse of segment_time).
double segment_advance(const MarketParams& params, double price, double x1, double duration);

// Run the fluid model under a piecewise-constant price schedule until the
// horizon is exhausted or the last breakpoint is reached.
FluidTrajectory fluid_simulate(const MarketParams& params, double horizon,
                               const std::vector<PricePoint>& schedule);

// Instantaneous optimal-value loss rate of posting `price` at (x, remaining):
// lambda(p,x) * (e^{p-pi*} - 1 - (p-pi*)).
double disadvantage(const MarketParams& params, double x, double t_remaining, double price);

}  // namespace bassdp
