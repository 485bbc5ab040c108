#include "bassdp/bass.hpp"

#include <cmath>

namespace bassdp {

void MarketParams::validate() const {
    if (m < 1) throw std::invalid_argument("m must be a positive integer");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be nonnegative");
    if (!(phi > 0.0) || !std::isfinite(phi))
        throw std::invalid_argument("phi must be positive");
    if (alpha + beta > phi * (1.0 + 1e-12))
        throw std::invalid_argument("phi must upper-bound alpha+beta");
}

AdoptionState AdoptionState::at(std::int64_t d, const MarketParams& params, double t) {
    if (d < 0 || d > params.m) throw std::invalid_argument("adopters must lie in [0, m]");
    if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
    return AdoptionState{d, static_cast<double>(d) / static_cast<double>(params.m), t};
}

double arrival_rate(const MarketParams& params, double price, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("adoption fraction must lie in [0,1]");
    if (!(price >= 0.0)) throw std::invalid_argument("price must be nonnegative");
    if (x == 1.0) return 0.0;
    return static_cast<double>(params.m) * std::exp(-price) * (params.alpha + params.beta * x) * (1.0 - x);
}

std::int64_t floor_count(double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("floor_count requires a nonnegative value");
    double f = std::floor(r);
    // snap window covers power/product rounding dust but never a real fraction
    const double window = std::min(1e-9 * std::max(1.0, r), 1e-6);
    if (r - f >= 1.0 - window) f += 1.0;
    return static_cast<std::int64_t>(f);
}

}  // namespace bassdp
