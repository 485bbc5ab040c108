#pragma once

#include <cstdint>
#include <stdexcept>

namespace bassdp {

// Market primitives of the Bass adoption model. `phi` is a known cap on
// alpha+beta; the learner is handed (m, T, phi, delta) only, the simulator
// keeps the true (alpha, beta).
struct MarketParams {
    std::int64_t m = 1;   // potential buyers
    double alpha = 0.0;   // innovation coefficient, 1/time
    double beta = 0.0;    // imitation coefficient, 1/time
    double phi = 1.0;     // known upper bound on alpha+beta

    void validate() const;
};

struct AdoptionState {
    std::int64_t adopters = 0;  // cumulative adopters d
    double fraction = 0.0;      // x = d/m
    double time = 0.0;

    static AdoptionState at(std::int64_t d, const MarketParams& params, double t);
};

// Instantaneous adoption rate m*exp(-p)*(alpha+beta*x)*(1-x).
double arrival_rate(const MarketParams& params, double price, double x);

// Global rounding convention for fractional counts (gamma*m, m*X, m^{2/3}).
// Values within 1e-9 relative below an integer snap up to it, so counts like
// pow(m, 2.0/3.0)*... do not lose a whole customer to floating-point dust.
std::int64_t floor_count(double r);

class PolicyFault : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace bassdp
