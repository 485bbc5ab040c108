#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bassdp/bass.hpp"
#include "bassdp/det_optimal.hpp"
#include "bassdp/policies.hpp"
#include "bassdp/simulate.hpp"

namespace bassdp {

// T = 2(1+sqrt(2))e/(alpha+beta), the horizon scale where instances are
// neither trivially easy nor trivially hard.
double default_horizon(double alpha, double beta);

// Run replicated jobs 0..n-1, each writing only to its own slot. Thread count
// comes from BASSDP_THREADS (default: hardware concurrency); results do not
// depend on it.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

struct CellStats {
    std::int64_t m = 0;
    int replicates = 0;
    double mean = 0.0;
    double stdev = 0.0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
};

struct SlopeFit {
    bool valid = false;
    double slope = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct SweepSpec {
    double alpha = 0.0;
    double beta = 0.0;
    double phi = 1.0;
    double delta = 0.1;
    double p_explore = 0.0;
    double horizon = 0.0;  // <= 0: use default_horizon(alpha, beta)
    std::vector<std::int64_t> m_grid;
    PolicyKind policy = PolicyKind::Algorithm1;
    double fixed_price = 0.0;
    int replicates = 100;
    std::uint64_t seed_base = 1;
};

struct ExperimentReport {
    SweepSpec spec;
    double horizon = 0.0;  // materialized
    std::vector<CellStats> cells;
    std::vector<std::vector<double>> pseudo_regrets;  // per cell, per replicate
    SlopeFit slope;
    double wall_clock_seconds = 0.0;  // in-memory only, never serialized
};

// Monte Carlo pseudo-regret over an m grid with a log-log slope fit
// (bootstrap confidence interval over replicates).
ExperimentReport regret_sweep(const SweepSpec& spec);

// Ordinary least squares of log(mean) on log(m).
SlopeFit fit_loglog_slope(std::span<const double> m_values, std::span<const double> means);

struct EpochCoverage {
    int epoch = 0;
    double gamma_i = 0.0;
    double beta_radius = 0.0;
    int estimated = 0;      // replicates in which this epoch produced an estimate
    int covered = 0;        // |beta_hat_i - beta| <= B_i
    std::int64_t lcb_prices = 0;  // genuine confidence-bound prices posted
    int lcb_ordered = 0;    // replicates where all such prices were <= true p*
    double coverage() const { return estimated ? double(covered) / estimated : 1.0; }
    double lcb_ordered_freq(int replicates) const {
        return replicates ? double(lcb_ordered) / replicates : 1.0;
    }
};

struct CoverageResult {
    int replicates = 0;
    bool certified = false;  // m^{1/3} large enough for the estimation guarantee
    double alpha_radius = 0.0;
    int alpha_covered = 0;
    double mean_alpha_hat = 0.0;
    std::vector<EpochCoverage> epochs;
    double adoption_threshold = 0.0;  // m X* - sqrt(8 m X* log(4/delta))
    int adoption_ok = 0;
    double alpha_coverage() const { return replicates ? double(alpha_covered) / replicates : 0.0; }
    double adoption_freq() const { return replicates ? double(adoption_ok) / replicates : 0.0; }
};

CoverageResult coverage_experiment(const MarketParams& params, double horizon, double delta,
                                   double p_explore, int replicates, std::uint64_t seed_base);

// Finite-horizon backward induction on a Bernoulli arrival chain; tiny-market
// lower-biased stand-in for the optimal stochastic revenue. m <= 50,
// time_steps <= 2000.
double stoch_value_dp(const MarketParams& params, double horizon, int time_steps,
                      std::span<const double> price_grid);

std::vector<double> uniform_price_grid(double p_max, int points);

// KL(Exp(rate1) || Exp(rate0)) = log(rate0/rate1) + rate1/rate0 - 1.
double kl_exponential(double rate1, double rate0);

struct TwoMarketInstance {
    double alpha = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;  // second market has imitation beta + epsilon
    std::int64_t n = 0;    // observation budget
    std::int64_t m = 0;

    void validate() const;  // enforces n^{3/2} <= alpha*m/epsilon
};

// Maps n observations to a single output price.
using DecisionRule =
    std::function<double(const SimTrace&, const TwoMarketInstance&, double horizon)>;

// Exponential maximum-likelihood fit of (alpha, beta) from a trace.
std::pair<double, double> fit_exponential_mle(const SimTrace& trace, std::int64_t m);

// Plug-in rule: MLE fit, then the optimal policy price at (n/m, horizon).
DecisionRule plugin_mle_rule();

struct DistinguishResult {
    TwoMarketInstance instance;
    int replicates = 0;
    double pi_market1 = 0.0;  // reference optimal prices at (n/m, horizon)
    double pi_market2 = 0.0;
    double wrong_freq_market1 = 0.0;  // rule output closer to the other market's price
    double wrong_freq_market2 = 0.0;
    double accept_freq_market1 = 0.0;  // event: output closer to market 1's price
    double accept_freq_market2 = 0.0;
    double accept_gap_bound = 0.0;  // epsilon n^{3/2} / (2 alpha m)
    double mean_llr = 0.0;          // log-likelihood ratio under market 2
    double kl_bound = 0.0;          // n (epsilon n / m)^2 / (2 alpha^2)
};

// Generates the first n observations in both markets with the exploratory
// policy, applies the decision rule, and tallies how often it lands on the
// wrong market's price.
DistinguishResult distinguishability_experiment(const TwoMarketInstance& inst, double horizon,
                                                const DecisionRule& rule, int replicates,
                                                std::uint64_t seed_base);

struct PriceGapRow {
    double x = 0.0;
    double gap = 0.0;    // pi*(x, beta) - pi*(x, beta+epsilon)
    double bound = 0.0;  // epsilon * alpha e / (4 (alpha+beta+epsilon)^3 T)
    bool ok = false;
};

// Tabulates the optimal-price drop from raising the imitation coefficient by
// epsilon, against the mean-value derivative bound with 5% slack.
std::vector<PriceGapRow> price_gap_experiment(double alpha, double beta, double epsilon,
                                              double horizon, int grid_points = 50,
                                              double slack = 0.05);

// Cumulative value lost along a fluid trajectory: the integral of the
// instantaneous disadvantage (adaptive quadrature).
double trajectory_disadvantage(const MarketParams& params, double horizon,
                               const FluidTrajectory& traj, double tol = 1e-10);

}  // namespace bassdp
