#include "bassdp/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bassdp/det_optimal.hpp"

namespace bassdp {

namespace {

constexpr double kThird = 1.0 / 3.0;

double radius_scale(const PolicyConfig& config) {
    return std::sqrt(8.0 * std::log(2.0 / config.delta)) *
           std::pow(static_cast<double>(config.m), -1.0 / 3.0);
}

double gamma_of(const PolicyConfig& config) {
    return std::pow(static_cast<double>(config.m), -1.0 / 3.0);
}

std::int64_t exploration_count(const PolicyConfig& config) {
    return std::max<std::int64_t>(1, floor_count(gamma_of(config) * static_cast<double>(config.m)));
}

double shape_log(double alpha, double beta, double x) {
    return std::log((alpha + beta * x) * (1.0 - x));
}

}  // namespace

double PolicyConfig::price_cap() const { return std::log(std::exp(1.0) + phi * horizon); }

void PolicyConfig::validate() const {
    if (m < 1) throw std::invalid_argument("m must be a positive integer");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!(phi > 0.0)) throw std::invalid_argument("phi must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(p_explore >= 0.0 && p_explore <= price_cap()))
        throw std::invalid_argument("p_explore must lie in [0, price_cap]");
}

double alpha_error_radius(const PolicyConfig& config) {
    const double g = gamma_of(config);
    return 8.0 * config.phi / ((1.0 - g) * (1.0 - g)) * radius_scale(config);
}

double beta_error_radius(const PolicyConfig& config, double gamma_i) {
    const double g = gamma_of(config);
    const double w = kThird - g;
    return 16.0 * config.phi / (gamma_i * w * w) * radius_scale(config);
}

std::pair<double, double> estimate_alpha(std::span<const double> times,
                                         const PolicyConfig& config) {
    if (times.empty()) throw std::invalid_argument("alpha estimation needs exploration arrivals");
    const double tau = times.back();
    if (!(tau > 0.0)) throw std::invalid_argument("exploration arrival times must be positive");
    const double n0 = static_cast<double>(times.size());
    const double alpha_hat =
        n0 * std::exp(config.p_explore) / (static_cast<double>(config.m) * tau);
    return {alpha_hat, alpha_error_radius(config)};
}

std::pair<double, double> estimate_beta(int epoch, double alpha_hat, double elapsed,
                                        const PolicyConfig& config) {
    if (epoch < 1) throw std::invalid_argument("epoch index must be at least 1");
    if (!(elapsed > 0.0)) throw std::invalid_argument("exploration window must have positive elapsed time");
    const double gamma_i = std::ldexp(gamma_of(config), epoch - 1);
    const double n0 = static_cast<double>(exploration_count(config));
    const double rate = n0 * std::exp(config.p_explore) /
                        ((1.0 - gamma_i) * static_cast<double>(config.m) * elapsed);
    const double beta_hat = (rate - alpha_hat) / gamma_i;
    return {beta_hat, beta_error_radius(config, gamma_i)};
}

double lcb_price(const EstimatorState& est, std::int64_t d, const PolicyConfig& config,
                 PriceBranch* branch) {
    if (!est.beta_valid) throw std::invalid_argument("lcb_price needs an epoch beta estimate");
    if (d < 0 || d >= config.m) throw std::invalid_argument("customer index must lie in [0, m)");
    const double x = static_cast<double>(d) / static_cast<double>(config.m);
    const double a_lo = est.alpha_hat - est.alpha_radius;
    const double b_lo = est.beta_hat - est.beta_radius;
    const bool genuine = a_lo > 0.0 && b_lo > 0.0;

    double price;
    if (genuine) {
        MarketParams fit{config.m, est.alpha_hat, est.beta_hat,
                         std::max(config.phi, est.alpha_hat + est.beta_hat)};
        const double x_star = final_adoption(fit, config.horizon, 0.0);
        const double l_alpha = 2.0 / a_lo + (est.beta_hat + est.beta_radius) / (a_lo * a_lo);
        const double l_beta = 3.0 / a_lo + 3.0 / b_lo;
        price = price_curve_at(fit, x, x_star) -
                (l_alpha * est.alpha_radius + l_beta * est.beta_radius);
        if (branch) *branch = PriceBranch::Lcb;
    } else {
        // intervals touch zero: the radii carry no information here, post the
        // clamped plug-in price instead
        const double beta_pi = std::max(est.beta_hat, 0.0);
        MarketParams fit{config.m, est.alpha_hat, beta_pi,
                         std::max(config.phi, est.alpha_hat + beta_pi)};
        const double x_star = final_adoption(fit, config.horizon, 0.0);
        price = price_curve_at(fit, x, x_star);
        if (branch) *branch = PriceBranch::Fallback;
    }
    return std::clamp(price, 0.0, config.price_cap());
}

Algorithm1Policy::Algorithm1Policy(const PolicyConfig& config) : config_(config) {
    config_.validate();
    if (config_.m < 8)
        throw std::invalid_argument("the epoch learner needs m >= 8");
    gamma_ = gamma_of(config_);
    explore_count_ = exploration_count(config_);
    reset();
}

void Algorithm1Policy::reset() {
    est_ = EstimatorState{};
    est_.gamma = gamma_;
    alpha_ready_ = false;
    use_lcb_ = false;
    log_denom_ = 0.0;
    subtract_ = 0.0;
    beta_price_ = 0.0;
    cur_epoch_ = 0;
    cur_end_ = 0;
    cur_explore_end_ = 0;
    snapshots_.clear();
    branches_.clear();
}

bool Algorithm1Policy::is_final_epoch(int epoch) const {
    return std::ldexp(gamma_, epoch - 1) >= kThird - 1e-12;
}

std::int64_t Algorithm1Policy::epoch_start(int epoch) const {
    return floor_count(std::ldexp(gamma_, epoch - 1) * static_cast<double>(config_.m));
}

std::int64_t Algorithm1Policy::epoch_end(int epoch) const {
    if (is_final_epoch(epoch)) return std::numeric_limits<std::int64_t>::max();
    return floor_count(std::ldexp(gamma_, epoch) * static_cast<double>(config_.m));
}

void Algorithm1Policy::open_epoch(int epoch, const MarketView& view) {
    const std::int64_t start = epoch_start(epoch);
    const double tau0 = view.arrival_times[static_cast<std::size_t>(start - 1)];
    const double tau1 = view.arrival_times[static_cast<std::size_t>(start + explore_count_ - 1)];
    auto [beta_hat, beta_radius] = estimate_beta(epoch, est_.alpha_hat, tau1 - tau0, config_);
    snapshots_.push_back(EpochSnapshot{epoch, std::ldexp(gamma_, epoch - 1), est_.alpha_hat,
                                       est_.alpha_radius, beta_hat, beta_radius});
}

double Algorithm1Policy::next_price(const MarketView& view) {
    const std::int64_t d = view.adopters() + 1;

    if (d <= explore_count_) {
        branches_.push_back(PriceBranch::Explore);
        return config_.p_explore;
    }

    if (!alpha_ready_) {
        auto [alpha_hat, alpha_radius] =
            estimate_alpha(view.arrival_times.first(static_cast<std::size_t>(explore_count_)),
                           config_);
        est_.alpha_hat = alpha_hat;
        est_.alpha_radius = alpha_radius;
        alpha_ready_ = true;
    }

    // estimate beta for every epoch whose exploration block has completed
    while (true) {
        const int i = static_cast<int>(snapshots_.size()) + 1;
        if (!snapshots_.empty() && is_final_epoch(i - 1)) break;
        if (view.adopters() < epoch_start(i) + explore_count_) break;
        open_epoch(i, view);
    }

    if (cur_epoch_ == 0 || d > cur_end_) {
        int epoch = std::max(cur_epoch_, 1);
        while (!is_final_epoch(epoch) && d > epoch_end(epoch)) ++epoch;
        cur_epoch_ = epoch;
        cur_end_ = epoch_end(epoch);
        cur_explore_end_ = epoch_start(epoch) + explore_count_;
    }
    const int epoch = cur_epoch_;

    if (d <= cur_explore_end_) {
        branches_.push_back(PriceBranch::Explore);
        return config_.p_explore;
    }

    if (est_.epoch != epoch || !est_.beta_valid) {
        const EpochSnapshot& snap = snapshots_[static_cast<std::size_t>(epoch - 1)];
        est_.epoch = epoch;
        est_.gamma_i = snap.gamma_i;
        est_.beta_hat = snap.beta_hat;
        est_.beta_radius = snap.beta_radius;
        est_.beta_valid = true;

        const double a_lo = est_.alpha_hat - est_.alpha_radius;
        const double b_lo = est_.beta_hat - est_.beta_radius;
        use_lcb_ = a_lo > 0.0 && b_lo > 0.0;
        beta_price_ = use_lcb_ ? est_.beta_hat : std::max(est_.beta_hat, 0.0);
        MarketParams fit{config_.m, est_.alpha_hat, beta_price_,
                         std::max(config_.phi, est_.alpha_hat + beta_price_)};
        const double x_star = final_adoption(fit, config_.horizon, 0.0);
        log_denom_ = shape_log(est_.alpha_hat, beta_price_, x_star);
        if (use_lcb_) {
            const double l_alpha =
                2.0 / a_lo + (est_.beta_hat + est_.beta_radius) / (a_lo * a_lo);
            const double l_beta = 3.0 / a_lo + 3.0 / b_lo;
            subtract_ = l_alpha * est_.alpha_radius + l_beta * est_.beta_radius;
        } else {
            subtract_ = 0.0;
        }
    }

    const double x = static_cast<double>(d - 1) / static_cast<double>(config_.m);
    const double price =
        1.0 + shape_log(est_.alpha_hat, beta_price_, x) - log_denom_ - subtract_;
    branches_.push_back(use_lcb_ ? PriceBranch::Lcb : PriceBranch::Fallback);
    return std::clamp(price, 0.0, config_.price_cap());
}

OraclePolicy::OraclePolicy(const MarketParams& params, double horizon) : params_(params) {
    params_.validate();
    x_star_ = final_adoption(params_, horizon, 0.0);
    last_curve_customer_ = floor_count(static_cast<double>(params_.m) * x_star_);
    log_denom_ = shape_log(params_.alpha, params_.beta, x_star_);
    // the curve covers the customers the optimal fluid path reaches; once
    // they are sold the policy stops selling, parked at a demand-choking price
    cap_ = price_upper_bound(params_, horizon) + std::log(1.0 + double(params_.m));
}

double OraclePolicy::next_price(const MarketView& view) {
    const std::int64_t d = view.adopters() + 1;
    if (d > last_curve_customer_) return cap_;
    const double x = static_cast<double>(d - 1) / static_cast<double>(params_.m);
    return 1.0 + shape_log(params_.alpha, params_.beta, x) - log_denom_;
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "algorithm1") return PolicyKind::Algorithm1;
    if (name == "oracle") return PolicyKind::Oracle;
    if (name == "max-price") return PolicyKind::MaxPrice;
    if (name == "fixed-price") return PolicyKind::FixedPrice;
    if (name == "explore-only") return PolicyKind::ExploreOnly;
    throw std::invalid_argument("unknown policy kind: " + name);
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Algorithm1: return "algorithm1";
        case PolicyKind::Oracle: return "oracle";
        case PolicyKind::MaxPrice: return "max-price";
        case PolicyKind::FixedPrice: return "fixed-price";
        case PolicyKind::ExploreOnly: return "explore-only";
    }
    return "unknown";
}

std::unique_ptr<PricingPolicy> make_policy(PolicyKind kind, const PolicyConfig& config,
                                           const MarketParams& params, double fixed_price) {
    switch (kind) {
        case PolicyKind::Algorithm1:
            return std::make_unique<Algorithm1Policy>(config);
        case PolicyKind::Oracle:
            return std::make_unique<OraclePolicy>(params, config.horizon);
        case PolicyKind::MaxPrice:
            return std::make_unique<FixedPricePolicy>(config.price_cap());
        case PolicyKind::FixedPrice:
            return std::make_unique<FixedPricePolicy>(fixed_price);
        case PolicyKind::ExploreOnly:
            return std::make_unique<FixedPricePolicy>(config.p_explore);
    }
    throw std::invalid_argument("unknown policy kind");
}

}  // namespace bassdp
