#include "bassdp/det_optimal.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace bassdp {

namespace {

constexpr double kBetaDegenerate = 1e-12;  // below this the quadratic is 0/0
constexpr double kMaxFraction = 1.0 - 1e-15;

double demand_shape(const MarketParams& p, double x) {
    return (p.alpha + p.beta * x) * (1.0 - x);
}

// integral of log(alpha + beta*u) over [a, b]; series branch avoids the
// 1/beta cancellation when beta*b << alpha.
double integral_log_affine(double alpha, double beta, double a, double b) {
    if (b <= a) return 0.0;
    const double la = std::log(alpha);
    if (beta * std::max(std::abs(a), std::abs(b)) < 1e-4 * alpha) {
        const double c1 = beta / alpha;
        const double t2 = (b * b - a * a) / 2.0;
        const double t3 = (b * b * b - a * a * a) / 3.0;
        const double t4 = (b * b * b * b - a * a * a * a) / 4.0;
        return (b - a) * la + c1 * t2 - c1 * c1 * t3 / 2.0 + c1 * c1 * c1 * t4 / 3.0;
    }
    auto prim = [&](double u) {
        const double v = alpha + beta * u;
        return (v / beta) * (std::log(v) - 1.0);
    };
    return prim(b) - prim(a);
}

// integral of log(1 - u) over [a, b], b < 1.
double integral_log_one_minus(double a, double b) {
    auto prim = [](double u) {
        const double w = 1.0 - u;
        return -w * (std::log(w) - 1.0);
    };
    return prim(b) - prim(a);
}

}  // namespace

double final_adoption(const MarketParams& params, double horizon, double x0) {
    params.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!(x0 >= 0.0 && x0 < 1.0)) throw std::invalid_argument("initial adoption must lie in [0,1)");

    const double T = horizon;
    const double a = params.alpha;
    const double b = params.beta;
    const double e = std::exp(1.0);

    if (b < kBetaDegenerate) {
        const double x = (x0 * e + a * T) / (a * T + e);
        return std::clamp(x, x0, kMaxFraction);
    }

    // b*T X^2 + (e - (b-a)T) X - (e x0 + a T) = 0, root in [x0, 1).
    const double qa = b * T;
    const double qb = e - (b - a) * T;
    const double qc = -(e * x0 + a * T);
    const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
    const double x = (qb <= 0.0) ? (-qb + disc) / (2.0 * qa) : (-2.0 * qc) / (qb + disc);
    return std::clamp(x, x0, kMaxFraction);
}

double price_curve_at(const MarketParams& params, double x, double x_final) {
    return 1.0 + std::log(demand_shape(params, x)) - std::log(demand_shape(params, x_final));
}

double optimal_price_curve(const MarketParams& params, double horizon, double x) {
    const double x_star = final_adoption(params, horizon, 0.0);
    if (!(x >= 0.0)) throw std::invalid_argument("adoption fraction must be nonnegative");
    // tolerate floor_count dust past the endpoint, reject anything real
    if (x > x_star * (1.0 + 1e-9) + 1e-12)
        throw std::invalid_argument("adoption fraction exceeds the optimal final level");
    const double p = price_curve_at(params, std::min(x, x_star), x_star);
    assert(p >= 0.0);
    return p;
}

double optimal_policy_price(const MarketParams& params, double x, double t_remaining) {
    if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("adoption fraction must lie in [0,1)");
    if (!(t_remaining > 0.0)) throw std::invalid_argument("remaining time must be positive");
    const double x_star = final_adoption(params, t_remaining, x);
    return price_curve_at(params, x, x_star);
}

double price_curve_integral(const MarketParams& params, double horizon, double a, double b) {
    const double x_star = final_adoption(params, horizon, 0.0);
    if (!(a >= 0.0 && a <= b)) throw std::invalid_argument("integration bounds must satisfy 0 <= a <= b");
    if (b > x_star * (1.0 + 1e-9) + 1e-12)
        throw std::invalid_argument("integration bound exceeds the optimal final level");
    b = std::min(b, x_star);
    const double log_denom = std::log(demand_shape(params, x_star));
    const double core = integral_log_affine(params.alpha, params.beta, a, b) +
                        integral_log_one_minus(a, b);
    return static_cast<double>(params.m) * ((b - a) * (1.0 - log_denom) + core);
}

double det_value(const MarketParams& params, double x, double horizon) {
    params.validate();
    if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("adoption fraction must lie in [0,1)");
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
    if (horizon == 0.0) return 0.0;

    const double x_star = final_adoption(params, horizon, x);
    if (x_star <= x) return 0.0;
    const double log_denom = std::log(demand_shape(params, x_star));
    const double core = integral_log_affine(params.alpha, params.beta, x, x_star) +
                        integral_log_one_minus(x, x_star);
    return static_cast<double>(params.m) * ((x_star - x) * (1.0 - log_denom) + core);
}

double price_upper_bound(const MarketParams& params, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    return std::log(std::exp(1.0) + (params.alpha + params.beta) * horizon);
}

LipschitzBounds lipschitz_bounds(const MarketParams& params) {
    LipschitzBounds out;
    out.alpha_bound = (2.0 + params.beta / params.alpha) / params.alpha;
    if (params.beta > 0.0)
        out.beta_bound = 3.0 / std::min(params.alpha, params.beta);
    return out;
}

double segment_time(const MarketParams& params, double price, double x1, double x2) {
    if (!(x1 >= 0.0 && x1 <= x2)) throw std::invalid_argument("segment needs 0 <= x1 <= x2");
    if (!(x2 < 1.0)) throw std::invalid_argument("segment end must stay below full adoption");
    if (!(price >= 0.0)) throw std::invalid_argument("price must be nonnegative");
    const double ab = params.alpha + params.beta;
    const double ratio = ab * (x2 - x1) / ((params.alpha + params.beta * x1) * (1.0 - x2));
    return std::exp(price) / ab * std::log1p(ratio);
}

double segment_advance(const MarketParams& params, double price, double x1, double duration) {
    if (!(duration >= 0.0)) throw std::invalid_argument("duration must be nonnegative");
    if (duration == 0.0) return x1;
    const double ab = params.alpha + params.beta;
    const double arg = ab * duration * std::exp(-price);
    if (arg > 700.0) return kMaxFraction;
    const double q = std::expm1(arg) * (params.alpha + params.beta * x1);
    const double x2 = (ab * x1 + q) / (ab + q);
    return std::min(x2, kMaxFraction);
}

FluidTrajectory fluid_simulate(const MarketParams& params, double horizon,
                               const std::vector<PricePoint>& schedule) {
    params.validate();
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
    if (schedule.empty()) throw std::invalid_argument("price schedule must not be empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto& pt = schedule[i];
        if (!(pt.breakpoint >= 0.0 && pt.breakpoint < 1.0))
            throw std::invalid_argument("breakpoints must lie in [0,1)");
        if (i + 1 < schedule.size() && !(pt.price >= 0.0))
            throw std::invalid_argument("prices must be nonnegative");
        if (i > 0 && !(pt.breakpoint > schedule[i - 1].breakpoint))
            throw std::invalid_argument("breakpoints must be strictly increasing");
    }

    FluidTrajectory traj;
    const double m = static_cast<double>(params.m);
    double elapsed = 0.0;
    for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
        const double p = schedule[i].price;
        const double xa = schedule[i].breakpoint;
        const double xb = schedule[i + 1].breakpoint;
        const double full = segment_time(params, p, xa, xb);
        FluidSegment seg{p, xa, xb, full};
        if (elapsed + full > horizon) {
            seg.duration = horizon - elapsed;
            seg.x_end = segment_advance(params, p, xa, seg.duration);
        }
        elapsed += seg.duration;
        traj.total_revenue += m * p * (seg.x_end - seg.x_start);
        traj.segments.push_back(seg);
        if (elapsed >= horizon) break;
    }
    if (traj.segments.empty()) {
        // degenerate schedule or zero horizon: stay put
        traj.segments.push_back(FluidSegment{schedule.front().price, schedule.front().breakpoint,
                                             schedule.front().breakpoint, 0.0});
    }
    traj.total_time = elapsed;
    return traj;
}

double disadvantage(const MarketParams& params, double x, double t_remaining, double price) {
    const double pi = optimal_policy_price(params, x, t_remaining);
    const double u = price - pi;
    const double rate = arrival_rate(params, price, x);
    return rate * (std::expm1(u) - u);
}

}  // namespace bassdp
