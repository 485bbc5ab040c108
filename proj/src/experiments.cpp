#include "bassdp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "bassdp/det_optimal.hpp"
#include "bassdp/rng.hpp"

namespace bassdp {

namespace {

double f_convex(double u) { return std::expm1(u) - u; }

double mean_of(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double stdev_of(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / double(v.size() - 1));
}

double quantile_of(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * double(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

int env_thread_count() {
    if (const char* s = std::getenv("BASSDP_THREADS")) {
        const int n = std::atoi(s);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// adaptive Simpson on [a, b]
double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double fm, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double h = b - a;
    const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) < 15.0 * tol) return left + right + err / 15.0;
    return simpson(f, a, fa, m, fm, flm, 0.5 * tol, depth - 1) +
           simpson(f, m, fm, b, fb, frm, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, fa, b, fb, fm, tol, 48);
}

}  // namespace

double default_horizon(double alpha, double beta) {
    return 2.0 * (1.0 + std::sqrt(2.0)) * std::exp(1.0) / (alpha + beta);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    const int threads =
        static_cast<int>(std::min<std::int64_t>(env_thread_count(), std::max<std::int64_t>(n, 1)));
    if (threads <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::int64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

SlopeFit fit_loglog_slope(std::span<const double> m_values, std::span<const double> means) {
    SlopeFit fit;
    if (m_values.size() != means.size() || m_values.size() < 3) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(m_values.size());
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        if (!(means[i] > 0.0)) return fit;
        const double x = std::log(m_values[i]);
        const double y = std::log(means[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.ci_lo = fit.ci_hi = fit.slope;
    fit.valid = true;
    return fit;
}

ExperimentReport regret_sweep(const SweepSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport report;
    report.spec = spec;
    report.horizon =
        spec.horizon > 0.0 ? spec.horizon : default_horizon(spec.alpha, spec.beta);
    if (spec.m_grid.empty()) throw std::invalid_argument("m grid must not be empty");
    if (spec.replicates < 1) throw std::invalid_argument("replicate count must be at least 1");

    report.pseudo_regrets.resize(spec.m_grid.size());
    for (std::size_t c = 0; c < spec.m_grid.size(); ++c) {
        const std::int64_t m = spec.m_grid[c];
        MarketParams params{m, spec.alpha, spec.beta, spec.phi};
        params.validate();
        PolicyConfig config{m, report.horizon, spec.phi, spec.delta, spec.p_explore};
        auto& out = report.pseudo_regrets[c];
        out.assign(spec.replicates, 0.0);
        const double v_det = det_value(params, 0.0, report.horizon);
        parallel_for(spec.replicates, [&](std::int64_t r) {
            auto policy = make_policy(spec.policy, config, params, spec.fixed_price);
            const std::uint64_t seed = derive_seed(spec.seed_base, std::uint64_t(c) << 32 | r);
            SimTrace trace = simulate(params, report.horizon, *policy, seed);
            out[r] = v_det - trace.revenue;
        });
        CellStats stats;
        stats.m = m;
        stats.replicates = spec.replicates;
        stats.mean = mean_of(out);
        stats.stdev = stdev_of(out, stats.mean);
        std::vector<double> sorted(out);
        std::sort(sorted.begin(), sorted.end());
        stats.q10 = quantile_of(sorted, 0.10);
        stats.q50 = quantile_of(sorted, 0.50);
        stats.q90 = quantile_of(sorted, 0.90);
        report.cells.push_back(stats);
    }

    std::vector<double> ms, means;
    for (const auto& cell : report.cells) {
        ms.push_back(double(cell.m));
        means.push_back(cell.mean);
    }
    report.slope = fit_loglog_slope(ms, means);

    if (report.slope.valid) {
        // replicate bootstrap for the slope interval
        const int B = 200;
        Rng rng(derive_seed(report.spec.seed_base, 0xB0075EEDULL));
        std::vector<double> slopes;
        slopes.reserve(B);
        std::vector<double> bmeans(report.cells.size());
        for (int b = 0; b < B; ++b) {
            bool ok = true;
            for (std::size_t c = 0; c < report.cells.size(); ++c) {
                const auto& v = report.pseudo_regrets[c];
                double s = 0.0;
                for (std::size_t k = 0; k < v.size(); ++k)
                    s += v[rng.next_u64() % v.size()];
                bmeans[c] = s / double(v.size());
                if (!(bmeans[c] > 0.0)) ok = false;
            }
            if (!ok) continue;
            SlopeFit sf = fit_loglog_slope(ms, bmeans);
            if (sf.valid) slopes.push_back(sf.slope);
        }
        if (slopes.size() >= 20) {
            std::sort(slopes.begin(), slopes.end());
            report.slope.ci_lo = quantile_of(slopes, 0.025);
            report.slope.ci_hi = quantile_of(slopes, 0.975);
        }
    }

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

CoverageResult coverage_experiment(const MarketParams& params, double horizon, double delta,
                                   double p_explore, int replicates, std::uint64_t seed_base) {
    params.validate();
    if (replicates < 1) throw std::invalid_argument("replicate count must be at least 1");
    PolicyConfig config{params.m, horizon, params.phi, delta, p_explore};
    config.validate();

    CoverageResult result;
    result.replicates = replicates;
    const double m13 = std::pow(double(params.m), 1.0 / 3.0);
    const double ratio = (params.alpha + params.beta) / params.alpha;
    result.certified = m13 >= 64.0 * ratio * ratio * std::sqrt(8.0 * std::log(2.0 / delta));
    result.alpha_radius = alpha_error_radius(config);

    const double x_star = final_adoption(params, horizon, 0.0);
    const double mx = double(params.m) * x_star;
    result.adoption_threshold = mx - std::sqrt(8.0 * mx * std::log(4.0 / delta));
    const double log_denom_true =
        std::log((params.alpha + params.beta * x_star) * (1.0 - x_star));

    struct EpochOut {
        bool estimated = false;
        bool covered = false;
        std::int64_t lcb_count = 0;
        bool lcb_ok = true;
        double gamma_i = 0.0;
        double radius = 0.0;
    };
    struct RepOut {
        double alpha_hat = 0.0;
        bool alpha_ok = false;
        bool adoption_ok = false;
        std::vector<EpochOut> epochs;
    };
    std::vector<RepOut> reps(replicates);

    parallel_for(replicates, [&](std::int64_t r) {
        Algorithm1Policy policy(config);
        SimTrace trace = simulate(params, horizon, policy, derive_seed(seed_base, r));
        RepOut& out = reps[r];
        const auto& snaps = policy.snapshots();
        if (!snaps.empty()) {
            out.alpha_hat = snaps.front().alpha_hat;
            out.alpha_ok = std::abs(out.alpha_hat - params.alpha) <= snaps.front().alpha_radius;
        }
        out.adoption_ok = double(trace.adopters()) >= result.adoption_threshold;
        out.epochs.resize(snaps.size());
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            out.epochs[i].estimated = true;
            out.epochs[i].covered =
                std::abs(snaps[i].beta_hat - params.beta) <= snaps[i].beta_radius;
            out.epochs[i].gamma_i = snaps[i].gamma_i;
            out.epochs[i].radius = snaps[i].beta_radius;
        }
        // genuine confidence-bound prices vs the true curve, per epoch
        const auto& branches = policy.branches();
        const std::size_t n = trace.prices.size();
        for (std::size_t k = 0; k < n; ++k) {
            if (branches[k] != PriceBranch::Lcb) continue;
            const std::int64_t d = std::int64_t(k) + 1;
            int epoch = 1;
            while (!policy.is_final_epoch(epoch) && d > policy.epoch_end(epoch)) ++epoch;
            if (epoch > int(out.epochs.size())) continue;
            auto& eo = out.epochs[std::size_t(epoch - 1)];
            eo.lcb_count++;
            const double x = double(k) / double(params.m);
            const double p_true =
                1.0 + std::log((params.alpha + params.beta * x) * (1.0 - x)) - log_denom_true;
            if (trace.prices[k] > p_true + 1e-12) eo.lcb_ok = false;
        }
    });

    std::size_t max_epochs = 0;
    for (const auto& rep : reps) max_epochs = std::max(max_epochs, rep.epochs.size());
    result.epochs.resize(max_epochs);
    for (std::size_t i = 0; i < max_epochs; ++i) result.epochs[i].epoch = int(i) + 1;
    double alpha_sum = 0.0;
    for (const auto& rep : reps) {
        alpha_sum += rep.alpha_hat;
        result.alpha_covered += rep.alpha_ok ? 1 : 0;
        result.adoption_ok += rep.adoption_ok ? 1 : 0;
        for (std::size_t i = 0; i < rep.epochs.size(); ++i) {
            auto& agg = result.epochs[i];
            const auto& eo = rep.epochs[i];
            if (!eo.estimated) continue;
            agg.estimated++;
            agg.covered += eo.covered ? 1 : 0;
            agg.lcb_prices += eo.lcb_count;
            agg.lcb_ordered += eo.lcb_ok ? 1 : 0;
            agg.gamma_i = eo.gamma_i;
            agg.beta_radius = eo.radius;
        }
    }
    result.mean_alpha_hat = alpha_sum / double(replicates);
    return result;
}

std::vector<double> uniform_price_grid(double p_max, int points) {
    if (points < 2) throw std::invalid_argument("price grid needs at least two points");
    if (!(p_max > 0.0)) throw std::invalid_argument("price grid maximum must be positive");
    std::vector<double> grid(points);
    for (int j = 0; j < points; ++j) grid[j] = p_max * double(j) / double(points - 1);
    return grid;
}

double stoch_value_dp(const MarketParams& params, double horizon, int time_steps,
                      std::span<const double> price_grid) {
    params.validate();
    if (params.m > 50) throw std::invalid_argument("the value recursion is restricted to m <= 50");
    if (time_steps < 1 || time_steps > 2000)
        throw std::invalid_argument("time step count must lie in [1, 2000]");
    if (price_grid.empty()) throw std::invalid_argument("price grid must not be empty");
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
    if (horizon == 0.0) return 0.0;

    const int n = static_cast<int>(params.m);
    const double dt = horizon / double(time_steps);
    std::vector<double> damp(price_grid.size());
    for (std::size_t j = 0; j < price_grid.size(); ++j) {
        if (!(price_grid[j] >= 0.0)) throw std::invalid_argument("prices must be nonnegative");
        damp[j] = std::exp(-price_grid[j]);
    }
    std::vector<double> shape(n);
    for (int d = 0; d < n; ++d) {
        const double x = double(d) / double(n);
        shape[d] = double(n) * (params.alpha + params.beta * x) * (1.0 - x);
    }

    std::vector<double> value_next(n + 1, 0.0), value(n + 1, 0.0);
    for (int k = time_steps - 1; k >= 0; --k) {
        value[n] = 0.0;
        for (int d = 0; d < n; ++d) {
            const double gain = value_next[d + 1] - value_next[d];
            double best = value_next[d];
            for (std::size_t j = 0; j < price_grid.size(); ++j) {
                // exact one-step probability of an arrival at constant rate;
                // the linearized rate*dt overshoots and can push the value
                // above the fluid benchmark
                const double q = -std::expm1(-shape[d] * damp[j] * dt);
                const double candidate = value_next[d] + q * (price_grid[j] + gain);
                if (candidate > best) best = candidate;
            }
            value[d] = best;
        }
        std::swap(value, value_next);
    }
    return value_next[0];
}

double kl_exponential(double rate1, double rate0) {
    if (!(rate1 > 0.0) || !(rate0 > 0.0))
        throw std::invalid_argument("exponential rates must be positive");
    return std::log(rate0 / rate1) + rate1 / rate0 - 1.0;
}

void TwoMarketInstance::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
    if (m < 1) throw std::invalid_argument("m must be a positive integer");
    if (n < 1 || n > m) throw std::invalid_argument("observation budget must lie in [1, m]");
    if (epsilon > 0.0 &&
        std::pow(double(n), 1.5) > alpha * double(m) / epsilon * (1.0 + 1e-9))
        throw std::invalid_argument("observation budget violates n^{3/2} <= alpha m / epsilon");
}

std::pair<double, double> fit_exponential_mle(const SimTrace& trace, std::int64_t m) {
    const std::size_t n = trace.arrival_times.size();
    if (n == 0) throw std::invalid_argument("cannot fit an empty trace");
    std::vector<double> x(n), w(n);  // state and c_d * I_d
    double prev = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        x[d] = double(d) / double(m);
        const double c = std::exp(-trace.prices[d]) * (1.0 - x[d]) * double(m);
        w[d] = c * (trace.arrival_times[d] - prev);
        prev = trace.arrival_times[d];
    }

    auto grad_hess = [&](double a, double b, double g[2], double h[3]) {
        g[0] = g[1] = h[0] = h[1] = h[2] = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double r = a + b * x[d];
            const double ir = 1.0 / r;
            g[0] += ir - w[d];
            g[1] += x[d] * ir - x[d] * w[d];
            h[0] -= ir * ir;
            h[1] -= x[d] * ir * ir;
            h[2] -= x[d] * x[d] * ir * ir;
        }
    };

    double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    double a = double(n) / std::max(wsum, 1e-300);  // beta=0 closed form
    double b = 0.0;
    const double a_min = 1e-8, hi = 50.0;
    a = std::clamp(a, a_min, hi);
    for (int it = 0; it < 100; ++it) {
        double g[2], h[3];
        grad_hess(a, b, g, h);
        double da, db;
        const bool b_active = (b <= 0.0 && g[1] <= 0.0);
        if (b_active) {
            da = -g[0] / h[0];
            db = 0.0;
        } else {
            const double det = h[0] * h[2] - h[1] * h[1];
            if (std::abs(det) < 1e-300) break;
            da = -(h[2] * g[0] - h[1] * g[1]) / det;
            db = -(-h[1] * g[0] + h[0] * g[1]) / det;
        }
        double a_new = std::clamp(a + da, a_min, hi);
        double b_new = std::clamp(b + db, 0.0, hi);
        if (std::abs(a_new - a) < 1e-13 * (1.0 + a) && std::abs(b_new - b) < 1e-13 * (1.0 + b)) {
            a = a_new; b = b_new;
            break;
        }
        a = a_new;
        b = b_new;
    }
    return {a, b};
}

DecisionRule plugin_mle_rule() {
    return [](const SimTrace& trace, const TwoMarketInstance& inst, double horizon) {
        auto [a_hat, b_hat] = fit_exponential_mle(trace, inst.m);
        MarketParams fit{inst.m, a_hat, b_hat, a_hat + b_hat + 1.0};
        const double x = double(inst.n) / double(inst.m);
        return optimal_policy_price(fit, x, horizon);
    };
}

DistinguishResult distinguishability_experiment(const TwoMarketInstance& inst, double horizon,
                                                const DecisionRule& rule, int replicates,
                                                std::uint64_t seed_base) {
    inst.validate();
    if (replicates < 1) throw std::invalid_argument("replicate count must be at least 1");
    DistinguishResult res;
    res.instance = inst;
    res.replicates = replicates;

    const MarketParams market1{inst.m, inst.alpha, inst.beta, inst.alpha + inst.beta + inst.epsilon};
    const MarketParams market2{inst.m, inst.alpha, inst.beta + inst.epsilon,
                               inst.alpha + inst.beta + inst.epsilon};
    const double x_eval = double(inst.n) / double(inst.m);
    res.pi_market1 = optimal_policy_price(market1, x_eval, horizon);
    res.pi_market2 = optimal_policy_price(market2, x_eval, horizon);
    res.accept_gap_bound =
        inst.epsilon * std::pow(double(inst.n), 1.5) / (2.0 * inst.alpha * double(inst.m));
    res.kl_bound = double(inst.n) *
                   std::pow(inst.epsilon * double(inst.n) / double(inst.m), 2.0) /
                   (2.0 * inst.alpha * inst.alpha);

    struct RepOut {
        bool wrong1 = false, wrong2 = false;
        bool accept1 = false, accept2 = false;
        double llr = 0.0;
    };
    std::vector<RepOut> reps(replicates);

    parallel_for(replicates, [&](std::int64_t r) {
        RepOut& out = reps[r];
        for (int market = 1; market <= 2; ++market) {
            const MarketParams& params = market == 1 ? market1 : market2;
            FixedPricePolicy explore(0.0);
            SimTrace trace = simulate_n_arrivals(params, inst.n, explore,
                                                 derive_seed(seed_base, 2 * r + market - 1));
            const double pi = rule(trace, inst, horizon);
            const double d1 = std::abs(pi - res.pi_market1);
            const double d2 = std::abs(pi - res.pi_market2);
            const bool closer1 = d1 <= d2;
            if (market == 1) {
                out.accept1 = closer1;
                out.wrong1 = d2 <= d1;
            } else {
                out.accept2 = closer1;
                out.wrong2 = d1 <= d2;
                // log-likelihood ratio of market2 vs market1 on this trace
                double llr = 0.0, prev = 0.0;
                for (std::size_t k = 0; k < trace.arrival_times.size(); ++k) {
                    const double x = double(k) / double(inst.m);
                    const double c = std::exp(-trace.prices[k]) * (1.0 - x) * double(inst.m);
                    const double l1 = c * (inst.alpha + inst.beta * x);
                    const double l2 = c * (inst.alpha + (inst.beta + inst.epsilon) * x);
                    const double dt = trace.arrival_times[k] - prev;
                    prev = trace.arrival_times[k];
                    llr += std::log(l2 / l1) - (l2 - l1) * dt;
                }
                out.llr = llr;
            }
        }
    });

    int w1 = 0, w2 = 0, a1 = 0, a2 = 0;
    double llr_sum = 0.0;
    for (const auto& rep : reps) {
        w1 += rep.wrong1 ? 1 : 0;
        w2 += rep.wrong2 ? 1 : 0;
        a1 += rep.accept1 ? 1 : 0;
        a2 += rep.accept2 ? 1 : 0;
        llr_sum += rep.llr;
    }
    res.wrong_freq_market1 = double(w1) / replicates;
    res.wrong_freq_market2 = double(w2) / replicates;
    res.accept_freq_market1 = double(a1) / replicates;
    res.accept_freq_market2 = double(a2) / replicates;
    res.mean_llr = llr_sum / replicates;
    return res;
}

std::vector<PriceGapRow> price_gap_experiment(double alpha, double beta, double epsilon,
                                              double horizon, int grid_points, double slack) {
    if (!(alpha > 0.0) || !(beta >= 0.0) || !(epsilon >= 0.0))
        throw std::invalid_argument("market parameters out of range");
    if (grid_points < 1) throw std::invalid_argument("grid needs at least one point");
    const double t_min = (1.0 + std::sqrt(2.0)) * std::exp(1.0) / (alpha + beta);
    if (!(horizon >= t_min * (1.0 - 1e-12)))
        throw std::invalid_argument("horizon below the sensitivity regime (1+sqrt(2))e/(alpha+beta)");

    const double ab_hi = alpha + beta + epsilon;
    const double x_max =
        std::min(alpha * alpha * std::exp(1.0) / (4.0 * ab_hi * ab_hi * ab_hi * horizon), 0.999);
    const double bound =
        epsilon * alpha * std::exp(1.0) / (4.0 * ab_hi * ab_hi * ab_hi * horizon);

    const MarketParams low{1, alpha, beta, ab_hi + 1.0};
    const MarketParams high{1, alpha, beta + epsilon, ab_hi + 1.0};
    std::vector<PriceGapRow> rows;
    rows.reserve(grid_points);
    for (int j = 0; j < grid_points; ++j) {
        PriceGapRow row;
        row.x = grid_points == 1 ? 0.0 : x_max * double(j) / double(grid_points - 1);
        row.gap = optimal_policy_price(low, row.x, horizon) -
                  optimal_policy_price(high, row.x, horizon);
        row.bound = bound;
        row.ok = row.gap >= bound * (1.0 - slack) - 1e-15;
        rows.push_back(row);
    }
    return rows;
}

double trajectory_disadvantage(const MarketParams& params, double horizon,
                               const FluidTrajectory& traj, double tol) {
    double total = 0.0;
    double t0 = 0.0;
    for (const auto& seg : traj.segments) {
        if (seg.x_end <= seg.x_start) continue;
        auto integrand = [&](double x) {
            const double t = t0 + segment_time(params, seg.price, seg.x_start, x);
            const double remaining = std::max(horizon - t, 1e-12);
            const double pi = optimal_policy_price(params, x, remaining);
            return double(params.m) * f_convex(seg.price - pi);
        };
        total += integrate(integrand, seg.x_start, seg.x_end, tol);
        t0 += seg.duration;
    }
    return total;
}

}  // namespace bassdp
