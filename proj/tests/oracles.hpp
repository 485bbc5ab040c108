#pragma once

// Test-only oracles, independent of the library implementations they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "bassdp/bass.hpp"

namespace oracles {

// Adaptive Simpson quadrature.
inline double quad_rec(const std::function<double(double)>& f, double a, double b, double fa,
                       double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return quad_rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1) +
           quad_rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1);
}

inline double quadrature(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-12) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return quad_rec(f, a, b, fa, fb, fm, whole, tol, 60);
}

// Regularized upper incomplete gamma Q(s, x); used for chi-square p-values.
inline double gamma_q(double s, double x) {
    if (x < 0.0 || s <= 0.0) return 1.0;
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) {
        // lower series
        double sum = 1.0 / s, term = sum, a = s;
        for (int k = 0; k < 500; ++k) {
            a += 1.0;
            term *= x / a;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
        return 1.0 - p;
    }
    // continued fraction
    double b = x + 1.0 - s, c = 1e300, d = 1.0 / b, h = d;
    for (int k = 1; k < 500; ++k) {
        const double an = -double(k) * (double(k) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

inline double chi2_pvalue(double statistic, int dof) {
    return gamma_q(double(dof) / 2.0, statistic / 2.0);
}

// Two-sample chi-square homogeneity test over count histograms (equal-length,
// bins with combined expectation < 5 are pooled).
inline double chi2_two_sample_pvalue(const std::vector<std::int64_t>& h1,
                                     const std::vector<std::int64_t>& h2) {
    double n1 = 0, n2 = 0;
    for (auto v : h1) n1 += double(v);
    for (auto v : h2) n2 += double(v);
    double stat = 0.0;
    int used = 0;
    double acc1 = 0, acc2 = 0;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        acc1 += double(h1[i]);
        acc2 += double(h2[i]);
        const double tot = acc1 + acc2;
        const bool last = i + 1 == h1.size();
        if (tot * n1 / (n1 + n2) < 5.0 && !last) continue;  // pool small bins
        const double e1 = tot * n1 / (n1 + n2);
        const double e2 = tot * n2 / (n1 + n2);
        if (e1 > 0) stat += (acc1 - e1) * (acc1 - e1) / e1;
        if (e2 > 0) stat += (acc2 - e2) * (acc2 - e2) / e2;
        ++used;
        acc1 = acc2 = 0;
    }
    return used > 1 ? chi2_pvalue(stat, used - 1) : 1.0;
}

// Thinning-based simulator of the stochastic Bass market at one constant
// price: candidate events from a homogeneous Poisson clock at the maximal
// rate, accepted with probability rate(x)/max_rate. Distribution-equivalent
// to exponential chaining but algorithmically unrelated.
inline std::int64_t thinning_adopters(const bassdp::MarketParams& params, double price,
                                      double horizon, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    auto u01 = [&] { return (double((eng() >> 11)) + 0.5) * 0x1.0p-53; };
    double gmax = params.alpha;  // max of (a+bx)(1-x) over [0,1]
    if (params.beta > params.alpha) {
        const double xm = (params.beta - params.alpha) / (2.0 * params.beta);
        gmax = (params.alpha + params.beta * xm) * (1.0 - xm);
    }
    const double big = double(params.m) * std::exp(-price) * gmax;
    double t = 0.0;
    std::int64_t d = 0;
    while (d < params.m) {
        t += -std::log(u01()) / big;
        if (t > horizon) break;
        const double x = double(d) / double(params.m);
        const double rate = double(params.m) * std::exp(-price) *
                            (params.alpha + params.beta * x) * (1.0 - x);
        if (u01() * big <= rate) ++d;
    }
    return d;
}

}  // namespace oracles
