#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pvarma {

/// Regularized lower incomplete gamma function P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be positive");
    if (x <= 0.0) return 0.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    constexpr double eps = 1e-16;
    if (x < a + 1.0) {
        // series
        double term = 1.0 / a, sum = term, ap = a;
        for (int i = 0; i < 10000; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) break;
        }
        return sum * std::exp(log_prefix);
    }
    // continued fraction for Q (modified Lentz)
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return 1.0 - std::exp(log_prefix) * h;
}

inline double chi_squared_cdf(double x, double dof) { return regularized_gamma_p(0.5 * dof, 0.5 * x); }

/// Inverse chi-squared CDF by bisection, absolute accuracy 1e-10.
inline double chi_squared_quantile(double prob, double dof) {
    if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("chi_squared_quantile: prob must lie in (0,1)");
    if (!(dof > 0.0)) throw std::invalid_argument("chi_squared_quantile: dof must be positive");
    double lo = 0.0, hi = std::max(1.0, dof);
    while (chi_squared_cdf(hi, dof) < prob) hi *= 2.0;
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (chi_squared_cdf(mid, dof) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace pvarma
