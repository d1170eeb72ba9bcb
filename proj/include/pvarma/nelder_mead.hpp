#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace pvarma {

struct NelderMeadOptions {
    double initial_step = 0.5;
    /// A simplex pass ends when best and worst vertex values differ by less
    /// than this.
    double f_tol = 1e-10;
    double x_tol = 1e-10;
    /// The search restarts from the best point until one pass improves the
    /// objective by less than this.
    double improvement_tol = 1e-8;
    std::size_t max_evaluations = 20000;
    int max_restarts = 20;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Minimizes `f` with the Nelder-Mead simplex method (standard coefficients
/// 1, 2, 0.5, 0.5). Non-finite objective values are treated as +inf.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, const NelderMeadOptions& opt = {}) {
    const std::size_t n = start.size();
    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    if (n == 0) {
        res.x = start;
        res.value = eval(start);
        res.converged = std::isfinite(res.value);
        return res;
    }

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fx(n + 1);
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    res.x = start;
    res.value = eval(start);

    for (int pass = 0; pass <= opt.max_restarts; ++pass) {
        const double pass_start_value = res.value;
        simplex.assign(n + 1, res.x);
        fx[0] = res.value;
        for (std::size_t i = 0; i < n; ++i) {
            simplex[i + 1][i] += opt.initial_step;
            fx[i + 1] = eval(simplex[i + 1]);
        }

        while (res.evaluations < opt.max_evaluations) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
            const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

            double spread = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
            if (std::isfinite(fx[worst]) && fx[worst] - fx[best] <= opt.f_tol && spread <= 1e3 * opt.x_tol) break;
            if (spread <= opt.x_tol) break;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == worst) continue;
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
            }
            for (auto& c : centroid) c /= static_cast<double>(n);

            for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
            const double fr = eval(xr);
            if (fr < fx[best]) {
                for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
                const double fe = eval(xe);
                if (fe < fr) {
                    simplex[worst] = xe;
                    fx[worst] = fe;
                } else {
                    simplex[worst] = xr;
                    fx[worst] = fr;
                }
                continue;
            }
            if (fr < fx[second]) {
                simplex[worst] = xr;
                fx[worst] = fr;
                continue;
            }
            const bool outside = fr < fx[worst];
            for (std::size_t k = 0; k < n; ++k) {
                xc[k] = outside ? centroid[k] + 0.5 * (xr[k] - centroid[k])
                                : centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
            }
            const double fc = eval(xc);
            if (fc < (outside ? fr : fx[worst])) {
                simplex[worst] = xc;
                fx[worst] = fc;
                continue;
            }
            // shrink toward best
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == best) continue;
                for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                fx[i] = eval(simplex[i]);
            }
        }

        const auto best_it = std::min_element(fx.begin(), fx.end());
        const auto best_idx = static_cast<std::size_t>(best_it - fx.begin());
        if (*best_it < res.value) {
            res.value = *best_it;
            res.x = simplex[best_idx];
        }
        if (res.evaluations >= opt.max_evaluations) break;
        if (std::isfinite(res.value) && pass_start_value - res.value < opt.improvement_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace pvarma
