#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvarma/arma_model.hpp"
#include "pvarma/likelihood.hpp"
#include "pvarma/nelder_mead.hpp"
#include "pvarma/random.hpp"

namespace pvarma {

/// Raised when no optimizer start produced a usable fit.
class fit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitOptions {
    std::uint64_t seed = 0;
    int random_restarts = 3;
    bool warm_start = true;
    NelderMeadOptions optimizer{};
};

struct FitResult {
    ArmaModel model;
    Residuals residuals;
    std::size_t evaluations = 0;
};

/// Innovations e_t = (x_t - mu) - sum phi_i (x_{t-i} - mu) - sum theta_j e_{t-j},
/// with pre-sample deviations and innovations taken as zero.
inline std::vector<double> conditional_residuals(const ArmaModel& m, std::span<const double> series) {
    std::vector<double> e(series.size());
    const auto p = static_cast<std::size_t>(m.p);
    const auto q = static_cast<std::size_t>(m.q);
    for (std::size_t t = 0; t < series.size(); ++t) {
        double pred = 0.0;
        for (std::size_t i = 1; i <= p && i <= t; ++i) pred += m.phi[i - 1] * (series[t - i] - m.intercept);
        for (std::size_t j = 1; j <= q && j <= t; ++j) pred += m.theta[j - 1] * e[t - j];
        e[t] = series[t] - m.intercept - pred;
    }
    return e;
}

/// mu + sum phi_i (x_{t-i} - mu) + sum theta_j e_{t-j}, using the most recent
/// entries of each history.
inline double forecast_one_step(const ArmaModel& m, std::span<const double> history,
                                std::span<const double> residual_history) {
    if (history.size() < static_cast<std::size_t>(m.p) || residual_history.size() < static_cast<std::size_t>(m.q)) {
        throw std::invalid_argument("forecast_one_step: insufficient history");
    }
    double pred = m.intercept;
    for (std::size_t i = 1; i <= static_cast<std::size_t>(m.p); ++i) {
        pred += m.phi[i - 1] * (history[history.size() - i] - m.intercept);
    }
    for (std::size_t j = 1; j <= static_cast<std::size_t>(m.q); ++j) {
        pred += m.theta[j - 1] * residual_history[residual_history.size() - j];
    }
    return pred;
}

/// One sampled path of `horizon` steps continuing the given histories.
inline std::vector<double> simulate(const ArmaModel& m, std::size_t horizon, std::span<const double> history,
                                    std::span<const double> residual_history, std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
    if (history.size() < static_cast<std::size_t>(m.p) || residual_history.size() < static_cast<std::size_t>(m.q)) {
        throw std::invalid_argument("simulate: insufficient history");
    }
    if (!(m.sigma2 >= 0.0)) throw std::invalid_argument("simulate: negative sigma2");
    std::vector<double> xs(history.end() - m.p, history.end());
    std::vector<double> es(residual_history.end() - m.q, residual_history.end());
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(m.sigma2);
    std::vector<double> path;
    path.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        const double eps = sd * normal(rng);
        const double x = forecast_one_step(m, xs, es) + eps;
        path.push_back(x);
        xs.push_back(x);
        es.push_back(eps);
    }
    return path;
}

namespace detail {

/// Least squares b minimizing |X b - y|.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return X.colPivHouseholderQr().solve(y);
}

/// Hannan-Rissanen estimate: a long autoregression supplies innovation
/// estimates, then x_t is regressed on its own lags and lagged innovations.
/// Input must be centered.
inline std::optional<std::vector<double>> hannan_rissanen_start(std::span<const double> y, int p, int q) {
    const auto n = static_cast<long>(y.size());
    const long k = std::max(p, q);
    long m = q > 0 ? std::clamp<long>(static_cast<long>(10.0 * std::log10(static_cast<double>(n))), k + 1, n / 5) : 0;
    std::vector<double> e(y.size(), 0.0);
    if (q > 0) {
        if (m < 1 || n - m < 2 * m) return std::nullopt;
        Eigen::MatrixXd X(n - m, m);
        Eigen::VectorXd b(n - m);
        for (long t = m; t < n; ++t) {
            b(t - m) = y[static_cast<std::size_t>(t)];
            for (long i = 1; i <= m; ++i) X(t - m, i - 1) = y[static_cast<std::size_t>(t - i)];
        }
        const Eigen::VectorXd a = least_squares(X, b);
        const Eigen::VectorXd r = b - X * a;
        for (long t = m; t < n; ++t) e[static_cast<std::size_t>(t)] = r(t - m);
    }
    const long start = m + k;
    const long rows = n - start;
    if (p + q == 0 || rows < 2 * (p + q) + 2) return std::nullopt;
    Eigen::MatrixXd X(rows, p + q);
    Eigen::VectorXd b(rows);
    for (long t = start; t < n; ++t) {
        b(t - start) = y[static_cast<std::size_t>(t)];
        for (long i = 1; i <= p; ++i) X(t - start, i - 1) = y[static_cast<std::size_t>(t - i)];
        for (long j = 1; j <= q; ++j) X(t - start, p + j - 1) = e[static_cast<std::size_t>(t - j)];
    }
    const Eigen::VectorXd c = least_squares(X, b);
    if (!c.allFinite()) return std::nullopt;
    std::vector<double> phi(c.data(), c.data() + p), theta(c.data() + p, c.data() + p + q);
    return coefficients_to_unconstrained(phi, theta, 0.95);
}

}  // namespace detail

/// Exact maximum-likelihood ARMA(p,q) fit with jointly estimated mean.
///
/// (phi, theta) are searched in the partial-autocorrelation parameterization,
/// so every candidate is stationary and invertible; mean and innovation
/// variance are profiled out in closed form. Starts are a Hannan-Rissanen
/// warm start plus `random_restarts` uniform draws from the transformed cube.
inline FitResult fit(std::span<const double> series, int p, int q, const FitOptions& opt = {}) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit: negative order");
    const std::size_t n = series.size();
    if (n <= static_cast<std::size_t>(p + q + 1)) {
        throw std::invalid_argument("fit: series too short for ARMA(" + std::to_string(p) + "," + std::to_string(q) + ")");
    }
    for (double x : series) {
        if (!std::isfinite(x)) throw std::invalid_argument("fit: non-finite value in series");
    }
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    std::vector<double> centered(series.begin(), series.end());
    double ss = 0.0;
    for (auto& x : centered) {
        x -= mean;
        ss += x * x;
    }
    if (!(ss > 1e-300) || ss <= 1e-24 * static_cast<double>(n) * std::max(1.0, mean * mean)) {
        throw std::invalid_argument("fit: series has zero variance");
    }

    std::vector<double> phi, theta;
    auto objective = [&](const std::vector<double>& u) {
        unconstrained_to_coefficients(u, p, q, phi, theta);
        try {
            return -profile_log_likelihood(phi, theta, centered).loglik;
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const auto dim = static_cast<std::size_t>(p + q);
    std::vector<std::vector<double>> starts;
    if (opt.warm_start) {
        if (auto hr = detail::hannan_rissanen_start(centered, p, q)) starts.push_back(*hr);
        else starts.emplace_back(dim, 0.0);
    }
    if (dim > 0) {
        Rng rng(opt.seed);
        std::uniform_real_distribution<double> unif(-0.95, 0.95);
        for (int r = 0; r < opt.random_restarts; ++r) {
            std::vector<double> u(dim);
            for (auto& ui : u) ui = std::atanh(unif(rng));
            starts.push_back(std::move(u));
        }
    }
    if (starts.empty()) starts.emplace_back(dim, 0.0);

    NelderMeadResult best;
    std::size_t evaluations = 0;
    for (const auto& s : starts) {
        auto r = nelder_mead(objective, s, opt.optimizer);
        evaluations += r.evaluations;
        if (std::isfinite(r.value) && r.value < best.value) best = std::move(r);
    }
    if (!std::isfinite(best.value)) throw fit_error("fit: optimizer failed from every start");

    unconstrained_to_coefficients(best.x, p, q, phi, theta);
    const auto prof = profile_log_likelihood(phi, theta, centered);
    if (!(prof.sigma2 > 0.0)) throw fit_error("fit: degenerate innovation variance");

    FitResult out;
    out.model = ArmaModel::make(phi, theta, mean + prof.mean, prof.sigma2);
    out.model.loglik = prof.loglik;
    out.model.n_obs = n;
    out.residuals.values = conditional_residuals(out.model, series);
    out.evaluations = evaluations;
    return out;
}

}  // namespace pvarma
