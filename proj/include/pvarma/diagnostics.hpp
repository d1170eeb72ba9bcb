#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvarma/chi_squared.hpp"

namespace pvarma {

/// rho_k = sum_{t>k} (x_t - m)(x_{t-k} - m) / sum_t (x_t - m)^2 for k = 1..max_lag.
inline std::vector<double> sample_autocorrelation(std::span<const double> x, int max_lag) {
    if (max_lag < 1) throw std::invalid_argument("sample_autocorrelation: max_lag must be >= 1");
    const std::size_t n = x.size();
    if (n <= static_cast<std::size_t>(max_lag)) throw std::invalid_argument("sample_autocorrelation: series shorter than max_lag + 1");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> d(n);
    double denom = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = x[t] - mean;
        denom += d[t] * d[t];
    }
    if (!(denom > 0.0)) throw std::invalid_argument("sample_autocorrelation: zero variance");
    std::vector<double> rho(static_cast<std::size_t>(max_lag));
    for (std::size_t k = 1; k <= rho.size(); ++k) {
        double num = 0.0;
        for (std::size_t t = k; t < n; ++t) num += d[t] * d[t - k];
        rho[k - 1] = num / denom;
    }
    return rho;
}

// ---------------------------------------------------------------------------
// Augmented Dickey-Fuller

struct AdfResult {
    double statistic = 0.0;
    int lags_used = 0;
    std::size_t n_obs = 0;  // observations in the final regression
    double critical_value_1pct = 0.0;
    double critical_value_5pct = 0.0;
    double critical_value_10pct = 0.0;
    bool reject_unit_root = false;
};

/// MacKinnon (2010) response surface, constant-only regression, one series.
inline double adf_critical_value(double level, std::size_t n_obs) {
    const double t = 1.0 / static_cast<double>(n_obs);
    if (level == 0.01) return -3.43035 - 6.5393 * t - 16.786 * t * t - 79.433 * t * t * t;
    if (level == 0.05) return -2.86154 - 2.8903 * t - 4.234 * t * t - 40.040 * t * t * t;
    if (level == 0.10) return -2.56677 - 1.5384 * t - 2.809 * t * t;
    throw std::invalid_argument("adf_critical_value: level must be 0.01, 0.05 or 0.10");
}

/// Default maximum augmentation lag, floor(12 (n/100)^(1/4)).
inline int schwert_max_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd std_error;
    std::size_t rows = 0;
};

inline OlsFit ols_with_stderr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto k = X.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-12);
    if (qr.rank() < k || X.rows() <= k) throw std::invalid_argument("adf_test: singular regression matrix");
    OlsFit out;
    out.rows = static_cast<std::size_t>(X.rows());
    out.beta = qr.solve(y);
    const double rss = (y - X * out.beta).squaredNorm();
    const double s2 = rss / static_cast<double>(X.rows() - k);
    // (X'X)^{-1} = P R^{-1} R^{-T} P'
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv = R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd cov_perm = Rinv * Rinv.transpose();
    const Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();
    out.std_error = (s2 * cov.diagonal()).cwiseSqrt();
    return out;
}

/// Design for dx_j = a + g x_j + sum_i d_i dx_{j-i}, j = first..n-2 (0-based
/// differences dx_j = x_{j+1} - x_j). Column order: const, level, lags.
inline void adf_design(std::span<const double> x, int lags, std::size_t first, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    const std::size_t nd = x.size() - 1;
    const auto rows = static_cast<Eigen::Index>(nd - first);
    X.resize(rows, 2 + lags);
    y.resize(rows);
    for (std::size_t j = first; j < nd; ++j) {
        const auto r = static_cast<Eigen::Index>(j - first);
        y(r) = x[j + 1] - x[j];
        X(r, 0) = 1.0;
        X(r, 1) = x[j];
        for (int i = 1; i <= lags; ++i) X(r, 1 + i) = x[j + 1 - static_cast<std::size_t>(i)] - x[j - static_cast<std::size_t>(i)];
    }
}

}  // namespace detail

struct AdfOptions {
    /// Fixed augmentation lag. When empty the lag starts at the Schwert
    /// maximum and insignificant trailing lags (|t| < 1.645) are dropped.
    std::optional<int> lags;
    double level = 0.05;
};

/// ADF test with constant, no trend. Rejects the unit root when the t-ratio
/// of the level coefficient is below the critical value.
inline AdfResult adf_test(std::span<const double> x, const AdfOptions& opt = {}) {
    const std::size_t n = x.size();
    const int max_lag = opt.lags ? *opt.lags : schwert_max_lag(n);
    if (max_lag < 0) throw std::invalid_argument("adf_test: negative lag");
    if (n < 20 + static_cast<std::size_t>(max_lag)) {
        throw std::invalid_argument("adf_test: series too short (need >= 20 + lags observations)");
    }
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    int lags = max_lag;
    if (!opt.lags) {
        // backward elimination on a common sample
        for (; lags > 0; --lags) {
            detail::adf_design(x, lags, static_cast<std::size_t>(max_lag), X, y);
            const auto f = detail::ols_with_stderr(X, y);
            const double t_last = f.beta(1 + lags) / f.std_error(1 + lags);
            if (std::abs(t_last) > 1.6448536269514722) break;
        }
    }
    detail::adf_design(x, lags, static_cast<std::size_t>(lags), X, y);
    const auto f = detail::ols_with_stderr(X, y);

    AdfResult r;
    r.statistic = f.beta(1) / f.std_error(1);
    r.lags_used = lags;
    r.n_obs = f.rows;
    r.critical_value_1pct = adf_critical_value(0.01, f.rows);
    r.critical_value_5pct = adf_critical_value(0.05, f.rows);
    r.critical_value_10pct = adf_critical_value(0.10, f.rows);
    r.reject_unit_root = r.statistic < adf_critical_value(opt.level, f.rows);
    return r;
}

// ---------------------------------------------------------------------------
// Ljung-Box

struct LjungBoxResult {
    int lag = 0;
    double statistic = 0.0;
    int dof = 0;
    double critical_value_5pct = 0.0;
    double p_value = 1.0;
    bool reject_white = false;
};

/// Q = n (n + 2) sum_{k=1..h} rho_k^2 / (n - k), compared with the chi-squared
/// 0.95 quantile on h - fitted_params degrees of freedom.
inline LjungBoxResult ljung_box(std::span<const double> residuals, int lag, int fitted_params) {
    if (fitted_params < 0) throw std::invalid_argument("ljung_box: negative fitted_params");
    if (lag <= fitted_params) {
        throw std::invalid_argument("ljung_box: lag " + std::to_string(lag) + " leaves no degrees of freedom after " +
                                    std::to_string(fitted_params) + " fitted parameters");
    }
    const auto rho = sample_autocorrelation(residuals, lag);
    const double n = static_cast<double>(residuals.size());
    double sum = 0.0;
    for (std::size_t k = 1; k <= rho.size(); ++k) sum += rho[k - 1] * rho[k - 1] / (n - static_cast<double>(k));
    LjungBoxResult r;
    r.lag = lag;
    r.statistic = n * (n + 2.0) * sum;
    r.dof = lag - fitted_params;
    r.critical_value_5pct = chi_squared_quantile(0.95, r.dof);
    r.p_value = 1.0 - chi_squared_cdf(r.statistic, r.dof);
    r.reject_white = r.statistic > r.critical_value_5pct;
    return r;
}

/// -2 loglik + (p + q + 1) ln n
inline double bic(double loglik, std::size_t n, int p, int q) {
    if (n < 1) throw std::invalid_argument("bic: n must be >= 1");
    return -2.0 * loglik + static_cast<double>(p + q + 1) * std::log(static_cast<double>(n));
}

}  // namespace pvarma
