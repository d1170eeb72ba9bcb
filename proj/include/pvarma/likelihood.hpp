#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "pvarma/arma_model.hpp"

namespace pvarma {

namespace detail {

/// Stationary state covariance of the companion-form ARMA state vector with
/// unit innovation variance: solves P = T P T' + R R'.
inline Eigen::MatrixXd stationary_state_covariance(std::span<const double> phi, std::span<const double> theta) {
    const int p = static_cast<int>(phi.size());
    const int q = static_cast<int>(theta.size());
    const int r = std::max(p, q + 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < p; ++i) T(i, 0) = phi[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < r; ++i) T(i, i + 1) = 1.0;
    Eigen::VectorXd R = Eigen::VectorXd::Zero(r);
    R(0) = 1.0;
    for (int j = 0; j < q; ++j) R(j + 1) = theta[static_cast<std::size_t>(j)];

    // vec(P) = (I - T (x) T)^{-1} vec(R R'), column-major vec
    const int rr = r * r;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(rr, rr);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k)
                for (int l = 0; l < r; ++l) A(i + j * r, k + l * r) -= T(i, k) * T(j, l);
    const Eigen::MatrixXd RR = R * R.transpose();
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(RR.data(), rr);
    const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
    Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(sol.data(), r, r);
    return 0.5 * (P + P.transpose());
}

}  // namespace detail

/// Sufficient statistics of the Kalman innovations for unit innovation
/// variance. The filter is run twice in lockstep: once on the data and once on
/// a column of ones, so that the mean can be profiled out exactly.
struct InnovationSums {
    double sum_log_f = 0.0;  // sum ln F_t
    double s_yy = 0.0;       // sum v_y^2 / F
    double s_y1 = 0.0;       // sum v_y v_1 / F
    double s_11 = 0.0;       // sum v_1^2 / F
    std::size_t n = 0;

    /// GLS estimate of the mean.
    double mean() const { return s_y1 / s_11; }
    /// Weighted sum of squares at mean `mu`.
    double sum_squares(double mu) const { return s_yy - 2.0 * mu * s_y1 + mu * mu * s_11; }
};

/// Exact Kalman filter for a zero-mean ARMA process (unit innovation variance)
/// started at the stationary distribution. When the prediction covariance
/// stops changing the filter switches to its steady-state gain.
inline InnovationSums kalman_innovation_sums(std::span<const double> phi, std::span<const double> theta,
                                             std::span<const double> y) {
    const int p = static_cast<int>(phi.size());
    const int q = static_cast<int>(theta.size());
    const int r = std::max(p, q + 1);
    const auto ru = static_cast<std::size_t>(r);

    const Eigen::MatrixXd P0 = detail::stationary_state_covariance(phi, theta);
    std::vector<double> P(ru * ru), Pn(ru * ru), M(ru * ru), K(ru), a_y(ru, 0.0), a_1(ru, 0.0), tmp(ru);
    std::vector<double> phi_r(ru, 0.0), R(ru, 0.0);
    for (int i = 0; i < p; ++i) phi_r[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i)];
    R[0] = 1.0;
    for (int j = 0; j < q; ++j) R[static_cast<std::size_t>(j) + 1] = theta[static_cast<std::size_t>(j)];
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) P[static_cast<std::size_t>(i * r + j)] = P0(i, j);

    auto at = [ru](std::vector<double>& m, std::size_t i, std::size_t j) -> double& { return m[i * ru + j]; };
    // a <- T a + K v, with T the companion matrix
    auto advance = [&](std::vector<double>& a, double v) {
        const double a0 = a[0];
        for (std::size_t i = 0; i < ru; ++i) {
            tmp[i] = phi_r[i] * a0 + (i + 1 < ru ? a[i + 1] : 0.0) + K[i] * v;
        }
        a.swap(tmp);
    };

    InnovationSums s;
    s.n = y.size();
    bool steady = false;
    double F = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (!steady) {
            F = P[0];
            if (!(F > 0.0) || !std::isfinite(F)) throw std::domain_error("kalman filter: nonpositive innovation variance");
            // K = T P Z' / F
            for (std::size_t i = 0; i < ru; ++i) {
                K[i] = (phi_r[i] * at(P, 0, 0) + (i + 1 < ru ? at(P, i + 1, 0) : 0.0)) / F;
            }
        }
        const double v_y = y[t] - a_y[0];
        const double v_1 = 1.0 - a_1[0];
        s.sum_log_f += std::log(F);
        s.s_yy += v_y * v_y / F;
        s.s_y1 += v_y * v_1 / F;
        s.s_11 += v_1 * v_1 / F;
        advance(a_y, v_y);
        advance(a_1, v_1);

        if (!steady) {
            // Pn = T P T' + R R' - K K' F
            for (std::size_t i = 0; i < ru; ++i)
                for (std::size_t j = 0; j < ru; ++j)
                    at(M, i, j) = phi_r[i] * at(P, 0, j) + (i + 1 < ru ? at(P, i + 1, j) : 0.0);
            double change = 0.0;
            for (std::size_t i = 0; i < ru; ++i) {
                for (std::size_t j = 0; j < ru; ++j) {
                    const double tpt = at(M, i, 0) * phi_r[j] + (j + 1 < ru ? at(M, i, j + 1) : 0.0);
                    const double val = tpt + R[i] * R[j] - K[i] * K[j] * F;
                    at(Pn, i, j) = val;
                    change = std::max(change, std::abs(val - at(P, i, j)));
                }
            }
            P.swap(Pn);
            if (change < 1e-15 * std::max(1.0, std::abs(P[0]))) {
                steady = true;
                F = P[0];
                for (std::size_t i = 0; i < ru; ++i) {
                    K[i] = (phi_r[i] * at(P, 0, 0) + (i + 1 < ru ? at(P, i + 1, 0) : 0.0)) / F;
                }
            }
        }
    }
    return s;
}

/// Exact Gaussian log-likelihood of `series` under `model` (mean `intercept`,
/// innovation variance `sigma2`).
inline double log_likelihood(const ArmaModel& model, std::span<const double> series) {
    if (!is_stationary(model.phi)) throw std::invalid_argument("log_likelihood: non-stationary AR parameters");
    if (!is_invertible(model.theta)) throw std::invalid_argument("log_likelihood: non-invertible MA parameters");
    if (!(model.sigma2 > 0.0)) throw std::invalid_argument("log_likelihood: sigma2 must be positive");
    if (series.size() < static_cast<std::size_t>(std::max(model.p, model.q) + 1)) {
        throw std::invalid_argument("log_likelihood: series too short");
    }
    std::vector<double> centered(series.begin(), series.end());
    for (auto& x : centered) x -= model.intercept;
    const auto s = kalman_innovation_sums(model.phi, model.theta, centered);
    const double n = static_cast<double>(s.n);
    return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * (s.sum_log_f + n * std::log(model.sigma2)) -
           0.5 * s.s_yy / model.sigma2;
}

struct ProfiledLikelihood {
    double loglik = 0.0;
    double mean = 0.0;
    double sigma2 = 0.0;
};

/// Log-likelihood maximized analytically over the mean and innovation
/// variance for fixed (phi, theta).
inline ProfiledLikelihood profile_log_likelihood(std::span<const double> phi, std::span<const double> theta,
                                                 std::span<const double> series) {
    const auto s = kalman_innovation_sums(phi, theta, series);
    const double n = static_cast<double>(s.n);
    ProfiledLikelihood out;
    out.mean = s.mean();
    out.sigma2 = std::max(s.sum_squares(out.mean), 0.0) / n;
    out.loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(out.sigma2) + 1.0) - 0.5 * s.sum_log_f;
    return out;
}

}  // namespace pvarma
