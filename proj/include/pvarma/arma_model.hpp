#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pvarma {

/// ARMA(p,q) for a series with mean `intercept`:
///
///   x_t - mu = sum_i phi_i (x_{t-i} - mu) + e_t + sum_j theta_j e_{t-j},  e_t ~ N(0, sigma2)
struct ArmaModel {
    int p = 0;
    int q = 0;
    std::vector<double> phi;
    std::vector<double> theta;
    double intercept = 0.0;  // mu, MW
    double sigma2 = 1.0;     // MW^2
    double loglik = 0.0;
    std::size_t n_obs = 0;

    static ArmaModel make(std::vector<double> phi, std::vector<double> theta, double intercept, double sigma2) {
        ArmaModel m;
        m.p = static_cast<int>(phi.size());
        m.q = static_cast<int>(theta.size());
        m.phi = std::move(phi);
        m.theta = std::move(theta);
        m.intercept = intercept;
        m.sigma2 = sigma2;
        return m;
    }

    friend bool operator==(const ArmaModel&, const ArmaModel&) = default;
};

/// One-step innovations aligned to the fitted series.
struct Residuals {
    std::vector<double> values;
};

// Partial-autocorrelation parameterization. A vector of partial
// autocorrelations in (-1,1)^k maps one-to-one onto the coefficients psi of a
// polynomial 1 - psi_1 z - ... - psi_k z^k with all roots outside the unit
// circle (Durbin-Levinson recursion).

inline std::vector<double> pacf_to_coefficients(std::span<const double> pacf) {
    const std::size_t k = pacf.size();
    std::vector<double> psi(k), prev(k);
    for (std::size_t m = 0; m < k; ++m) {
        const double r = pacf[m];
        prev.assign(psi.begin(), psi.end());
        psi[m] = r;
        for (std::size_t j = 0; j < m; ++j) psi[j] = prev[j] - r * prev[m - 1 - j];
    }
    return psi;
}

/// Inverse of pacf_to_coefficients. Returns nullopt when the polynomial has a
/// root on or inside the unit circle.
inline std::optional<std::vector<double>> coefficients_to_pacf(std::span<const double> psi) {
    const std::size_t k = psi.size();
    std::vector<double> cur(psi.begin(), psi.end()), pacf(k), next;
    for (std::size_t m = k; m-- > 0;) {
        const double r = cur[m];
        if (!std::isfinite(r) || std::abs(r) >= 1.0) return std::nullopt;
        pacf[m] = r;
        next.assign(m, 0.0);
        const double denom = 1.0 - r * r;
        for (std::size_t j = 0; j < m; ++j) next[j] = (cur[j] + r * cur[m - 1 - j]) / denom;
        cur.swap(next);
    }
    return pacf;
}

/// 1 - phi_1 z - ... - phi_p z^p has every root strictly outside the unit circle.
inline bool is_stationary(std::span<const double> phi) { return coefficients_to_pacf(phi).has_value(); }

/// 1 + theta_1 z + ... + theta_q z^q has every root strictly outside the unit circle.
inline bool is_invertible(std::span<const double> theta) {
    std::vector<double> neg(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) neg[i] = -theta[i];
    return coefficients_to_pacf(neg).has_value();
}

inline bool is_valid(const ArmaModel& m) {
    return m.p == static_cast<int>(m.phi.size()) && m.q == static_cast<int>(m.theta.size()) &&
           is_stationary(m.phi) && is_invertible(m.theta) && m.sigma2 > 0.0 && std::isfinite(m.sigma2) &&
           std::isfinite(m.intercept);
}

/// Maps an unconstrained vector (tanh of each entry gives a partial
/// autocorrelation) to (phi, theta) in the stationary-invertible region.
inline void unconstrained_to_coefficients(std::span<const double> u, int p, int q, std::vector<double>& phi,
                                          std::vector<double>& theta) {
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::tanh(u[i]);
    phi = pacf_to_coefficients(std::span<const double>(r).first(static_cast<std::size_t>(p)));
    theta = pacf_to_coefficients(std::span<const double>(r).subspan(static_cast<std::size_t>(p), static_cast<std::size_t>(q)));
    for (auto& t : theta) t = -t;
}

/// Inverse map, with partial autocorrelations clamped to |r| <= clamp so the
/// result stays finite. Returns nullopt outside the valid region.
inline std::optional<std::vector<double>> coefficients_to_unconstrained(std::span<const double> phi,
                                                                        std::span<const double> theta,
                                                                        double clamp = 0.99) {
    auto rp = coefficients_to_pacf(phi);
    std::vector<double> neg(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) neg[i] = -theta[i];
    auto rq = coefficients_to_pacf(neg);
    if (!rp || !rq) return std::nullopt;
    std::vector<double> u;
    u.reserve(phi.size() + theta.size());
    for (double r : *rp) u.push_back(std::atanh(std::clamp(r, -clamp, clamp)));
    for (double r : *rq) u.push_back(std::atanh(std::clamp(r, -clamp, clamp)));
    return u;
}

}  // namespace pvarma
