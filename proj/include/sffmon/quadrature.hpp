#pragma once

// Gauss-Hermite rules (weight e^{-x^2}). Nodes come from the Golub-Welsch
// tridiagonal; weights are evaluated in log space from
//   w_j = 2^{G-1} G! sqrt(pi) / (G^2 H_{G-1}(x_j)^2)
// with a scaled Hermite recurrence. Eigenvector-based weights bottom out at
// the solver noise floor (~1e-32), which poisons log-space integrands that
// legitimately pair e^{-1000} weights with e^{+900} values.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "sffmon/errors.hpp"

namespace sffmon {

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> log_weights; // exact log of the e^{-x^2}-weighted rule
    std::vector<double> weights;     // exp(log_weights); may underflow to 0

    std::size_t size() const { return nodes.size(); }
};

namespace detail_quad {

/// log |H_{n}(x)| for the physicists' Hermite polynomial, by upward
/// recurrence with periodic rescaling.
inline double log_abs_hermite(std::size_t n, double x) {
    double h_prev = 1.0;       // H_0
    double h_curr = 2.0 * x;   // H_1
    double log_scale = 0.0;
    if (n == 0) return 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double h_next = 2.0 * x * h_curr - 2.0 * static_cast<double>(k) * h_prev;
        h_prev = h_curr;
        h_curr = h_next;
        const double mag = std::max(std::abs(h_prev), std::abs(h_curr));
        if (mag > 1e100) {
            h_prev *= 1e-100;
            h_curr *= 1e-100;
            log_scale += 100.0 * std::numbers::ln10;
        }
    }
    return log_scale + std::log(std::abs(h_curr));
}

} // namespace detail_quad

inline GaussHermiteRule make_gauss_hermite(std::size_t n) {
    if (n == 0) throw ValidationError("Gauss-Hermite order must be positive");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const double off = std::sqrt(static_cast<double>(k) / 2.0);
        jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
        jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.log_weights.resize(n);
    rule.weights.resize(n);
    const double nd = static_cast<double>(n);
    // log(2^{n-1} n! sqrt(pi) / n^2)
    const double log_prefactor = (nd - 1.0) * std::numbers::ln2 + std::lgamma(nd + 1.0) +
                                 0.5 * std::log(std::numbers::pi) - 2.0 * std::log(nd);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = solver.eigenvalues()(static_cast<Eigen::Index>(k));
        rule.nodes[k] = x;
        rule.log_weights[k] = log_prefactor - 2.0 * detail_quad::log_abs_hermite(n - 1, x);
        rule.weights[k] = std::exp(rule.log_weights[k]);
    }
    return rule;
}

/// Cached rules; orders used repeatedly by the adaptive SFF quadrature.
inline const GaussHermiteRule& gauss_hermite(std::size_t n) {
    static std::map<std::size_t, GaussHermiteRule> cache;
    static std::mutex mutex;
    std::scoped_lock lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_hermite(n)).first;
    return it->second;
}

} // namespace sffmon
