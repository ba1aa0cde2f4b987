#pragma once

// Overflow-safe sums of exponential families. Every partition-function-like
// quantity in this library is carried as (log scale, mantissa) so ratios of
// terms like exp(-4*gamma*t*E^2 + sqrt(8*gamma)*E*W) stay finite for
// arbitrarily large t and |W|.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace sffmon {

/// Pairwise (tree) reduction. Bounds rounding error growth to O(log n) and,
/// being a fixed association order, doubles as the reproducibility contract
/// for all O(d^2) sums.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return T{};
    if (n <= 8) {
        T acc = xs[0];
        for (std::size_t i = 1; i < n; ++i) acc += xs[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& xs) {
    return pairwise_sum(std::span<const T>(xs));
}

/// A positive quantity represented as mantissa * exp(log_shift).
/// mantissa is kept O(1); log_shift absorbs the dynamic range.
struct ScaledReal {
    double log_shift = 0.0;
    double mantissa = 0.0;

    double value() const { return mantissa * std::exp(log_shift); }
    double log() const { return log_shift + std::log(mantissa); }
};

/// Complex analogue, for filtered phase sums such as the SFF numerator root.
struct ScaledComplex {
    double log_shift = 0.0;
    std::complex<double> mantissa{0.0, 0.0};

    /// |z|^2 as a ScaledReal.
    ScaledReal abs2() const { return {2.0 * log_shift, std::norm(mantissa)}; }
};

/// sum_n exp(exponents[n]) under a shared max shift.
inline ScaledReal shifted_exp_sum(std::span<const double> exponents) {
    if (exponents.empty()) return {0.0, 0.0};
    double m = -std::numeric_limits<double>::infinity();
    for (double a : exponents) m = std::max(m, a);
    if (!std::isfinite(m)) return {0.0, 0.0};
    std::vector<double> terms(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) terms[i] = std::exp(exponents[i] - m);
    return {m, pairwise_sum<double>(terms)};
}

inline ScaledReal shifted_exp_sum(const std::vector<double>& exponents) {
    return shifted_exp_sum(std::span<const double>(exponents));
}

/// sum_n exp(exponents[n] + i*phases[n]) under a shared max shift on the
/// real exponents.
inline ScaledComplex shifted_exp_sum(std::span<const double> exponents,
                                     std::span<const double> phases) {
    if (exponents.empty()) return {0.0, {0.0, 0.0}};
    double m = -std::numeric_limits<double>::infinity();
    for (double a : exponents) m = std::max(m, a);
    if (!std::isfinite(m)) return {0.0, {0.0, 0.0}};
    std::vector<std::complex<double>> terms(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i)
        terms[i] = std::polar(std::exp(exponents[i] - m), phases[i]);
    return {m, pairwise_sum<std::complex<double>>(terms)};
}

/// log(sum_n exp(exponents[n])).
inline double log_sum_exp(std::span<const double> exponents) {
    return shifted_exp_sum(exponents).log();
}

inline double log_sum_exp(const std::vector<double>& exponents) {
    return log_sum_exp(std::span<const double>(exponents));
}

/// Normalized weights exp(exponents[n]) / sum_k exp(exponents[k]).
inline std::vector<double> softmax(std::span<const double> exponents) {
    ScaledReal s = shifted_exp_sum(exponents);
    std::vector<double> w(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i)
        w[i] = std::exp(exponents[i] - s.log_shift) / s.mantissa;
    return w;
}

inline std::vector<double> softmax(const std::vector<double>& exponents) {
    return softmax(std::span<const double>(exponents));
}

} // namespace sffmon
