#pragma once

// SYK_4 Hamiltonian construction. N Majorana fermions are realized on a
// Jordan-Wigner chain of N/2 qubits:
//   chi_{2k-1} = f * Z_1 ... Z_{k-1} X_k,   chi_{2k} = f * Z_1 ... Z_{k-1} Y_k,
// with f = 1 for {chi_i, chi_j} = 2 delta_ij (chi^2 = 1, the default; this is
// the convention in which the large-N density of states has variance N/4) and
// f = 1/sqrt(2) for {chi_i, chi_j} = delta_ij (chi^2 = 1/2; the whole spectrum
// shrinks by exactly 4). Quartic terms are multiplied out as Pauli strings and
// accumulated column by column, so the matrix is Hermitian by construction and
// commutes exactly with the global parity Z_1 ... Z_{N/2}.

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sffmon/errors.hpp"
#include "sffmon/rng.hpp"

namespace sffmon {

enum class MajoranaNorm {
    two_delta, // {chi_i, chi_j} = 2 delta_ij  (chi^2 = 1)
    delta      // {chi_i, chi_j} =   delta_ij  (chi^2 = 1/2)
};

struct SykParameters {
    int n_majorana = 14;
    double coupling_scale = 1.0; // J
    std::uint64_t seed = 0;

    void validate() const {
        if (n_majorana < 4) throw ValidationError("SYK needs N >= 4 Majoranas");
        if (n_majorana % 2 != 0) throw ValidationError("SYK needs even N");
        if (!(coupling_scale > 0.0)) throw ValidationError("SYK needs J > 0");
    }

    std::uint64_t dim() const { return std::uint64_t{1} << (n_majorana / 2); }
};

struct SykCoupling {
    int k, l, m, n; // 0-based, k < l < m < n
    double value;
};

/// All C(N,4) couplings, i.i.d. Gaussian with mean 0 and variance 6 J^2 / N^3,
/// drawn in lexicographic index order from the given stream.
inline std::vector<SykCoupling> sample_syk_couplings(const SykParameters& params,
                                                     NoiseStream& stream) {
    params.validate();
    const int n = params.n_majorana;
    const double nd = static_cast<double>(n);
    const double sigma = params.coupling_scale * std::sqrt(6.0 / (nd * nd * nd));
    std::vector<SykCoupling> couplings;
    couplings.reserve(static_cast<std::size_t>(n) * (n - 1) * (n - 2) * (n - 3) / 24);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                for (int d = c + 1; d < n; ++d)
                    couplings.push_back({a, b, c, d, sigma * stream.gaussian()});
    return couplings;
}

namespace detail {

/// i^phase * X(x_mask) Z(z_mask) acting on the qubit register.
struct PauliString {
    std::uint64_t x_mask = 0;
    std::uint64_t z_mask = 0;
    int phase = 0; // exponent of i, mod 4

    PauliString operator*(const PauliString& rhs) const {
        PauliString out;
        // X(a)Z(b) * X(a')Z(b') = (-1)^{b.a'} X(a^a') Z(b^b')
        const int crossings = std::popcount(z_mask & rhs.x_mask);
        out.phase = (phase + rhs.phase + 2 * (crossings & 1)) & 3;
        out.x_mask = x_mask ^ rhs.x_mask;
        out.z_mask = z_mask ^ rhs.z_mask;
        return out;
    }
};

/// Majorana index i in [0, N): even -> X-type, odd -> Y-type on site i/2.
inline PauliString majorana_string(int i) {
    PauliString p;
    const int site = i / 2;
    const std::uint64_t low = (std::uint64_t{1} << site) - 1;
    p.x_mask = std::uint64_t{1} << site;
    if (i % 2 == 0) {
        p.z_mask = low;
    } else {
        p.z_mask = low | (std::uint64_t{1} << site); // Y = i X Z
        p.phase = 1;
    }
    return p;
}

inline std::complex<double> i_power(int phase) {
    switch (phase & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

} // namespace detail

struct SykBuildOptions {
    MajoranaNorm norm = MajoranaNorm::two_delta;
    int max_n_majorana = 20; // desk-scale cap; d = 2^(N/2)
    bool allow_large = false; // permits N up to 26 with a resource warning
};

inline void check_syk_size(const SykParameters& params, const SykBuildOptions& opts) {
    const int hard_cap = opts.allow_large ? 26 : opts.max_n_majorana;
    if (params.n_majorana > hard_cap)
        throw ResourceError("SYK N=" + std::to_string(params.n_majorana) +
                            " exceeds the configured cap N=" + std::to_string(hard_cap) +
                            (opts.allow_large ? "" : " (pass allow_large for N up to 26)"));
}

/// Dense Hermitian H = sum_{k<l<m<n} J_klmn chi_k chi_l chi_m chi_n.
inline Eigen::MatrixXcd build_syk_hamiltonian(const SykParameters& params,
                                              const std::vector<SykCoupling>& couplings,
                                              const SykBuildOptions& opts = {}) {
    params.validate();
    check_syk_size(params, opts);
    const int n = params.n_majorana;
    const std::size_t expected =
        static_cast<std::size_t>(n) * (n - 1) * (n - 2) * (n - 3) / 24;
    if (couplings.size() != expected)
        throw ValidationError("expected " + std::to_string(expected) + " couplings, got " +
                              std::to_string(couplings.size()));

    const std::uint64_t dim = params.dim();
    // f^4 per quartic term: 1 for chi^2 = 1, (1/sqrt 2)^4 = 1/4 for chi^2 = 1/2.
    const double quartic_scale = (opts.norm == MajoranaNorm::two_delta) ? 1.0 : 0.25;

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (const auto& c : couplings) {
        const detail::PauliString str = detail::majorana_string(c.k) *
                                        detail::majorana_string(c.l) *
                                        detail::majorana_string(c.m) *
                                        detail::majorana_string(c.n);
        const std::complex<double> coeff =
            c.value * quartic_scale * detail::i_power(str.phase);
        for (std::uint64_t col = 0; col < dim; ++col) {
            const std::uint64_t row = col ^ str.x_mask;
            const int sign = std::popcount(str.z_mask & col) & 1;
            h(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
                sign ? -coeff : coeff;
        }
    }
    return h;
}

/// Global parity Z_1 ... Z_{N/2} as diagonal signs (+1 even, -1 odd).
inline Eigen::VectorXd parity_diagonal(std::uint64_t dim) {
    Eigen::VectorXd q(static_cast<Eigen::Index>(dim));
    for (std::uint64_t s = 0; s < dim; ++s)
        q(static_cast<Eigen::Index>(s)) = (std::popcount(s) & 1) ? -1.0 : 1.0;
    return q;
}

enum class ParitySector { full, even, odd };

/// Restriction of H onto one parity sector (basis states of fixed popcount
/// parity). H commutes with parity exactly, so this is a clean block.
inline Eigen::MatrixXcd project_parity_sector(const Eigen::MatrixXcd& h, ParitySector sector) {
    if (sector == ParitySector::full)
        throw ValidationError("project_parity_sector: pick even or odd");
    const std::uint64_t dim = static_cast<std::uint64_t>(h.rows());
    const int want = (sector == ParitySector::odd) ? 1 : 0;
    std::vector<std::uint64_t> keep;
    keep.reserve(dim / 2);
    for (std::uint64_t s = 0; s < dim; ++s)
        if ((std::popcount(s) & 1) == want) keep.push_back(s);
    Eigen::MatrixXcd block(static_cast<Eigen::Index>(keep.size()),
                           static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j)
            block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                h(static_cast<Eigen::Index>(keep[i]), static_cast<Eigen::Index>(keep[j]));
    return block;
}

} // namespace sffmon
