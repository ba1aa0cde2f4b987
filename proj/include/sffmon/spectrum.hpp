#pragma once

// Spectra and where they come from: dense Hermitian diagonalization, GUE
// sampling, the SYK large-N density of states, and the versioned spectrum
// file format. Eigenvectors are checked on a sample of pairs and then
// discarded; everything downstream needs only {E_n}.

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sffmon/errors.hpp"
#include "sffmon/rng.hpp"

namespace sffmon {

enum class SpectrumSource { SYK, GUE, file };
enum class SymmetryClass { GUE, GOE, GSE, unknown };

inline std::string to_string(SpectrumSource s) {
    switch (s) {
        case SpectrumSource::SYK: return "SYK";
        case SpectrumSource::GUE: return "GUE";
        case SpectrumSource::file: return "file";
    }
    return "?";
}

inline std::string to_string(SymmetryClass s) {
    switch (s) {
        case SymmetryClass::GUE: return "GUE";
        case SymmetryClass::GOE: return "GOE";
        case SymmetryClass::GSE: return "GSE";
        case SymmetryClass::unknown: return "unknown";
    }
    return "?";
}

struct SpectrumRealization {
    std::vector<double> energies; // ascending
    std::uint64_t dim = 0;
    SpectrumSource source = SpectrumSource::file;
    SymmetryClass symmetry_class = SymmetryClass::unknown;
    std::uint64_t disorder_seed = 0;
    int n_majorana = 0; // 0 when not an SYK spectrum

    void validate() const {
        if (energies.size() != dim || dim == 0)
            throw ValidationError("spectrum length must equal dim > 0");
        for (std::size_t i = 0; i < energies.size(); ++i) {
            if (!std::isfinite(energies[i]))
                throw ValidationError("spectrum contains non-finite energy");
            if (i > 0 && energies[i] < energies[i - 1])
                throw ValidationError("spectrum must be sorted ascending");
        }
    }

    double span() const { return energies.back() - energies.front(); }
};

/// Majorana SYK symmetry class of the full spectrum by N mod 8
/// (0 -> GOE, 2 -> GUE, 4 -> GSE, 6 -> GUE).
inline SymmetryClass syk_symmetry_class(int n_majorana) {
    switch (n_majorana % 8) {
        case 0: return SymmetryClass::GOE;
        case 2:
        case 6: return SymmetryClass::GUE;
        case 4: return SymmetryClass::GSE;
        default: return SymmetryClass::unknown;
    }
}

/// Eigenvalues of a dense Hermitian matrix, ascending. Validates Hermiticity
/// (max element mismatch <= 1e-10 * max element) and spot-checks eigenpair
/// residuals at 1e-8 relative to the spectral norm before dropping vectors.
inline SpectrumRealization diagonalize(const Eigen::MatrixXcd& h,
                                       SpectrumSource source = SpectrumSource::file,
                                       std::uint64_t seed = 0,
                                       SymmetryClass sym = SymmetryClass::unknown) {
    if (h.rows() != h.cols() || h.rows() == 0)
        throw ValidationError("diagonalize needs a square matrix");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double herm_defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-10 * scale)
        throw ValidationError("matrix is not Hermitian (defect " + std::to_string(herm_defect) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw ValidationError("eigensolver failed");

    const Eigen::Index d = h.rows();
    const double spectral_norm =
        std::max(std::abs(solver.eigenvalues()(0)), std::abs(solver.eigenvalues()(d - 1)));
    const Eigen::Index n_checks = std::min<Eigen::Index>(d, 8);
    for (Eigen::Index c = 0; c < n_checks; ++c) {
        const Eigen::Index k = c * (d - 1) / std::max<Eigen::Index>(1, n_checks - 1);
        const auto v = solver.eigenvectors().col(k);
        const double residual = (h * v - solver.eigenvalues()(k) * v).norm();
        if (residual > 1e-8 * std::max(1.0, spectral_norm))
            throw ValidationError("eigenpair residual " + std::to_string(residual) +
                                  " exceeds tolerance");
    }

    SpectrumRealization out;
    out.dim = static_cast<std::uint64_t>(d);
    out.energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
    out.source = source;
    out.symmetry_class = sym;
    out.disorder_seed = seed;
    out.validate();
    return out;
}

/// GUE draw with the off-diagonal variance chosen so the semicircle radius
/// equals `width`. Fixed draw order: diagonal, then the upper triangle
/// row-major (re, im per entry).
inline SpectrumRealization sample_gue_spectrum(std::uint64_t dim, double width,
                                               NoiseStream& stream,
                                               std::uint64_t seed = 0) {
    if (dim < 2) throw ValidationError("GUE needs dim >= 2");
    if (!(width > 0.0)) throw ValidationError("GUE needs width > 0");
    const double sigma = width / (2.0 * std::sqrt(static_cast<double>(dim)));
    Eigen::MatrixXcd h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t i = 0; i < dim; ++i)
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sigma * stream.gaussian();
    const double off = sigma / std::numbers::sqrt2;
    for (std::uint64_t i = 0; i < dim; ++i)
        for (std::uint64_t j = i + 1; j < dim; ++j) {
            const std::complex<double> z(off * stream.gaussian(), off * stream.gaussian());
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z;
            h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(z);
        }
    auto spec = diagonalize(h, SpectrumSource::GUE, seed, SymmetryClass::GUE);
    return spec;
}

struct DosModel {
    int n_majorana = 0;
    std::uint64_t dim = 0;

    void validate() const {
        if (n_majorana < 4 || n_majorana % 2 != 0)
            throw ValidationError("DosModel needs even N >= 4");
        if (dim != (std::uint64_t{1} << (n_majorana / 2)))
            throw ValidationError("DosModel needs d = 2^(N/2)");
    }
};

/// Large-N SYK density of states sqrt(2/(pi N)) * d * exp(-2 E^2 / N),
/// normalized to d. At desk-scale N the true width is smaller by
/// sqrt(24 C(N,4)/N^4); see finite_size_width_ratio.
inline double syk_dos(double energy, const DosModel& model) {
    model.validate();
    const double n = static_cast<double>(model.n_majorana);
    return std::sqrt(2.0 / (std::numbers::pi * n)) * static_cast<double>(model.dim) *
           std::exp(-2.0 * energy * energy / n);
}

/// Exact ratio (finite-N rms width) / (large-N rms width sqrt(N)/2):
/// sqrt(C(N,4) * 24 / N^4) = sqrt((1-1/N)(1-2/N)(1-3/N)).
inline double finite_size_width_ratio(int n_majorana) {
    const double n = static_cast<double>(n_majorana);
    return std::sqrt((1.0 - 1.0 / n) * (1.0 - 2.0 / n) * (1.0 - 3.0 / n));
}

// ---------------------------------------------------------------------------
// Spectrum files: magic "SFFSPEC1", one JSON metadata line, then dim
// little-endian binary64 eigenvalues.

inline void save_spectrum(const SpectrumRealization& spec, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "spectrum files are little-endian");
    spec.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    nlohmann::json meta{{"source", to_string(spec.source)},
                        {"symmetry_class", to_string(spec.symmetry_class)},
                        {"dim", spec.dim},
                        {"seed", spec.disorder_seed},
                        {"n_majorana", spec.n_majorana}};
    out.write("SFFSPEC1", 8);
    const std::string meta_line = meta.dump();
    out << '\n' << meta_line << '\n';
    out.write(reinterpret_cast<const char*>(spec.energies.data()),
              static_cast<std::streamsize>(spec.energies.size() * sizeof(double)));
    if (!out) throw ParseError("write failed for " + path);
}

inline SpectrumRealization load_spectrum(const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "spectrum files are little-endian");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    char magic[9] = {};
    in.read(magic, 8);
    if (!in || std::string_view(magic, 8) != "SFFSPEC1")
        throw ParseError("bad magic in " + path, 0);
    char nl = 0;
    in.get(nl);
    if (nl != '\n') throw ParseError("expected newline after magic in " + path, 8);
    std::string meta_line;
    if (!std::getline(in, meta_line))
        throw ParseError("missing metadata line in " + path, 9);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad metadata JSON in " + path + ": " + e.what(), 9);
    }
    SpectrumRealization spec;
    spec.dim = meta.at("dim").get<std::uint64_t>();
    spec.disorder_seed = meta.value("seed", std::uint64_t{0});
    spec.n_majorana = meta.value("n_majorana", 0);
    const std::string src = meta.value("source", "file");
    spec.source = src == "SYK" ? SpectrumSource::SYK
                 : src == "GUE" ? SpectrumSource::GUE
                                : SpectrumSource::file;
    const std::string sym = meta.value("symmetry_class", "unknown");
    spec.symmetry_class = sym == "GUE" ? SymmetryClass::GUE
                          : sym == "GOE" ? SymmetryClass::GOE
                          : sym == "GSE" ? SymmetryClass::GSE
                                         : SymmetryClass::unknown;
    spec.energies.resize(spec.dim);
    in.read(reinterpret_cast<char*>(spec.energies.data()),
            static_cast<std::streamsize>(spec.dim * sizeof(double)));
    if (static_cast<std::uint64_t>(in.gcount()) != spec.dim * sizeof(double))
        throw ParseError("truncated eigenvalue block in " + path,
                         9 + static_cast<long long>(meta_line.size()) + 1 + in.gcount());
    spec.validate();
    return spec;
}

/// Plain-text import: one eigenvalue per line, '#' comments allowed.
/// Values are sorted on load.
inline SpectrumRealization import_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    SpectrumRealization spec;
    spec.source = SpectrumSource::file;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line.substr(first), &used);
            spec.energies.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("bad eigenvalue in " + path + " line " + std::to_string(line_no),
                             line_no);
        }
    }
    if (spec.energies.empty()) throw ParseError("no eigenvalues in " + path);
    std::sort(spec.energies.begin(), spec.energies.end());
    spec.dim = spec.energies.size();
    spec.validate();
    return spec;
}

} // namespace sffmon
