#pragma once

// Ensemble averaging of trajectory SFFs over disorder x noise. Work items are
// independent; results land in preallocated slots and are reduced in index
// order, so outputs are bit-identical for any worker count. Per-trajectory
// numerators/denominators are kept as logs so annealed ratios (mean of
// numerator over mean of denominator) stay finite where individual samples
// span thousands of e-folds.

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "sffmon/errors.hpp"
#include "sffmon/grid.hpp"
#include "sffmon/logsum.hpp"
#include "sffmon/sff.hpp"
#include "sffmon/spectrum.hpp"
#include "sffmon/stats.hpp"
#include "sffmon/wiener.hpp"

namespace sffmon {

enum class AveragingMode {
    quenched,
    annealed_noise_fixed_h,
    annealed_noise_then_disorder,
    annealed_both
};

inline std::string to_string(AveragingMode m) {
    switch (m) {
        case AveragingMode::quenched: return "quenched";
        case AveragingMode::annealed_noise_fixed_h: return "annealed_noise_fixed_H";
        case AveragingMode::annealed_noise_then_disorder: return "annealed_noise_then_disorder";
        case AveragingMode::annealed_both: return "annealed_both";
    }
    return "?";
}

struct AveragingSpec {
    std::size_t n_disorder = 1;
    std::size_t n_trajectories = 1;
    AveragingMode mode = AveragingMode::quenched;
    bool crossed = false;        // share the same noise set across disorder realizations
    bool analytic_noise = true;  // annealed modes: exact Gaussian moments vs sampled

    void validate() const {
        if (n_disorder < 1 || n_trajectories < 1)
            throw ValidationError("averaging needs n_disorder >= 1 and n_trajectories >= 1");
    }
};

struct CurveMeta {
    SffVariant variant = SffVariant::monitored;
    double gamma = 0.0;
    double eta = 1.0;
    double beta = 0.0;
    std::size_t n_disorder = 1;
    std::size_t n_trajectories = 1;
    AveragingMode mode = AveragingMode::quenched;
    std::uint64_t master_seed = 0;
};

struct SffCurve {
    TimeGrid grid;
    std::vector<double> values;
    std::vector<double> stderrs;
    CurveMeta meta;

    void validate() const {
        if (values.size() != grid.size() || stderrs.size() != grid.size())
            throw ValidationError("curve arrays must match the grid");
    }
};

/// Run fn(0..n_items) on `workers` threads; item order of completion is
/// irrelevant because each item owns its output slot.
inline void parallel_for(std::size_t n_items, std::size_t workers,
                         const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n_items <= 1) {
        for (std::size_t i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min(workers, n_items);
    pool.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

/// Disorder source: realization index -> spectrum. Implementations must be
/// pure in the index (safe to call from any worker).
using SpectrumProvider = std::function<SpectrumRealization(std::size_t)>;

namespace detail_avg {

struct TrajectorySamples {
    // [point] log numerator / log denominator of Eq.-(6)-type ratios.
    std::vector<double> log_num;
    std::vector<double> log_den;
};

inline TrajectorySamples trajectory_samples(const SpectrumRealization& spec, double beta,
                                            double gamma, double eta, const TimeGrid& grid,
                                            const WienerPath& path, SffMethod method) {
    TrajectorySamples out;
    out.log_num.resize(grid.size());
    out.log_den.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const SffSample s =
            sff_sample(spec.energies, beta, gamma, eta, grid[k], path.values[k], method);
        out.log_num[k] = s.log_num;
        out.log_den[k] = s.log_den;
    }
    return out;
}

/// log of (1/n) sum_i exp(logs[i]).
inline double log_mean_exp(std::vector<double> logs) {
    const double n = static_cast<double>(logs.size());
    return log_sum_exp(logs) - std::log(n);
}

} // namespace detail_avg

struct AverageSffParams {
    double beta = 0.0;
    double gamma = 1.0;
    double eta = 1.0;
    SffMethod method = SffMethod::auto_select;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
};

/// Noise/disorder-averaged SFF curve per the requested mode:
///   quenched                  E_H E_W [N/D]
///   annealed_noise_fixed_H    E_W[N] / E_W[D] for realization 0
///   annealed_noise_then_dis.  E_H [ E_W[N] / E_W[D] ]
///   annealed_both             E_H E_W [N] / E_H E_W [D]
/// In analytic mode the Wiener averages use E[e^{lambda W}] = e^{lambda^2 t/2}
/// termwise (exact), which turns the numerator into the dephasing kernel and
/// the denominator into Z(beta)^2.
inline SffCurve average_sff(const SpectrumProvider& provider, const AverageSffParams& params,
                            const TimeGrid& grid, const AveragingSpec& avg) {
    grid.validate();
    avg.validate();
    const std::size_t n_points = grid.size();

    const bool annealed = avg.mode != AveragingMode::quenched;
    const std::size_t n_disorder =
        avg.mode == AveragingMode::annealed_noise_fixed_h ? 1 : avg.n_disorder;

    // Spectra first (parallel across disorder realizations).
    std::vector<SpectrumRealization> spectra(n_disorder);
    parallel_for(n_disorder, params.workers, [&](std::size_t i) { spectra[i] = provider(i); });

    SffCurve curve;
    curve.grid = grid;
    curve.values.assign(n_points, 0.0);
    curve.stderrs.assign(n_points, 0.0);
    curve.meta.variant = params.eta == 1.0 ? SffVariant::monitored : SffVariant::efficiency;
    curve.meta.gamma = params.gamma;
    curve.meta.eta = params.eta;
    curve.meta.beta = params.beta;
    curve.meta.n_disorder = n_disorder;
    curve.meta.n_trajectories = avg.n_trajectories;
    curve.meta.mode = avg.mode;
    curve.meta.master_seed = params.master_seed;

    if (annealed && avg.analytic_noise) {
        // Exact Wiener averages per Hamiltonian: numerator -> dephasing
        // numerator, denominator -> Z(beta)^2.
        std::vector<std::vector<double>> log_num(n_disorder), log_den(n_disorder);
        parallel_for(n_disorder, params.workers, [&](std::size_t i) {
            log_num[i].resize(n_points);
            log_den[i].resize(n_points);
            const double log_zb = detail_sff::log_z(spectra[i].energies, params.beta);
            for (std::size_t k = 0; k < n_points; ++k) {
                log_num[i][k] = log_annealed_numerator(spectra[i].energies, params.beta,
                                                       params.gamma, grid[k]);
                log_den[i][k] = 2.0 * log_zb;
            }
        });
        for (std::size_t k = 0; k < n_points; ++k) {
            if (avg.mode == AveragingMode::annealed_noise_then_disorder) {
                MeanVar mv;
                for (std::size_t i = 0; i < n_disorder; ++i)
                    mv.add(std::exp(log_num[i][k] - log_den[i][k]));
                curve.values[k] = mv.mean;
                curve.stderrs[k] = mv.stderr_mean();
            } else {
                std::vector<double> nums(n_disorder), dens(n_disorder);
                for (std::size_t i = 0; i < n_disorder; ++i) {
                    nums[i] = log_num[i][k];
                    dens[i] = log_den[i][k];
                }
                curve.values[k] = std::exp(detail_avg::log_mean_exp(nums) -
                                           detail_avg::log_mean_exp(dens));
                curve.stderrs[k] = 0.0; // deterministic given the spectra
            }
        }
        return curve;
    }

    // Sampled trajectories (quenched always; annealed in sampled mode).
    const std::size_t n_traj = avg.n_trajectories;
    const std::size_t n_items = n_disorder * n_traj;
    std::vector<detail_avg::TrajectorySamples> samples(n_items);
    parallel_for(n_items, params.workers, [&](std::size_t item) {
        const std::size_t i = item / n_traj;
        const std::size_t j = item % n_traj;
        NoiseStream stream = avg.crossed
                                 ? derive_stream(params.master_seed, "traj", j)
                                 : derive_stream(params.master_seed, "traj", i, j);
        const WienerPath path = sample_wiener_path(grid, stream);
        samples[item] = detail_avg::trajectory_samples(spectra[i], params.beta, params.gamma,
                                                       params.eta, grid, path, params.method);
    });

    for (std::size_t k = 0; k < n_points; ++k) {
        switch (avg.mode) {
            case AveragingMode::quenched: {
                MeanVar mv;
                for (std::size_t item = 0; item < n_items; ++item)
                    mv.add(std::exp(samples[item].log_num[k] - samples[item].log_den[k]));
                curve.values[k] = mv.mean;
                curve.stderrs[k] = mv.stderr_mean();
                break;
            }
            case AveragingMode::annealed_noise_fixed_h:
            case AveragingMode::annealed_both: {
                std::vector<double> nums(n_items), dens(n_items);
                for (std::size_t item = 0; item < n_items; ++item) {
                    nums[item] = samples[item].log_num[k];
                    dens[item] = samples[item].log_den[k];
                }
                curve.values[k] = std::exp(detail_avg::log_mean_exp(nums) -
                                           detail_avg::log_mean_exp(dens));
                curve.stderrs[k] = 0.0;
                break;
            }
            case AveragingMode::annealed_noise_then_disorder: {
                MeanVar mv;
                for (std::size_t i = 0; i < n_disorder; ++i) {
                    std::vector<double> nums(n_traj), dens(n_traj);
                    for (std::size_t j = 0; j < n_traj; ++j) {
                        nums[j] = samples[i * n_traj + j].log_num[k];
                        dens[j] = samples[i * n_traj + j].log_den[k];
                    }
                    mv.add(std::exp(detail_avg::log_mean_exp(nums) -
                                    detail_avg::log_mean_exp(dens)));
                }
                curve.values[k] = mv.mean;
                curve.stderrs[k] = mv.stderr_mean();
                break;
            }
        }
    }
    return curve;
}

/// Reference (gamma = 0 or w = 0) ensembles share the same reduction path.
inline SffCurve average_reference_curve(const SpectrumProvider& provider, SffVariant variant,
                                        double beta, double gamma, const TimeGrid& grid,
                                        std::size_t n_disorder, std::uint64_t master_seed,
                                        std::size_t workers, SffMethod method = SffMethod::auto_select) {
    grid.validate();
    if (n_disorder < 1) throw ValidationError("need n_disorder >= 1");
    std::vector<SpectrumRealization> spectra(n_disorder);
    parallel_for(n_disorder, workers, [&](std::size_t i) { spectra[i] = provider(i); });

    SffCurve curve;
    curve.grid = grid;
    curve.values.assign(grid.size(), 0.0);
    curve.stderrs.assign(grid.size(), 0.0);
    curve.meta.variant = variant;
    curve.meta.gamma = gamma;
    curve.meta.eta = variant == SffVariant::dephasing ? 0.0 : 1.0;
    curve.meta.beta = beta;
    curve.meta.n_disorder = n_disorder;
    curve.meta.n_trajectories = 1;
    curve.meta.mode = AveragingMode::quenched;
    curve.meta.master_seed = master_seed;

    std::vector<std::vector<double>> per_spec(n_disorder);
    parallel_for(n_disorder, workers, [&](std::size_t i) {
        per_spec[i].resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double v = 0.0;
            switch (variant) {
                case SffVariant::unitary: v = sff_unitary(spectra[i].energies, beta, grid[k]); break;
                case SffVariant::nojump: v = sff_nojump(spectra[i].energies, beta, gamma, grid[k]); break;
                case SffVariant::dephasing:
                    v = sff_dephasing(spectra[i].energies, beta, gamma, grid[k], method);
                    break;
                default:
                    throw ValidationError("reference curves are unitary, nojump, or dephasing");
            }
            per_spec[i][k] = v;
        }
    });
    for (std::size_t k = 0; k < grid.size(); ++k) {
        MeanVar mv;
        for (std::size_t i = 0; i < n_disorder; ++i) mv.add(per_spec[i][k]);
        curve.values[k] = mv.mean;
        curve.stderrs[k] = mv.stderr_mean();
    }
    return curve;
}

} // namespace sffmon
