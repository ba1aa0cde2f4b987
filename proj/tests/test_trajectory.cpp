#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "sffmon/rng.hpp"
#include "sffmon/stats.hpp"
#include "sffmon/trajectory.hpp"

using namespace sffmon;

namespace {

SpectrumPtr make_spectrum(std::vector<double> energies) {
    auto spec = std::make_shared<SpectrumRealization>();
    spec->energies = std::move(energies);
    spec->dim = spec->energies.size();
    spec->source = SpectrumSource::file;
    return spec;
}

SpectrumPtr two_level() { return make_spectrum({-1.0, 1.0}); }

SpectrumPtr random_spectrum(std::size_t d, std::uint64_t seed, double scale = 1.0) {
    NoiseStream s = derive_stream(seed, "spec-test");
    std::vector<double> e(d);
    for (auto& x : e) x = scale * s.gaussian();
    std::sort(e.begin(), e.end());
    return make_spectrum(std::move(e));
}

} // namespace

TEST_CASE("coherent Gibbs state normalization") {
    const auto spec = random_spectrum(32, 1);
    for (double beta : {0.0, 0.7, 5.0, 200.0}) {
        CoherentGibbsState rho0(spec, beta);
        double total = 0.0;
        for (std::size_t n = 0; n < rho0.dim(); ++n)
            total += rho0.amplitude(n) * rho0.amplitude(n);
        INFO("beta=" << beta);
        CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(CoherentGibbsState(spec, -0.1), ValidationError);
}

TEST_CASE("dephased partition function") {
    const auto spec = random_spectrum(16, 2);
    const double beta = 0.8;
    CoherentGibbsState rho0(spec, beta);

    // gamma = 0 reduces to Z(beta).
    CHECK(dephased_partition_function(*spec, beta, 0.0, 3.0).log() ==
          Catch::Approx(rho0.log_z()).epsilon(1e-12));
    // t = 0 reduces to Z(x).
    CHECK(dephased_partition_function(*spec, beta, 2.5, 0.0).log() ==
          Catch::Approx(rho0.log_z()).epsilon(1e-12));
    // Two-level closed form: x = 0 gives 2 e^{-4 gamma t}.
    const auto z2 = dephased_partition_function(*two_level(), 0.0, 0.7, 1.3);
    CHECK(z2.value() == Catch::Approx(2.0 * std::exp(-4.0 * 0.7 * 1.3)).epsilon(1e-12));
    // Overflow-free at plateau-scale arguments.
    const auto zbig = dephased_partition_function(*spec, -3000.0, 1.0, 1e6);
    CHECK(std::isfinite(zbig.log()));
}

TEST_CASE("closed form at gamma = 0 is pure unitary dephasing") {
    const auto spec = random_spectrum(8, 3);
    CoherentGibbsState rho0(spec, 0.4);
    const double t = 2.7;
    const MonitoredState state = evolve_closed_form(rho0, 0.0, 1.0, t, 1.9);
    REQUIRE(state.rank1);
    for (std::size_t n = 0; n < 8; ++n) {
        for (std::size_t m = 0; m < 8; ++m) {
            const std::complex<double> expected =
                rho0.amplitude(n) * rho0.amplitude(m) *
                std::polar(1.0, -(spec->energies[n] - spec->energies[m]) * t);
            CHECK(std::abs(state.element(n, m) - expected) < 1e-13);
        }
    }
}

TEST_CASE("closed form at eta = 0 ignores the noise value") {
    const auto spec = random_spectrum(6, 4);
    CoherentGibbsState rho0(spec, 0.2);
    const double gamma = 0.6, t = 1.4;
    const MonitoredState a = evolve_closed_form(rho0, gamma, 0.0, t, 12.3);
    const MonitoredState b = evolve_closed_form(rho0, gamma, 0.0, t, -45.0);
    REQUIRE_FALSE(a.rank1);
    for (std::size_t n = 0; n < 6; ++n)
        for (std::size_t m = 0; m < 6; ++m) {
            CHECK(a.element(n, m) == b.element(n, m)); // bitwise
            const double diff = spec->energies[n] - spec->energies[m];
            const std::complex<double> expected =
                rho0.amplitude(n) * rho0.amplitude(m) *
                std::exp(-gamma * t * diff * diff) * std::polar(1.0, -diff * t);
            CHECK(std::abs(a.element(n, m) - expected) < 1e-13);
        }
}

TEST_CASE("two-level conditioned populations (hand evaluation)") {
    // beta = 0, eta = 1, spectrum {-1, +1}: the e^{-4 gamma t} filter cancels
    // and rho_00 = e^{-2 sqrt(2 gamma) w} / (2 cosh(2 sqrt(2 gamma) w)).
    CoherentGibbsState rho0(two_level(), 0.0);
    for (const auto& [gamma, t, w] : std::vector<std::array<double, 3>>{
             {0.5, 1.0, 0.3}, {2.0, 10.0, -1.7}, {0.05, 100.0, 4.0}}) {
        const MonitoredState state = evolve_closed_form(rho0, gamma, 1.0, t, w);
        const double arg = 2.0 * std::sqrt(2.0 * gamma) * w;
        const double expected0 = std::exp(-arg) / (2.0 * std::cosh(arg));
        const double expected1 = std::exp(arg) / (2.0 * std::cosh(arg));
        INFO("gamma=" << gamma << " t=" << t << " w=" << w);
        CHECK(state.population(0) == Catch::Approx(expected0).epsilon(1e-12));
        CHECK(state.population(1) == Catch::Approx(expected1).epsilon(1e-12));
    }
}

TEST_CASE("monitored state invariants: trace, Hermiticity, positivity, purity") {
    const auto spec = random_spectrum(12, 5);
    CoherentGibbsState rho0(spec, 0.5);
    for (const auto& [gamma, eta, t, w] : std::vector<std::array<double, 4>>{
             {0.3, 0.5, 2.0, 0.7}, {1.0, 0.25, 50.0, -4.0}, {2.0, 1.0, 1e4, 40.0}}) {
        const MonitoredState state = evolve_closed_form(rho0, gamma, eta, t, w);
        INFO("gamma=" << gamma << " eta=" << eta << " t=" << t);
        CHECK(std::abs(state.trace() - 1.0) < 1e-10);
        if (!state.rank1) {
            CHECK((state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.rho);
            CHECK(es.eigenvalues().minCoeff() > -1e-8);
        } else {
            CHECK(std::abs(state.purity() - 1.0) < 1e-10);
        }
    }
    CHECK_THROWS_AS(evolve_closed_form(rho0, -1.0, 1.0, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(evolve_closed_form(rho0, 1.0, 1.5, 1.0, 0.0), ValidationError);
}

TEST_CASE("mean energy: canonical at t=0, symmetric zero, stochastic average") {
    const auto spec = random_spectrum(24, 6);
    const double beta = 0.9;
    CoherentGibbsState rho0(spec, beta);
    // Canonical oracle: direct Boltzmann sum.
    double znum = 0.0, zden = 0.0;
    for (double e : spec->energies) {
        znum += e * std::exp(-beta * e);
        zden += std::exp(-beta * e);
    }
    CHECK(mean_energy(rho0, 0.7, 1.0, 0.0, 0.0) == Catch::Approx(znum / zden).epsilon(1e-12));

    // Symmetric spectrum at beta = 0, w = 0: exactly zero for all t.
    std::vector<double> sym;
    for (int k = 1; k <= 8; ++k) {
        sym.push_back(-0.13 * k);
        sym.push_back(0.13 * k);
    }
    std::sort(sym.begin(), sym.end());
    CoherentGibbsState rho_sym(make_spectrum(sym), 0.0);
    for (double t : {0.0, 0.5, 3.0, 100.0})
        CHECK(std::abs(mean_energy(rho_sym, 0.8, 1.0, t, 0.0)) < 1e-14);

    // Monte Carlo average over w ~ N(0, t) at fixed t: for the symmetric
    // beta = 0 state the w -> -w symmetry pins E[<H>_t] to the t = 0
    // Boltzmann average (zero) exactly; check within 4 sigma.
    const double t = 2.0, gamma = 0.4;
    MeanVar mc;
    NoiseStream s = derive_stream(17, "traj-mean");
    for (int j = 0; j < 10000; ++j)
        mc.add(mean_energy(rho_sym, gamma, 1.0, t, std::sqrt(t) * s.gaussian()));
    CHECK(mc.mean == Catch::Approx(0.0).margin(4.0 * mc.stderr_mean()));
}

TEST_CASE("energy variance: canonical, constant at gamma=0, collapse at long t") {
    const auto spec = random_spectrum(16, 7);
    const double beta = 0.6;
    CoherentGibbsState rho0(spec, beta);
    double zn = 0.0, zn2 = 0.0, zd = 0.0;
    for (double e : spec->energies) {
        const double wgt = std::exp(-beta * e);
        zn += e * wgt;
        zn2 += e * e * wgt;
        zd += wgt;
    }
    const double canonical_var = zn2 / zd - (zn / zd) * (zn / zd);
    CHECK(energy_variance(rho0, 0.5, 1.0, 0.0, 0.0) == Catch::Approx(canonical_var).epsilon(1e-10));

    const double v0 = energy_variance(rho0, 0.0, 1.0, 0.0, 0.0);
    for (double t : {0.1, 10.0, 1e4})
        CHECK(energy_variance(rho0, 0.0, 1.0, t, 0.0) == v0); // bitwise constant

    // Long-time collapse on every sampled trajectory: t >> 1/(gamma dE^2_min).
    const double gamma = 1.0;
    double min_gap2 = 1e300;
    for (std::size_t n = 0; n < spec->energies.size(); ++n)
        for (std::size_t m = n + 1; m < spec->energies.size(); ++m)
            min_gap2 = std::min(min_gap2, std::abs(spec->energies[n] * spec->energies[n] -
                                                   spec->energies[m] * spec->energies[m]));
    const double t_late = 2000.0 / (gamma * min_gap2);
    NoiseStream s = derive_stream(19, "traj-var");
    for (int j = 0; j < 100; ++j) {
        const double w = std::sqrt(t_late) * s.gaussian();
        CHECK(energy_variance(rho0, gamma, 1.0, t_late, w) <= 1e-6 * canonical_var);
    }
}

TEST_CASE("purity: unit at eta=1 and t=0, two-level dephasing closed form") {
    const auto spec = random_spectrum(10, 8);
    CoherentGibbsState rho0(spec, 0.3);
    NoiseStream s = derive_stream(23, "traj-pur");
    for (int j = 0; j < 20; ++j) {
        const double gamma = std::exp(s.gaussian());
        const double t = std::exp(2.0 * s.gaussian());
        const double w = std::sqrt(t) * s.gaussian();
        CHECK(std::abs(purity(rho0, gamma, 1.0, t, w) - 1.0) < 1e-10);
    }
    CHECK(purity(rho0, 2.0, 0.37, 0.0, 0.0) == Catch::Approx(1.0).epsilon(1e-12));

    CoherentGibbsState rho2(two_level(), 0.0);
    for (double gamma : {0.1, 1.0, 3.0})
        for (double t : {0.2, 1.0, 5.0}) {
            const double expected = (2.0 + 2.0 * std::exp(-8.0 * gamma * t)) / 4.0;
            CHECK(purity(rho2, gamma, 0.0, t, 3.3) == Catch::Approx(expected).epsilon(1e-12));
        }

    // Closed-form purity equals Tr[rho^2] of the evolved dense state.
    const MonitoredState state = evolve_closed_form(rho0, 0.8, 0.5, 2.0, 1.1);
    CHECK(purity(rho0, 0.8, 0.5, 2.0, 1.1) == Catch::Approx(state.purity()).epsilon(1e-10));
}

TEST_CASE("fidelity against a direct small-d evaluation") {
    const auto spec = random_spectrum(5, 9);
    CoherentGibbsState rho0(spec, 0.45);
    const MonitoredState state = evolve_closed_form(rho0, 0.7, 0.6, 1.8, -0.4);
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < 5; ++n)
        for (std::size_t m = 0; m < 5; ++m)
            acc += rho0.amplitude(n) * rho0.amplitude(m) * state.element(n, m);
    CHECK(state.fidelity_with(rho0) == Catch::Approx(acc.real()).epsilon(1e-12));
}

TEST_CASE("dense path approaches the rank-1 path as eta -> 1") {
    const auto spec = random_spectrum(6, 10);
    CoherentGibbsState rho0(spec, 0.25);
    const MonitoredState pure = evolve_closed_form(rho0, 0.9, 1.0, 3.0, 0.8);
    const MonitoredState near = evolve_closed_form(rho0, 0.9, 1.0 - 1e-9, 3.0, 0.8);
    REQUIRE(pure.rank1);
    REQUIRE_FALSE(near.rank1);
    for (std::size_t n = 0; n < 6; ++n)
        for (std::size_t m = 0; m < 6; ++m)
            CHECK(std::abs(pure.element(n, m) - near.element(n, m)) < 1e-6);
}
