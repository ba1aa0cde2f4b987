#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sffmon/stats.hpp"
#include "sffmon/wiener.hpp"

using namespace sffmon;

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(TimeGrid::from_points({1.0, 1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(TimeGrid::from_points({2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(TimeGrid::from_points({-1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(TimeGrid::from_points({0.0}), ValidationError);
    CHECK_THROWS_AS(TimeGrid::logspace(0.0, 1.0, 10), ValidationError);
    const TimeGrid g = TimeGrid::logspace(1e-2, 1e4, 61);
    CHECK(g.front() == Catch::Approx(1e-2));
    CHECK(g.back() == 1e4);
    const TimeGrid u = TimeGrid::uniform(0.0, 1.0, 101);
    CHECK(u.uniform_step() == Catch::Approx(0.01));
    CHECK_THROWS_AS(g.uniform_step(), ValidationError);
}

TEST_CASE("Wiener mean and variance at T = 1") {
    const TimeGrid grid = TimeGrid::from_points({0.0, 0.3, 1.0});
    const int n = 100000;
    MeanVar terminal;
    for (int j = 0; j < n; ++j) {
        NoiseStream s = derive_stream(10, "wiener-mv", j);
        const WienerPath p = sample_wiener_path(grid, s);
        REQUIRE(p.values[0] == 0.0);
        terminal.add(p.values.back());
    }
    // E[W(1)] = 0 within 4 sigma / sqrt(n); Var[W(1)] = 1 within 5%.
    CHECK(terminal.mean == Catch::Approx(0.0).margin(4.0 / std::sqrt(double(n))));
    CHECK(terminal.variance() == Catch::Approx(1.0).epsilon(0.05));
}

TEST_CASE("same stream key twice gives the identical path") {
    const TimeGrid grid = TimeGrid::logspace(0.1, 100.0, 33);
    NoiseStream s1 = derive_stream(77, "traj", 0, 1);
    NoiseStream s2 = derive_stream(77, "traj", 0, 1);
    const WienerPath a = sample_wiener_path(grid, s1);
    const WienerPath b = sample_wiener_path(grid, s2);
    CHECK(a.values == b.values);
    // Log grid with t_0 > 0 starts with W(t_0) ~ N(0, t_0), not zero.
    CHECK(a.values[0] != 0.0);
}

TEST_CASE("increment independence (lag >= 1 autocorrelation)") {
    const TimeGrid grid = TimeGrid::uniform(0.0, 10.0, 4001);
    NoiseStream s = derive_stream(5, "wiener-ac");
    const WienerPath p = sample_wiener_path(grid, s);
    std::vector<double> incs(p.size() - 1);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) incs[k] = p.increment(k);
    const double bound = 4.0 / std::sqrt(static_cast<double>(incs.size()));
    for (std::size_t lag : {1u, 2u, 5u})
        CHECK(std::abs(autocorrelation(incs, lag)) < bound);
}

TEST_CASE("law of W(T) does not depend on the grid") {
    const TimeGrid one_step = TimeGrid::from_points({0.0, 1.0});
    const TimeGrid fine = TimeGrid::uniform(0.0, 1.0, 1001);
    const int n = 10000;
    std::vector<double> coarse_w(n), fine_w(n);
    for (int j = 0; j < n; ++j) {
        NoiseStream sc = derive_stream(21, "grid-A", j);
        NoiseStream sf = derive_stream(21, "grid-B", j);
        coarse_w[j] = sample_wiener_path(one_step, sc).values.back();
        fine_w[j] = sample_wiener_path(fine, sf).values.back();
    }
    CHECK(ks_two_sample_pvalue(coarse_w, fine_w) > 0.01);
}

TEST_CASE("bridge refinement pins original points exactly") {
    const TimeGrid coarse = TimeGrid::from_points({0.0, 0.5, 2.0, 7.0});
    std::vector<double> finer_pts;
    for (std::size_t k = 0; k + 1 < coarse.size(); ++k) {
        const double a = coarse.points[k], b = coarse.points[k + 1];
        finer_pts.push_back(a);
        for (double q : {0.25, 0.5, 0.75}) finer_pts.push_back(a + (b - a) * q);
    }
    finer_pts.push_back(coarse.back());
    const TimeGrid fine = TimeGrid::from_points(finer_pts);

    NoiseStream s = derive_stream(3, "traj", 0);
    const WienerPath p = sample_wiener_path(coarse, s);
    NoiseStream b = derive_stream(3, "bridge", 0);
    const WienerPath r = refine_path(p, fine, b);
    CHECK(r.values[0] == p.values[0]);
    CHECK(r.values[4] == p.values[1]);  // t = 0.5
    CHECK(r.values[8] == p.values[2]);  // t = 2.0
    CHECK(r.values[12] == p.values[3]); // t = 7.0

    // Deterministic given streams.
    NoiseStream b2 = derive_stream(3, "bridge", 0);
    const WienerPath r2 = refine_path(p, fine, b2);
    CHECK(r.values == r2.values);

    // A finer grid missing an original point is rejected.
    const TimeGrid bad = TimeGrid::uniform(0.0, 7.0, 8);
    NoiseStream b3 = derive_stream(3, "bridge", 1);
    CHECK_THROWS_AS(refine_path(p, bad, b3), ValidationError);
}

TEST_CASE("bridge midpoint law: mean w/2, variance 1/4") {
    const TimeGrid coarse = TimeGrid::from_points({0.0, 1.0});
    const TimeGrid with_mid = TimeGrid::from_points({0.0, 0.5, 1.0});
    const double w_end = 1.7;
    WienerPath base;
    base.grid = coarse;
    base.values = {0.0, w_end};
    base.stream_id = "fixed";
    const int n = 100000;
    MeanVar mid;
    for (int j = 0; j < n; ++j) {
        NoiseStream b = derive_stream(9, "bridge-mid", j);
        mid.add(refine_path(base, with_mid, b).values[1]);
    }
    CHECK(mid.mean == Catch::Approx(w_end / 2.0).margin(4.0 * 0.5 / std::sqrt(double(n))));
    CHECK(mid.variance() == Catch::Approx(0.25).epsilon(0.05));
}

TEST_CASE("refine then restrict to the original grid is the identity") {
    const TimeGrid coarse = TimeGrid::logspace(0.5, 50.0, 9);
    NoiseStream s = derive_stream(13, "traj", 4);
    const WienerPath p = sample_wiener_path(coarse, s);
    std::vector<double> pts = coarse.points;
    for (int k = 1; k < 9; ++k) {
        const double mid = 0.5 * (coarse.points[k - 1] + coarse.points[k]);
        pts.push_back(mid);
    }
    std::sort(pts.begin(), pts.end());
    NoiseStream b = derive_stream(13, "bridge", 4);
    const WienerPath r = refine_path(p, TimeGrid::from_points(pts), b);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        const auto it = std::find(r.grid.points.begin(), r.grid.points.end(), coarse.points[k]);
        REQUIRE(it != r.grid.points.end());
        CHECK(r.values[static_cast<std::size_t>(it - r.grid.points.begin())] == p.values[k]);
    }
}
