// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "doctest.h"
#include "frl/errors.hpp"
#include "frl/kernel.hpp"
#include "frl/local_time.hpp"
#include "frl/sampler.hpp"

using namespace frl;

namespace {

// independent pair enumeration: every unordered grid pair, geodesic cut
double brute_pair_sum(const double* path, const Grid& grid, int dim, double eps,
                      double delta, const Geometry& geom) {
    const std::size_t P = grid.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = i + 1; j < P; ++j) {
            if (geom.geodesic(grid.points[i], grid.points[j]) >
                delta * (1.0 + 1e-12))
                continue;
            std::vector<double> u(static_cast<std::size_t>(dim));
            for (int a = 0; a < dim; ++a)
                u[static_cast<std::size_t>(a)] =
                    path[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] -
                    path[j * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)];
            acc += grid.weights[i] * grid.weights[j] * heat_kernel(u, eps);
        }
    return acc;
}

// second moment of the gap sum from first principles: all ordered
// combinations of unordered in-gap pairs, Gaussian pair-pair expectation
double brute_second_moment(const KernelSpec& spec, int N, double e1, double e2,
                           double delta) {
    const double T = spec.geom.T;
    const double h = T / N;
    const int m_max = static_cast<int>(std::floor(delta * N / T + 1e-9));
    struct Pair {
        int i, j;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            const int m = std::min(j - i, N - (j - i));
            if (m <= m_max) pairs.push_back({i, j});
        }
    const int d = spec.dim;
    const double pref = std::pow(2.0 * std::numbers::pi, -static_cast<double>(d));
    double acc = 0.0;
    for (const Pair& p : pairs) {
        const double v1 = increment_variance(
            spec, ParamPoint{0, p.i * h}, ParamPoint{0, p.j * h});
        for (const Pair& q : pairs) {
            const double v2 = increment_variance(
                spec, ParamPoint{0, q.i * h}, ParamPoint{0, q.j * h});
            const double mu = increment_cross_covariance(spec, p.j * h, p.i * h,
                                                         q.j * h, q.i * h);
            const double det = (v1 + e1) * (v2 + e2) - mu * mu;
            acc += pref * std::pow(det, -0.5 * d);
        }
    }
    return acc * h * h * h * h;
}

}  // namespace

TEST_CASE("heat kernel values and validation") {
    const std::vector<double> origin{0.0, 0.0};
    CHECK(heat_kernel(origin, 1.0 / (2.0 * std::numbers::pi)) ==
          doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> unit{1.0, 0.0};
    CHECK(heat_kernel(unit, 0.5) ==
          doctest::Approx(std::exp(-1.0) / std::numbers::pi).epsilon(1e-14));
    const double raw[2] = {1.0, 0.0};
    CHECK(heat_kernel(raw, 2, 0.5) == heat_kernel(unit, 0.5));
    CHECK_THROWS_AS(heat_kernel(unit, 0.0), ValidationError);
    CHECK_THROWS_AS(heat_kernel(std::vector<double>{}, 0.1), ValidationError);
}

TEST_CASE("constant path saturates every pair") {
    const int N = 24, d = 2;
    const double eps = 0.05, T = 1.0, h = T / N;
    const Grid grid = Grid::circle_uniform(T, N);
    const std::vector<double> zeros(static_cast<std::size_t>(N * d), 0.0);
    const double expect = h * h * (N * (N - 1) / 2) /
                          (2.0 * std::numbers::pi * eps);
    CHECK(local_time_path(zeros.data(), grid, d, eps) ==
          doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("gap split partitions the full sum") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const Grid grid = Grid::circle_uniform(1.0, 32);
    const PathEnsemble e = sample_loop_circulant(spec, grid, 1, SeedSpec{13});
    const double full = local_time_path(e.path(0), grid, 2, 0.05);
    const GapSplit s =
        local_time_gap_split(e.path(0), grid, 2, 0.05, 0.2, spec.geom);
    CHECK(s.gamma + s.lambda == doctest::Approx(full).epsilon(1e-14));
    CHECK(s.lambda > 0.0);
    CHECK(s.gamma > 0.0);
    const GapSplit all =
        local_time_gap_split(e.path(0), grid, 2, 0.05, 0.5, spec.geom);
    CHECK(all.gamma == 0.0);
    CHECK(all.lambda == doctest::Approx(full).epsilon(1e-14));
}

TEST_CASE("offset enumeration equals the direct pair loop") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    for (int N : {17, 16}) {  // odd, and even with the antipodal half-orbit
        const Grid grid = Grid::circle_uniform(1.0, N);
        const PathEnsemble e = sample_loop_circulant(spec, grid, 1, SeedSpec{8});
        const double fast = local_time_path(e.path(0), grid, 2, 0.2);
        const double slow =
            brute_pair_sum(e.path(0), grid, 2, 0.2, 0.5, spec.geom);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
        const GapSplit s =
            local_time_gap_split(e.path(0), grid, 2, 0.2, 0.23, spec.geom);
        const double slow_gap =
            brute_pair_sum(e.path(0), grid, 2, 0.2, 0.23, spec.geom);
        CHECK(s.lambda == doctest::Approx(slow_gap).epsilon(1e-12));
    }
}

TEST_CASE("exact lattice mean of the gap estimator") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const double eps = 0.01, delta = 0.25;
    CHECK(expected_L_eps_discrete(spec, Grid::circle_uniform(1.0, 128), eps, delta) ==
          doctest::Approx(1.337695e-1).epsilon(2e-6));
    CHECK(expected_L_eps_discrete(spec, Grid::circle_uniform(1.0, 256), eps, delta) ==
          doctest::Approx(1.382424e-1).epsilon(2e-6));
}

TEST_CASE("exact lattice second moment of the gap estimator") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const double eps = 0.01, delta = 0.25;
    CHECK(second_moment_gap_discrete(spec, 128, eps, eps, delta) ==
          doctest::Approx(1.854338e-2).epsilon(2e-6));
    CHECK(second_moment_gap_discrete(spec, 256, eps, eps, delta) ==
          doctest::Approx(1.968188e-2).epsilon(2e-6));
}

TEST_CASE("translation-reduced second moment equals the direct pair-pair sum") {
    {
        const KernelSpec spec(Geometry::circle(1.0), 0.3, 2);
        const double fast = second_moment_gap_discrete(spec, 16, 0.02, 0.01, 0.3);
        const double slow = brute_second_moment(spec, 16, 0.02, 0.01, 0.3);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
    {
        const KernelSpec spec(Geometry::circle(1.0), 0.3, 3);
        const double fast = second_moment_gap_discrete(spec, 8, 0.02, 0.01, 0.3);
        const double slow = brute_second_moment(spec, 8, 0.02, 0.01, 0.3);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
}

TEST_CASE("ensemble mean matches its exact lattice expectation") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const Grid grid = Grid::circle_uniform(1.0, 64);
    const std::size_t n = 4000;
    const PathEnsemble e = sample_loop_circulant(spec, grid, n, SeedSpec{19});
    const LocalTimeEstimate est = local_time_ensemble(e, 0.01);
    const double expect = expected_L_eps_discrete(spec, grid, 0.01, std::nullopt);
    CHECK(std::abs(est.mean - expect) <= 3.0 * est.std_error);
    CHECK(!est.centered);
    CHECK(!est.gap.has_value());
    CHECK(est.per_path.size() == n);
}

TEST_CASE("epsilon ladder pass reproduces single-epsilon runs") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const Grid grid = Grid::circle_uniform(1.0, 48);
    const PathEnsemble e = sample_loop_circulant(spec, grid, 50, SeedSpec{23});
    const std::vector<double> ladder{1e-3, 1e-2};  // ascending on purpose
    const auto multi = local_time_ensemble_multi(e, ladder, std::nullopt);
    REQUIRE(multi.size() == 2);
    CHECK(multi[0].epsilon == 1e-3);
    CHECK(multi[1].epsilon == 1e-2);
    for (std::size_t k = 0; k < 2; ++k) {
        const LocalTimeEstimate single = local_time_ensemble(e, ladder[k]);
        REQUIRE(multi[k].per_path.size() == single.per_path.size());
        for (std::size_t s = 0; s < single.per_path.size(); ++s)
            CHECK(multi[k].per_path[s] == single.per_path[s]);
    }
    const auto gap_multi = local_time_ensemble_multi(e, ladder, 0.2);
    const LocalTimeEstimate gap_single = gap_local_time_ensemble(e, 1e-3, 0.2);
    for (std::size_t s = 0; s < gap_single.per_path.size(); ++s)
        CHECK(gap_multi[0].per_path[s] == gap_single.per_path[s]);
}

TEST_CASE("gap parameter validation and the degenerate full window") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const Grid grid = Grid::circle_uniform(1.0, 32);
    const PathEnsemble e = sample_loop_circulant(spec, grid, 10, SeedSpec{2});
    CHECK_THROWS_AS(gap_local_time_ensemble(e, 0.01, 0.6), ValidationError);
    CHECK_THROWS_AS(gap_local_time_ensemble(e, 0.01, 0.0), ValidationError);
    const LocalTimeEstimate half = gap_local_time_ensemble(e, 0.01, 0.5);
    const LocalTimeEstimate full = local_time_ensemble(e, 0.01);
    CHECK(half.mean == doctest::Approx(full.mean).epsilon(1e-14));
}

TEST_CASE("centering subtracts the exact lattice mean") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const Grid grid = Grid::circle_uniform(1.0, 64);
    const PathEnsemble e = sample_loop_circulant(spec, grid, 4000, SeedSpec{31});
    const LocalTimeEstimate raw = local_time_ensemble(e, 0.01);
    const LocalTimeEstimate cen = center(raw, spec);
    CHECK(cen.centered);
    const double expect = expected_L_eps_discrete(spec, grid, 0.01, std::nullopt);
    CHECK(std::abs(cen.mean - (raw.mean - expect)) <= 1e-13);
    CHECK(std::abs(cen.mean) <= 3.0 * cen.std_error);
    CHECK_THROWS_AS(center(cen, spec), ValidationError);
}
