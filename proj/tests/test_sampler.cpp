// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "frl/errors.hpp"
#include "frl/sampler.hpp"

using namespace frl;

namespace {

// sample variance of one scalar per path
double path_variance(const PathEnsemble& e, std::size_t point, int coord) {
    const std::size_t n = e.n_samples();
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = e.value(i, point, coord);
        s += x;
        s2 += x * x;
    }
    const double m = s / static_cast<double>(n);
    return s2 / static_cast<double>(n) - m * m;
}

bool bit_identical(const PathEnsemble& a, const PathEnsemble& b) {
    if (a.n_samples() != b.n_samples() || a.n_points() != b.n_points() ||
        a.dim() != b.dim())
        return false;
    const std::size_t len = a.n_points() * static_cast<std::size_t>(a.dim());
    for (std::size_t s = 0; s < a.n_samples(); ++s)
        if (std::memcmp(a.path(s), b.path(s), len * sizeof(double)) != 0)
            return false;
    return true;
}

}  // namespace

TEST_CASE("origin is pinned exactly in every sampler") {
    const SeedSpec seed{11};
    {
        const KernelSpec spec(Geometry::circle(1.0), 0.25, 3);
        const Grid grid = Grid::circle_uniform(1.0, 16);
        const PathEnsemble c = sample_loop_circulant(spec, grid, 5, seed);
        const PathEnsemble d = sample_dense(spec, grid, 5, seed);
        for (std::size_t s = 0; s < 5; ++s)
            for (int a = 0; a < 3; ++a) {
                CHECK(c.value(s, 0, a) == 0.0);
                CHECK(d.value(s, 0, a) == 0.0);
            }
    }
    {
        const KernelSpec spec(Geometry::star({1.0, 0.5}), 0.4, 2);
        const Grid grid = Grid::star_uniform({1.0, 0.5}, 8);
        const PathEnsemble st = sample_star(spec, grid, 5, seed);
        for (std::size_t s = 0; s < 5; ++s)
            for (int a = 0; a < 2; ++a) CHECK(st.value(s, 0, a) == 0.0);
    }
}

TEST_CASE("circulant increment spectrum: closure mode zero, no negatives") {
    const KernelSpec spec(Geometry::circle(1.0), 0.5, 1);
    const std::vector<double> lam = circulant_increment_spectrum(spec, 64);
    REQUIRE(lam.size() == 64);
    CHECK(lam[0] == 0.0);
    const double mx = *std::max_element(lam.begin(), lam.end());
    for (double l : lam) CHECK(l >= -1e-8 * mx);
}

TEST_CASE("samplers reject the non-positive-definite range") {
    const KernelSpec spec(Geometry::circle(1.0), 0.7, 2);
    const Grid grid = Grid::circle_uniform(1.0, 16);
    CHECK_THROWS_AS(sample_loop_circulant(spec, grid, 2, SeedSpec{1}),
                    ValidationError);
    CHECK_THROWS_AS(sample_dense(spec, grid, 2, SeedSpec{1}), ValidationError);
    const KernelSpec sstar(Geometry::star({1.0, 1.0}), 0.7, 2);
    const Grid gstar = Grid::star_uniform({1.0, 1.0}, 8);
    CHECK_THROWS_AS(sample_star(sstar, gstar, 2, SeedSpec{1}), ValidationError);
}

TEST_CASE("two-point loop reproduces the antipodal variance") {
    // single free point at T/2, variance (T/2)^{2H} = 0.5^{0.5}
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 1);
    const Grid grid = Grid::circle_uniform(1.0, 2);
    const std::size_t n = 20000;
    const PathEnsemble e = sample_loop_circulant(spec, grid, n, SeedSpec{21});
    const double v = path_variance(e, 1, 0);
    const double expect = std::pow(0.5, 0.5);
    const double se = expect * std::sqrt(2.0 / static_cast<double>(n));
    CHECK(std::abs(v - expect) <= 3.0 * se);
}

TEST_CASE("circulant increments match the kernel at sampled pairs") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const int N = 32;
    const Grid grid = Grid::circle_uniform(1.0, N);
    const std::size_t n = 8000;
    const PathEnsemble e = sample_loop_circulant(spec, grid, n, SeedSpec{5});
    const int pairs[3][2] = {{0, 7}, {3, 19}, {10, 26}};
    for (const auto& pr : pairs) {
        const double dist = geodesic_circle(grid.points[static_cast<std::size_t>(pr[0])].t,
                                            grid.points[static_cast<std::size_t>(pr[1])].t, 1.0);
        const double expect = spec.increment_variance(dist);
        // pool the coordinates: d * n iid squared increments
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (int a = 0; a < 2; ++a) {
                const double u = e.value(i, static_cast<std::size_t>(pr[0]), a) -
                                 e.value(i, static_cast<std::size_t>(pr[1]), a);
                s += u * u;
                s2 += u * u * u * u;
            }
        const double m = s / static_cast<double>(2 * n);
        const double var_of_sq = s2 / static_cast<double>(2 * n) - m * m;
        const double se = std::sqrt(var_of_sq / static_cast<double>(2 * n));
        CHECK(std::abs(m - expect) <= 3.0 * se);
    }
}

TEST_CASE("dense sampler agrees with the kernel on a loop") {
    const KernelSpec spec(Geometry::circle(1.0), 0.3, 2);
    const Grid grid = Grid::circle_uniform(1.0, 16);
    const std::size_t n = 6000;
    const PathEnsemble e = sample_dense(spec, grid, n, SeedSpec{9});
    for (std::size_t s = 0; s < n; ++s)
        for (int a = 0; a < 2; ++a) CHECK(e.value(s, 0, a) == 0.0);
    const double dist = geodesic_circle(grid.points[2].t, grid.points[9].t, 1.0);
    const double expect = spec.increment_variance(dist);
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 2; ++a) {
            const double u = e.value(i, 2, a) - e.value(i, 9, a);
            acc += u * u;
            acc2 += u * u * u * u;
        }
    const double m = acc / static_cast<double>(2 * n);
    const double se = std::sqrt(
        (acc2 / static_cast<double>(2 * n) - m * m) / static_cast<double>(2 * n));
    CHECK(std::abs(m - expect) <= 3.0 * se);
}

TEST_CASE("star sampler: independent branches at H = 1/2, correct tip variance") {
    const KernelSpec spec(Geometry::star({1.0, 1.0}), 0.5, 2);
    const Grid grid = Grid::star_uniform({1.0, 1.0}, 16);
    const std::size_t n = 6000;
    const PathEnsemble e = sample_star(spec, grid, n, SeedSpec{3});
    const std::size_t nb = 2;
    const std::size_t p = grid.branch_begin(1, static_cast<int>(nb)) + 7;
    const std::size_t q = grid.branch_begin(2, static_cast<int>(nb)) + 11;

    // cross-branch product has mean 0 when the branches are independent
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 2; ++a) {
            const double u = e.value(i, p, a) * e.value(i, q, a);
            s += u;
            s2 += u * u;
        }
    const double m = s / static_cast<double>(2 * n);
    const double se = std::sqrt(
        (s2 / static_cast<double>(2 * n) - m * m) / static_cast<double>(2 * n));
    CHECK(std::abs(m) <= 3.0 * se);

    // |b(tip)|^2 has mean d * T^{2H}
    const std::size_t tip = grid.branch_begin(1, static_cast<int>(nb)) + 15;
    CHECK(grid.points[tip].t == doctest::Approx(1.0).epsilon(1e-14));
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (int a = 0; a < 2; ++a) r2 += e.value(i, tip, a) * e.value(i, tip, a);
        t1 += r2;
        t2 += r2 * r2;
    }
    const double mt = t1 / static_cast<double>(n);
    const double set = std::sqrt(
        (t2 / static_cast<double>(n) - mt * mt) / static_cast<double>(n));
    CHECK(std::abs(mt - 2.0) <= 3.0 * set);
}

TEST_CASE("chunked generation reproduces the one-shot ensemble bitwise") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const Grid grid = Grid::circle_uniform(1.0, 32);
    const SeedSpec seed{77};
    const PathEnsemble whole = sample_loop_circulant(spec, grid, 40, seed);
    SamplerOptions tail;
    tail.first_index = 20;
    const PathEnsemble head = sample_loop_circulant(spec, grid, 20, seed);
    const PathEnsemble rest = sample_loop_circulant(spec, grid, 20, seed, tail);
    const std::size_t len = whole.n_points() * 2;
    for (std::size_t s = 0; s < 20; ++s) {
        CHECK(std::memcmp(whole.path(s), head.path(s), len * sizeof(double)) == 0);
        CHECK(std::memcmp(whole.path(20 + s), rest.path(s), len * sizeof(double)) == 0);
    }
}

TEST_CASE("thread count does not change the draw") {
    const KernelSpec spec(Geometry::circle(1.0), 0.25, 2);
    const Grid grid = Grid::circle_uniform(1.0, 32);
    SamplerOptions three;
    three.threads = 3;
    CHECK(bit_identical(sample_loop_circulant(spec, grid, 17, SeedSpec{4}),
                        sample_loop_circulant(spec, grid, 17, SeedSpec{4}, three)));
    const KernelSpec sstar(Geometry::star({1.0, 0.5}), 0.4, 2);
    const Grid gstar = Grid::star_uniform({1.0, 0.5}, 8);
    CHECK(bit_identical(sample_star(sstar, gstar, 9, SeedSpec{4}),
                        sample_star(sstar, gstar, 9, SeedSpec{4}, three)));
}
