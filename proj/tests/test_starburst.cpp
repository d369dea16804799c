// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "frl/errors.hpp"
#include "frl/sampler.hpp"
#include "frl/starburst.hpp"

using namespace frl;

namespace {

PathEnsemble make_star(double H, const std::vector<double>& lengths, int N,
                       std::size_t n, std::uint64_t seed) {
    const KernelSpec spec(Geometry::star(lengths), H, 2);
    const Grid grid = Grid::star_uniform(lengths, N);
    return sample_star(spec, grid, n, SeedSpec{seed});
}

}  // namespace

TEST_CASE("cross intersection time is symmetric in the branch order") {
    const PathEnsemble e = make_star(0.5, {1.0, 0.5}, 16, 50, 41);
    const LocalTimeEstimate a = cross_local_time(e, 1, 2, 0.02);
    const LocalTimeEstimate b = cross_local_time(e, 2, 1, 0.02);
    REQUIRE(a.per_path.size() == b.per_path.size());
    for (std::size_t s = 0; s < a.per_path.size(); ++s)
        CHECK(a.per_path[s] == b.per_path[s]);
}

TEST_CASE("cross mean matches the exact lattice law") {
    for (double H : {0.5, 0.4}) {
        const PathEnsemble e = make_star(H, {1.0, 1.0}, 24, 3000, 57);
        const LocalTimeEstimate est = cross_local_time(e, 1, 2, 0.02);
        const double expect =
            expected_cross_discrete(e.spec(), e.grid(), 1, 2, 0.02);
        CHECK(std::abs(est.mean - expect) <= 3.0 * est.std_error);
        CHECK(!est.centered);
    }
}

TEST_CASE("continuum cross law at independent branches") {
    const KernelSpec spec(Geometry::star({1.0, 1.0}), 0.5, 2);
    CHECK(expected_cross_analytic(spec, 1, 2, 0.01) ==
          doctest::Approx(0.2128060).epsilon(2e-6));
}

TEST_CASE("per-branch self time centers to mean zero") {
    const PathEnsemble e = make_star(0.45, {1.0, 0.5}, 32, 3000, 63);
    for (int k : {1, 2}) {
        const LocalTimeEstimate est = branch_self_local_time_centered(e, k, 0.02);
        CHECK(est.centered);
        CHECK(std::abs(est.mean) <= 3.0 * est.std_error);
        // the subtracted expectation itself must be positive
        CHECK(expected_branch_self_discrete(e.spec(), e.grid(), k, 0.02) > 0.0);
    }
}

TEST_CASE("combined functional composes self and cross terms") {
    const PathEnsemble e = make_star(0.5, {1.0, 0.5, 2.0}, 12, 40, 71);
    CouplingWeights w;
    w.g_self = {1.0, 0.5, 2.0};
    w.g_cross = {{0.0, 0.3, 0.7}, {0.3, 0.0, 1.1}, {0.7, 1.1, 0.0}};
    const LocalTimeEstimate combined = combined_local_time(e, w, 0.02);
    CHECK(combined.centered);

    std::vector<LocalTimeEstimate> selfs;
    for (int k = 1; k <= 3; ++k)
        selfs.push_back(branch_self_local_time_centered(e, k, 0.02));
    std::vector<std::vector<double>> crosses;
    std::vector<double> gs;
    for (int k = 2; k <= 3; ++k)
        for (int l = 1; l < k; ++l) {
            crosses.push_back(cross_local_time(e, k, l, 0.02).per_path);
            gs.push_back(w.g_cross[static_cast<std::size_t>(k - 1)]
                                  [static_cast<std::size_t>(l - 1)]);
        }
    for (std::size_t s = 0; s < e.n_samples(); ++s) {
        double manual = 0.0;
        for (int k = 0; k < 3; ++k)
            manual += w.g_self[static_cast<std::size_t>(k)] *
                      selfs[static_cast<std::size_t>(k)].per_path[s];
        for (std::size_t c = 0; c < crosses.size(); ++c)
            manual += gs[c] * crosses[c][s];
        CHECK(combined.per_path[s] ==
              doctest::Approx(manual).epsilon(1e-12));
    }
}

TEST_CASE("combined functional is linear in the couplings") {
    const PathEnsemble e = make_star(0.5, {1.0, 1.0}, 16, 30, 83);
    CouplingWeights w;
    w.g_self = {1.0, 0.5};
    w.g_cross = {{0.0, 0.25}, {0.25, 0.0}};
    CouplingWeights w2;
    w2.g_self = {2.0, 1.0};
    w2.g_cross = {{0.0, 0.5}, {0.5, 0.0}};
    const LocalTimeEstimate a = combined_local_time(e, w, 0.02);
    const LocalTimeEstimate b = combined_local_time(e, w2, 0.02);
    for (std::size_t s = 0; s < e.n_samples(); ++s)
        CHECK(b.per_path[s] == doctest::Approx(2.0 * a.per_path[s]).epsilon(1e-14));
}

TEST_CASE("starburst estimators validate their inputs") {
    const KernelSpec circ(Geometry::circle(1.0), 0.25, 2);
    const Grid cgrid = Grid::circle_uniform(1.0, 16);
    const PathEnsemble loop = sample_loop_circulant(circ, cgrid, 3, SeedSpec{1});
    CHECK_THROWS_AS(cross_local_time(loop, 1, 2, 0.02), ValidationError);

    const PathEnsemble e = make_star(0.5, {1.0, 0.5}, 8, 3, 5);
    CHECK_THROWS_AS(cross_local_time(e, 1, 1, 0.02), ValidationError);
    CHECK_THROWS_AS(cross_local_time(e, 0, 2, 0.02), ValidationError);
    CHECK_THROWS_AS(cross_local_time(e, 1, 3, 0.02), ValidationError);
    CHECK_THROWS_AS(cross_local_time(e, 1, 2, 0.0), ValidationError);

    CouplingWeights bad_count;
    bad_count.g_self = {1.0};
    bad_count.g_cross = {{0.0, 1.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(combined_local_time(e, bad_count, 0.02), ValidationError);

    CouplingWeights asym;
    asym.g_self = {1.0, 1.0};
    asym.g_cross = {{0.0, 1.0}, {0.5, 0.0}};
    CHECK_THROWS_AS(combined_local_time(e, asym, 0.02), ValidationError);

    CouplingWeights neg;
    neg.g_self = {1.0, -1.0};
    neg.g_cross = {{0.0, 1.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(combined_local_time(e, neg, 0.02), ValidationError);
}
