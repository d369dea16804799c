// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "frl/kernel.hpp"

namespace frl {

// One measured-vs-expected comparison. `comparison` gives the pass rule:
//   abs  |measured - expected| <= tolerance
//   rel  |measured - expected| <= tolerance * |expected|
//   ge   measured >= expected        le   measured <= expected
//   lt   measured <  expected        gt   measured >  expected
struct ExperimentCheck {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string comparison;
    std::string provenance;  // closed-form | quadrature | simulation | exact
    bool pass = false;
};

struct ExperimentReport {
    std::string name;
    nlohmann::json inputs;  // seed, grids, ladders: enough to re-run bit-identically
    std::vector<ExperimentCheck> checks;
    double runtime_seconds = 0.0;

    bool pass() const;
    nlohmann::json to_json() const;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    int threads = 1;
};

// Eigenvalue sign pattern of the loop covariance across the Hurst range:
// nonnegative spectrum up to H = 1/2, a genuinely negative eigenvalue above.
ExperimentReport verify_pd_boundary(double T, const std::vector<int>& N_list,
                                    const std::vector<double>& H_list);

// R(s,s) + R(t,t) - 2 R(s,t) equals the geodesic increment variance on
// random point pairs (pairs closer than 1e-6 are redrawn to keep the
// relative comparison away from cancellation).
ExperimentReport verify_kernel_identity(const KernelSpec& spec, int n_pairs,
                                        VerifyOptions opt = {});

// Circulant sampler against theory and against the dense factorization:
// increment variances at random pairs, structural loop closure, spectrum
// nonnegativity, and circulant-vs-dense agreement on second moments.
ExperimentReport verify_sampler_moments(double H, int d, double T, int grid_N,
                                        std::size_t n, VerifyOptions opt = {});

// Monte Carlo means of the regularized intersection time across an
// eps-ladder, checked against the exact lattice expectation per rung, then
// extrapolated: Aitken in eps per grid, Richardson across grids
// {N/4, N/2, N} (decimations of one common-random-number ensemble) with the
// known lattice exponent 1 - dH. The extrapolated value must land within 5%
// of the closed form. grid_N must be divisible by 4.
ExperimentReport verify_mean_local_time(double H, int d, double T, int grid_N,
                                        std::size_t n,
                                        const std::vector<double>& eps_ladder,
                                        VerifyOptions opt = {});

// At the boundary index H = 1/d the continuum mean grows like |ln eps|:
// linear fit quality, slope stability across ladder halves and under a
// one-rung shift, slope against the closed-form prefactor, and a below-
// boundary control whose fitted slope must be comparatively negligible.
// grid_N is echoed for provenance; the oracle here is quadrature.
ExperimentReport verify_log_divergence(int d, double T, int grid_N,
                                       const std::vector<double>& eps_ladder);

// Decay of m(eps) = E((Lam_{eps,c} - Lam_{eps/4,c})^2) under common random
// numbers: each rung against its exact lattice value, fitted log-log
// exponent >= 0.3 (one-sided: the bound is an upper bound), and pairwise
// monotone decrease within 3 sigma.
ExperimentReport verify_rate_half(double H, int d, double T, int grid_N,
                                  std::size_t n, double delta,
                                  const std::vector<double>& eps_ladder,
                                  VerifyOptions opt = {});

// Local nondeterminism constants: minimum conditional-variance ratio over
// each supplied strictly increasing time set; all must be positive, and a
// two-point set must give exactly 1.
ExperimentReport verify_lnd(const KernelSpec& spec,
                            const std::vector<std::vector<double>>& time_sets);

// At H = 1/2 the branches are independent: empirical cross-branch
// covariance at 10 random point pairs within 3 sigma of zero, and the
// cross intersection time against the product-law quadrature and against
// its exact lattice expectation. H must be 0.5.
ExperimentReport verify_star_independence(double H, int d,
                                          const std::vector<double>& lengths,
                                          std::size_t n, VerifyOptions opt = {});

// Second moment of the gap-restricted sum: MC mean of Lam_eps^2 against the
// exact lattice value per grid, and the grid-Aitken extrapolated mean
// against the continuum quadrature, on decimations {N/4, N/2, N} of one
// ensemble at N = 4096.
ExperimentReport verify_second_moment(double H, int d, double T, double eps,
                                      double delta, std::size_t n,
                                      VerifyOptions opt = {});

// Reweighting invariants on an uncentered ensemble at the given H (weight
// normalization, g = 0 identity, weight bounds, normalizer monotonicity,
// antipodal moment), plus a stability scan over g_grid on a centered
// ensemble at the boundary index H = 1/d.
ExperimentReport verify_edwards(double H, int d, double T, int grid_N,
                                std::size_t n, double eps,
                                const std::vector<double>& g_grid,
                                VerifyOptions opt = {});

// Same seed, different thread counts: sampled paths bit-identical,
// aggregated local-time and star estimates identical to 1e-12 relative.
ExperimentReport verify_reproducibility(VerifyOptions opt = {});

std::string summary_csv(const std::vector<ExperimentReport>& reports);
void write_report_json(const ExperimentReport& r, const std::string& path);
void write_summary_csv(const std::vector<ExperimentReport>& reports,
                       const std::string& path);

}  // namespace frl
