// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "frl/local_time.hpp"
#include "frl/sampler.hpp"

namespace frl {

// Per-branch and cross-branch coupling strengths. g_cross is indexed
// [k-1][l-1] for 1-based branches; only the strict lower/upper triangle
// matters and it must be symmetric.
struct CouplingWeights {
    std::vector<double> g_self;
    std::vector<std::vector<double>> g_cross;

    void validate(int n_branches) const;
};

// Riemann double sum of the mollified cross-branch pair density over the
// full rectangle (every grid pair with one point on each branch).
// Symmetric in (k, l) exactly; k = l is a domain error.
LocalTimeEstimate cross_local_time(const PathEnsemble& paths, int k, int l,
                                   double eps, int threads = 1);

// Ordered-pair sum on one branch minus the exact expectation of that
// discrete sum, so the centered ensemble mean is 0 in expectation at any
// grid size.
LocalTimeEstimate branch_self_local_time_centered(const PathEnsemble& paths,
                                                  int k, double eps,
                                                  int threads = 1);

// sum_k g_k L_{k,c} + sum_{l<k} g_kl L_kl, per path.
LocalTimeEstimate combined_local_time(const PathEnsemble& paths,
                                      const CouplingWeights& weights, double eps,
                                      int threads = 1);

// Exact expectation of the discrete one-branch pair sum (lattice sum).
double expected_branch_self_discrete(const KernelSpec& spec, const Grid& grid,
                                     int k, double eps);

// Exact expectation of the discrete cross rectangle sum: the lattice sum of
// (2pi(v_ij+eps))^{-d/2} with v_ij the increment variance at separation
// s_i + t_j through the origin.
double expected_cross_discrete(const KernelSpec& spec, const Grid& grid, int k,
                               int l, double eps);

// Continuum expectation of the cross sum: rectangle quadrature of
// (2pi)^{-d/2} ((s+t)^{2H}+eps)^{-d/2}. At H = 1/2 the branches are
// independent and this is the product-law composition of their marginals.
double expected_cross_analytic(const KernelSpec& spec, int k, int l, double eps);

}  // namespace frl
