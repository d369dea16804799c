// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "frl/geometry.hpp"
#include "frl/kernel.hpp"
#include "frl/quadrature.hpp"
#include "frl/sampler.hpp"

namespace frl {

// (2*pi*eps)^{-d/2} exp(-|x|^2 / (2 eps))
double heat_kernel(const double* x, int d, double eps);
double heat_kernel(const std::vector<double>& x, double eps);

// Riemann sum of the mollified pair density over all ordered grid pairs
// i < j (diagonal excluded), with product quadrature weights.
double local_time_path(const double* path, const Grid& grid, int dim, double eps);

struct GapSplit {
    double gamma = 0.0;   // pairs with geodesic separation >  delta
    double lambda = 0.0;  // pairs with geodesic separation <= delta
};

// Partition of the full pair sum by geodesic separation. Boundary pairs
// (separation exactly delta) belong to lambda, so delta = T/2 degenerates to
// lambda = full sum, gamma = 0.
GapSplit local_time_gap_split(const double* path, const Grid& grid, int dim,
                              double eps, double delta, const Geometry& geom);

struct LocalTimeEstimate {
    std::vector<double> per_path;
    double epsilon = 0.0;
    bool centered = false;
    std::optional<double> gap;  // geodesic separation cutoff, none = full
    double mean = 0.0;
    double std_error = 0.0;
    Grid grid;

    void refresh_moments();  // recompute mean / std_error from per_path
};

// Ensemble drivers. Aggregation is sequential and compensated, so results do
// not depend on how the ensemble was generated or chunked.
LocalTimeEstimate local_time_ensemble(const PathEnsemble& paths, double eps);
LocalTimeEstimate gap_local_time_ensemble(const PathEnsemble& paths, double eps,
                                          double delta);

// One pass over pairs, a whole epsilon ladder per path (common random
// numbers across the ladder by construction). gap = none means full sum.
std::vector<LocalTimeEstimate> local_time_ensemble_multi(
    const PathEnsemble& paths, const std::vector<double>& eps_ladder,
    std::optional<double> gap, int threads = 1);

// Continuum expectation of the loop local time,
// (2pi)^{-d/2} * Integral_0^T (T-tau) (tau_g^{2H}+eps)^{-d/2} dtau reduced to
// T * (2pi)^{-d/2} * Integral_0^{T/2}; eps = 0 uses the closed form and is
// only defined for H*d < 1.
double expected_L_eps_analytic(const KernelSpec& spec, double eps);

// Continuum expectation of the gap-restricted sum (separation <= delta).
double expected_gap_L_eps_analytic(const KernelSpec& spec, double eps,
                                   double delta);

// Exact expectation of the discrete estimator on its own grid: the lattice
// sum of (2pi(v_ij+eps))^{-d/2} over the enumerated pairs. This is what
// centering subtracts, so centered ensembles have mean 0 in expectation at
// every grid size, not only in the continuum limit.
double expected_L_eps_discrete(const KernelSpec& spec, const Grid& grid,
                               double eps, std::optional<double> gap);

// Exact second moment E(Lambda_hat_{e1} Lambda_hat_{e2}) of the discrete
// gap estimator on a uniform N-point loop grid (translation-reduced sum).
double second_moment_gap_discrete(const KernelSpec& spec, int N, double e1,
                                  double e2, double delta);

// Subtracts the exact discrete expectation. Throws if already centered or if
// no expectation is available for the estimate's configuration.
LocalTimeEstimate center(const LocalTimeEstimate& est, const KernelSpec& spec);

// Continuum second moment of the gap-restricted sum by quadrature.
// Throws NumericError with the achieved error estimate on non-convergence.
double second_moment_analytic(const KernelSpec& spec, double eps, double delta);

}  // namespace frl
