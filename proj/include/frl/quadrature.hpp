// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "frl/errors.hpp"

namespace frl {

// Panel-composite Gauss-Legendre integration. `left_refined` variants place
// geometrically shrinking panels toward the left endpoint to resolve
// integrable singularities and eps-scale boundary layers.
double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        int panels = 8);
double integrate_left_refined(const std::function<double(double)>& f, double b,
                              int panels = 60, double head_frac = 1e-10);

// Continuum mean of the regularized self-intersection time restricted to
// geodesic separations below `delta` on a circle of circumference T:
//   T (2 pi)^{-d/2} Int_0^delta (tau^{2H} + eps)^{-d/2} dtau.
// delta = T/2 gives the full mean. eps = 0 is the closed form, valid for
// H d < 1 only.
double mean_local_time_circle(double H, int d, double T, double eps, double delta);

// Same for a single fBm branch on [0, Tk] (line geodesic |s-t|):
//   (2 pi)^{-d/2} Int_0^Tk (Tk - tau) (tau^{2H} + eps)^{-d/2} dtau.
double mean_local_time_line(double H, int d, double Tk, double eps);

// Continuum mean of the cross-branch intersection time of two independent-
// or fractionally-coupled branches at distance s+t:
//   (2 pi)^{-d/2} Int rho(w) (w^{2H} + eps)^{-d/2} dw,  rho = overlap length.
// eps = 0 requires H d < 2.
double star_cross_mean(double H, int d, double Tk, double Tl, double eps);

// Ordered-pair second moment of the gap-restricted intersection time:
// E(Lam_{e1} Lam_{e2}) for Lam_e = the sum over ordered pairs (s<t) with
// geodesic separation < delta. Translation invariance on the circle reduces
// the 4-D integral over the gap region to three variables; the pair-swap
// symmetry halves the a-range. `force_zero_cross` zeroes the increment
// cross-covariance, which must factorize the result into the product of
// means (validation hook).
double second_moment_gap(double H, int d, double T, double delta, double e1,
                         double e2, bool force_zero_cross = false, int n_dist = 60,
                         int n_shift = 400);

struct QuadResult {
    double value = 0.0;
    double rel_error = 0.0;  // two-resolution estimate
};

// Convergence-checked wrapper around second_moment_gap (e1 = e2 = eps).
// Throws NumericError carrying the achieved estimate when above rel_tol.
QuadResult second_moment_quadrature(double H, int d, double T, double delta,
                                    double eps, double rel_tol = 2e-4);

}  // namespace frl
