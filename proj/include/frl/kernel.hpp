// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "frl/geometry.hpp"

namespace frl {

// Gaussian field on a circle or star with increment variance
// E((b(p)-b(q))^2) = geodesic(p,q)^{2H} per coordinate, pinned to b(origin)=0.
// Construction ops (samplers, estimators) require 0 < hurst <= 1/2; values in
// (1/2, 1) are accepted so diagnostics can demonstrate the loss of positive
// definiteness.
struct KernelSpec {
    Geometry geom;
    double hurst = 0.5;
    int dim = 1;

    KernelSpec(Geometry g, double h, int d);
    void require_sampling_range() const;  // throws unless 0 < hurst <= 1/2

    // distance^{2H}, the per-coordinate increment variance at a geodesic
    // separation
    double increment_variance(double geodesic_distance) const;
};

double increment_variance(const KernelSpec& spec, const ParamPoint& p, const ParamPoint& q);

// R(p,q) = (d^{2H}(p,0) + d^{2H}(q,0) - d^{2H}(p,q)) / 2, so that
// R(p,p) + R(q,q) - 2 R(p,q) reproduces the increment variance and the
// origin row vanishes.
double covariance(const KernelSpec& spec, const ParamPoint& p, const ParamPoint& q);

struct CovarianceMatrix {
    Eigen::MatrixXd m;
    KernelSpec spec;
    Grid grid;
};

CovarianceMatrix build_cov_matrix(const KernelSpec& spec, const Grid& grid);

struct PdReport {
    bool pd = false;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    std::optional<Eigen::VectorXd> witness;  // eigenvector of the most negative eigenvalue
};

// pd iff min_eigenvalue >= -tol * max_eigenvalue
PdReport check_positive_definite(const Eigen::MatrixXd& m, double tol = 1e-8);

// mu = E((b(s)-b(t))(b(s')-b(t'))) per coordinate
//    = (d^{2H}(s-t') + d^{2H}(s'-t) - d^{2H}(t-t') - d^{2H}(s-s')) / 2.
// Circle geometries only.
double increment_cross_covariance(const KernelSpec& spec, double s, double t,
                                  double s2, double t2);

// Largest k with Var(sum u_i dB_i) >= k sum u_i^2 Var(dB_i) over the
// increments dB_i between consecutive listed times: the minimum eigenvalue
// of D^{-1/2} C D^{-1/2} where C is the increment Gram matrix, D = diag(C).
double lnd_constant(const KernelSpec& spec, const std::vector<double>& times);

}  // namespace frl
