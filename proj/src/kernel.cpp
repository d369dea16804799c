// SPDX-License-Identifier: Apache-2.0
#include "frl/kernel.hpp"

#include <cmath>

namespace frl {

KernelSpec::KernelSpec(Geometry g, double h, int d) : geom(std::move(g)), hurst(h), dim(d) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw ValidationError("hurst index must lie in (0, 1)");
    if (dim < 1) throw ValidationError("ambient dimension must be >= 1");
}

void KernelSpec::require_sampling_range() const {
    if (hurst > 0.5)
        throw ValidationError("hurst > 1/2: kernel is not positive definite on loops/stars");
}

double KernelSpec::increment_variance(double geodesic_distance) const {
    const double e = 2.0 * hurst;
    if (e == 1.0) return geodesic_distance;
    if (e == 0.5) return std::sqrt(geodesic_distance);
    return std::pow(geodesic_distance, e);
}

double increment_variance(const KernelSpec& spec, const ParamPoint& p, const ParamPoint& q) {
    return spec.increment_variance(spec.geom.geodesic(p, q));
}

double covariance(const KernelSpec& spec, const ParamPoint& p, const ParamPoint& q) {
    const ParamPoint origin{0, 0.0};
    const double dp = increment_variance(spec, p, origin);
    const double dq = increment_variance(spec, q, origin);
    const double dpq = increment_variance(spec, p, q);
    return 0.5 * (dp + dq - dpq);
}

CovarianceMatrix build_cov_matrix(const KernelSpec& spec, const Grid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = covariance(spec, grid.points[static_cast<std::size_t>(i)],
                                        grid.points[static_cast<std::size_t>(j)]);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return {std::move(m), spec, grid};
}

PdReport check_positive_definite(const Eigen::MatrixXd& m, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw NumericError("eigensolver failed on covariance matrix");
    PdReport r;
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.max_eigenvalue = es.eigenvalues().maxCoeff();
    const double floor = -tol * std::max(r.max_eigenvalue, 0.0);
    r.pd = r.min_eigenvalue >= floor;
    if (!r.pd) {
        Eigen::Index idx = 0;
        es.eigenvalues().minCoeff(&idx);
        r.witness = es.eigenvectors().col(idx);
    }
    return r;
}

double increment_cross_covariance(const KernelSpec& spec, double s, double t,
                                  double s2, double t2) {
    if (spec.geom.type != GeometryType::Circle)
        throw ValidationError("increment cross-covariance is defined on circle geometries");
    const double T = spec.geom.T;
    auto d2h = [&](double a, double b) {
        return std::pow(geodesic_circle(a, b, T), 2.0 * spec.hurst);
    };
    return 0.5 * (d2h(s, t2) + d2h(s2, t) - d2h(t, t2) - d2h(s, s2));
}

double lnd_constant(const KernelSpec& spec, const std::vector<double>& times) {
    const auto n = static_cast<Eigen::Index>(times.size());
    if (n < 2) throw ValidationError("need at least two times");
    for (Eigen::Index i = 1; i < n; ++i)
        if (!(times[static_cast<std::size_t>(i)] > times[static_cast<std::size_t>(i - 1)]))
            throw ValidationError("times must be strictly increasing");
    if (!(times[0] > 0.0)) throw ValidationError("times must be positive");

    const Eigen::Index m = n - 1;  // increments between consecutive times
    Eigen::MatrixXd C(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const auto si = static_cast<std::size_t>(i);
            const auto sj = static_cast<std::size_t>(j);
            const double v = increment_cross_covariance(spec, times[si], times[si + 1],
                                                        times[sj], times[sj + 1]);
            C(i, j) = v;
            C(j, i) = v;
        }
    Eigen::VectorXd dinv(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(C(i, i) > 0.0)) throw ValidationError("degenerate increment in time set");
        dinv(i) = 1.0 / std::sqrt(C(i, i));
    }
    const Eigen::MatrixXd S = dinv.asDiagonal() * C * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on increment Gram");
    return es.eigenvalues().minCoeff();
}

}  // namespace frl
