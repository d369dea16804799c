// SPDX-License-Identifier: Apache-2.0
#include "frl/starburst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "frl/quadrature.hpp"
#include "frl/stats.hpp"

namespace frl {

namespace {

constexpr double kSkipFactor = 60.0;  // matches the loop pair sums

void check_star(const PathEnsemble& paths) {
    if (paths.spec().geom.type != GeometryType::Star ||
        paths.grid().kind != GridKind::Star)
        throw ValidationError("operation needs a starburst ensemble");
}

int check_branch(const PathEnsemble& paths, int k) {
    const int nb = paths.spec().geom.n_branches();
    if (k < 1 || k > nb) throw ValidationError("unknown branch index " + std::to_string(k));
    return nb;
}

inline double sq_dist2(const double* a, const double* b, int d) {
    if (d == 2) {
        const double u = a[0] - b[0];
        const double v = a[1] - b[1];
        return u * u + v * v;
    }
    double r2 = 0.0;
    for (int c = 0; c < d; ++c) {
        const double t = a[c] - b[c];
        r2 += t * t;
    }
    return r2;
}

// per-path driver over samples, sequential aggregation afterwards
template <class PerPath>
std::vector<double> run_per_path(const PathEnsemble& paths, int threads,
                                 PerPath f) {
    const std::size_t n = paths.n_samples();
    std::vector<double> vals(n);
    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) vals[s] = f(paths.path(s));
    };
    const std::size_t t =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n ? n : 1);
    if (t <= 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t base = n / t, rem = n % t;
        std::size_t lo = 0;
        for (std::size_t i = 0; i < t; ++i) {
            const std::size_t len = base + (i < rem ? 1 : 0);
            pool.emplace_back(worker, lo, lo + len);
            lo += len;
        }
        for (auto& th : pool) th.join();
    }
    return vals;
}

LocalTimeEstimate make_estimate(const PathEnsemble& paths, std::vector<double> vals,
                                double eps, bool centered) {
    LocalTimeEstimate est;
    est.per_path = std::move(vals);
    est.epsilon = eps;
    est.centered = centered;
    est.gap = std::nullopt;
    est.grid = paths.grid();
    est.refresh_moments();
    return est;
}

double cross_pair_sum(const double* p, const Grid& grid, int d, int k, int l,
                      int nb, double eps) {
    const int N = grid.n_per_branch;
    const std::size_t bk = grid.branch_begin(k, nb);
    const std::size_t bl = grid.branch_begin(l, nb);
    const double wk = grid.weights[bk];
    const double wl = grid.weights[bl];
    const double thr = kSkipFactor * eps;
    const double inv2e = 0.5 / eps;
    const auto stride = static_cast<std::size_t>(d);
    KahanSum acc;
    for (int i = 0; i < N; ++i) {
        const double* a = p + (bk + static_cast<std::size_t>(i)) * stride;
        for (int j = 0; j < N; ++j) {
            const double r2 =
                sq_dist2(a, p + (bl + static_cast<std::size_t>(j)) * stride, d);
            if (r2 > thr) continue;
            acc.add(std::exp(-r2 * inv2e));
        }
    }
    return acc.value() * wk * wl *
           std::pow(2.0 * std::numbers::pi * eps, -0.5 * d);
}

double branch_pair_sum(const double* p, const Grid& grid, int d, int k, int nb,
                       double eps) {
    const int N = grid.n_per_branch;
    const std::size_t bk = grid.branch_begin(k, nb);
    const double w = grid.weights[bk];
    const double thr = kSkipFactor * eps;
    const double inv2e = 0.5 / eps;
    const auto stride = static_cast<std::size_t>(d);
    KahanSum acc;
    for (int i = 0; i + 1 < N; ++i) {
        const double* a = p + (bk + static_cast<std::size_t>(i)) * stride;
        for (int j = i + 1; j < N; ++j) {
            const double r2 =
                sq_dist2(a, p + (bk + static_cast<std::size_t>(j)) * stride, d);
            if (r2 > thr) continue;
            acc.add(std::exp(-r2 * inv2e));
        }
    }
    return acc.value() * w * w * std::pow(2.0 * std::numbers::pi * eps, -0.5 * d);
}

}  // namespace

void CouplingWeights::validate(int n_branches) const {
    const auto nb = static_cast<std::size_t>(n_branches);
    if (g_self.size() != nb)
        throw ValidationError("per-branch weight count does not match branch count");
    if (g_cross.size() != nb)
        throw ValidationError("cross weight matrix does not match branch count");
    for (const auto& row : g_cross)
        if (row.size() != nb)
            throw ValidationError("cross weight matrix does not match branch count");
    for (double g : g_self)
        if (!(g >= 0.0)) throw ValidationError("weights must be >= 0");
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
            if (!(g_cross[a][b] >= 0.0)) throw ValidationError("weights must be >= 0");
            if (g_cross[a][b] != g_cross[b][a])
                throw ValidationError("cross weights must be symmetric");
        }
}

LocalTimeEstimate cross_local_time(const PathEnsemble& paths, int k, int l,
                                   double eps, int threads) {
    check_star(paths);
    const int nb = check_branch(paths, k);
    check_branch(paths, l);
    if (k == l)
        throw ValidationError(
            "cross local time needs two distinct branches (use the per-branch "
            "self local time for k = l)");
    if (!(eps > 0.0)) throw ValidationError("mollifier width must be positive");
    const int lo = std::min(k, l), hi = std::max(k, l);  // canonical order, exact symmetry
    const Grid& grid = paths.grid();
    const int d = paths.dim();
    auto vals = run_per_path(paths, threads, [&](const double* p) {
        return cross_pair_sum(p, grid, d, lo, hi, nb, eps);
    });
    return make_estimate(paths, std::move(vals), eps, false);
}

double expected_branch_self_discrete(const KernelSpec& spec, const Grid& grid,
                                     int k, double eps) {
    if (grid.kind != GridKind::Star)
        throw ValidationError("branch expectation needs a star grid");
    const int nb = spec.geom.n_branches();
    const int N = grid.n_per_branch;
    const std::size_t bk = grid.branch_begin(k, nb);
    const double h = grid.weights[bk];
    const double pref = std::pow(2.0 * std::numbers::pi, -0.5 * spec.dim);
    KahanSum s;
    for (int m = 1; m < N; ++m) {
        const double v = spec.increment_variance(m * h);
        s.add(static_cast<double>(N - m) * std::pow(v + eps, -0.5 * spec.dim));
    }
    return pref * h * h * s.value();
}

LocalTimeEstimate branch_self_local_time_centered(const PathEnsemble& paths,
                                                  int k, double eps, int threads) {
    check_star(paths);
    const int nb = check_branch(paths, k);
    if (!(eps > 0.0)) throw ValidationError("mollifier width must be positive");
    const Grid& grid = paths.grid();
    const int d = paths.dim();
    const double expectation =
        expected_branch_self_discrete(paths.spec(), grid, k, eps);
    auto vals = run_per_path(paths, threads, [&](const double* p) {
        return branch_pair_sum(p, grid, d, k, nb, eps) - expectation;
    });
    return make_estimate(paths, std::move(vals), eps, true);
}

LocalTimeEstimate combined_local_time(const PathEnsemble& paths,
                                      const CouplingWeights& weights, double eps,
                                      int threads) {
    check_star(paths);
    if (!(eps > 0.0)) throw ValidationError("mollifier width must be positive");
    const int nb = paths.spec().geom.n_branches();
    weights.validate(nb);
    const Grid& grid = paths.grid();
    const int d = paths.dim();
    std::vector<double> self_expect(static_cast<std::size_t>(nb), 0.0);
    for (int k = 1; k <= nb; ++k)
        self_expect[static_cast<std::size_t>(k - 1)] =
            expected_branch_self_discrete(paths.spec(), grid, k, eps);
    auto vals = run_per_path(paths, threads, [&](const double* p) {
        KahanSum acc;
        for (int k = 1; k <= nb; ++k) {
            const double g = weights.g_self[static_cast<std::size_t>(k - 1)];
            if (g == 0.0) continue;
            acc.add(g * (branch_pair_sum(p, grid, d, k, nb, eps) -
                         self_expect[static_cast<std::size_t>(k - 1)]));
        }
        for (int k = 2; k <= nb; ++k)
            for (int l = 1; l < k; ++l) {
                const double g =
                    weights.g_cross[static_cast<std::size_t>(k - 1)]
                                   [static_cast<std::size_t>(l - 1)];
                if (g == 0.0) continue;
                acc.add(g * cross_pair_sum(p, grid, d, l, k, nb, eps));
            }
        return acc.value();
    });
    return make_estimate(paths, std::move(vals), eps, true);
}

double expected_cross_discrete(const KernelSpec& spec, const Grid& grid, int k,
                               int l, double eps) {
    if (grid.kind != GridKind::Star)
        throw ValidationError("cross expectation needs a star grid");
    if (k == l) throw ValidationError("cross expectation needs two distinct branches");
    const int nb = spec.geom.n_branches();
    const int N = grid.n_per_branch;
    const std::size_t bk = grid.branch_begin(k, nb);
    const std::size_t bl = grid.branch_begin(l, nb);
    const double hk = grid.weights[bk];
    const double hl = grid.weights[bl];
    const double pref = std::pow(2.0 * std::numbers::pi, -0.5 * spec.dim);
    KahanSum s;
    for (int i = 1; i <= N; ++i)
        for (int j = 1; j <= N; ++j) {
            const double v = spec.increment_variance(i * hk + j * hl);
            s.add(std::pow(v + eps, -0.5 * spec.dim));
        }
    return pref * hk * hl * s.value();
}

double expected_cross_analytic(const KernelSpec& spec, int k, int l, double eps) {
    if (spec.geom.type != GeometryType::Star)
        throw ValidationError("cross expectation needs a star kernel");
    if (k == l) throw ValidationError("cross expectation needs two distinct branches");
    const double Tk = spec.geom.branch_length(k);
    const double Tl = spec.geom.branch_length(l);
    return star_cross_mean(spec.hurst, spec.dim, Tk, Tl, eps);
}

}  // namespace frl
