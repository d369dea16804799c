// SPDX-License-Identifier: Apache-2.0
#include "frl/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>
#include <vector>

#include "frl/stats.hpp"

namespace frl {

namespace {

// exp(-r2/(2 eps)) below exp(-30) is dropped; the truncation is orders of
// magnitude below every tolerance in use and identical across code paths
constexpr double kSkipFactor = 60.0;

inline double sq_dist(const double* a, const double* b, int d) {
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

inline double norm_const(int d, double eps) {
    return std::pow(2.0 * std::numbers::pi * eps, -0.5 * d);
}

// largest offset m with geodesic(m*h) <= delta; at most N/2
int circle_gap_max_offset(int N, double T, double delta) {
    const int m = static_cast<int>(std::floor(delta * N / T + 1e-9));
    return std::min(m, N / 2);
}

void check_gap(double delta, const Geometry& geom) {
    if (!(delta > 0.0 && delta <= 0.5 * geom.T))
        throw ValidationError("separation cutoff must lie in (0, T/2]");
}

// Ladder evaluation for one circle path: per-offset enumeration, each
// unordered pair visited exactly once (a dedicated half-range at the
// antipodal offset of even grids). out[k] = local time at eps_order[k].
void circle_path_ladder(const double* p, int N, int d, double h, int m_max,
                        const std::vector<double>& eps_desc, double* out) {
    const std::size_t K = eps_desc.size();
    std::vector<double> thr(K), inv2e(K);
    for (std::size_t k = 0; k < K; ++k) {
        thr[k] = kSkipFactor * eps_desc[k];
        inv2e[k] = 0.5 / eps_desc[k];
    }
    std::vector<KahanSum> acc(K);
    auto visit = [&](const double* a, const double* b) {
        const double r2 = sq_dist(a, b, d);
        for (std::size_t k = 0; k < K; ++k) {
            if (r2 > thr[k]) break;  // eps descending: all later ones skip too
            acc[k].add(std::exp(-r2 * inv2e[k]));
        }
    };
    const auto stride = static_cast<std::size_t>(d);
    for (int m = 1; m <= m_max; ++m) {
        const int top = (2 * m == N) ? N / 2 : N;
        const int nw = std::min(top, N - m);
        for (int i = 0; i < nw; ++i)
            visit(p + static_cast<std::size_t>(i) * stride,
                  p + static_cast<std::size_t>(i + m) * stride);
        for (int i = nw; i < top; ++i)
            visit(p + static_cast<std::size_t>(i) * stride,
                  p + static_cast<std::size_t>(i + m - N) * stride);
    }
    const double w2 = h * h;
    for (std::size_t k = 0; k < K; ++k)
        out[k] = acc[k].value() * w2 * norm_const(d, eps_desc[k]);
}

// Generic grids: every ordered pair i < j, optional geodesic cutoff.
void generic_path_ladder(const double* p, const Grid& grid, const Geometry& geom,
                         int d, std::optional<double> gap,
                         const std::vector<double>& eps_desc, double* out) {
    const std::size_t K = eps_desc.size();
    std::vector<double> thr(K), inv2e(K);
    for (std::size_t k = 0; k < K; ++k) {
        thr[k] = kSkipFactor * eps_desc[k];
        inv2e[k] = 0.5 / eps_desc[k];
    }
    std::vector<KahanSum> acc(K);
    const std::size_t P = grid.size();
    const auto stride = static_cast<std::size_t>(d);
    for (std::size_t i = 0; i + 1 < P; ++i) {
        for (std::size_t j = i + 1; j < P; ++j) {
            if (gap && geom.geodesic(grid.points[i], grid.points[j]) > *gap) continue;
            const double w = grid.weights[i] * grid.weights[j];
            if (w == 0.0) continue;
            const double r2 = sq_dist(p + i * stride, p + j * stride, d);
            for (std::size_t k = 0; k < K; ++k) {
                if (r2 > thr[k]) break;
                acc[k].add(w * std::exp(-r2 * inv2e[k]));
            }
        }
    }
    for (std::size_t k = 0; k < K; ++k)
        out[k] = acc[k].value() * norm_const(d, eps_desc[k]);
}

std::vector<std::size_t> descending_order(const std::vector<double>& eps) {
    std::vector<std::size_t> idx(eps.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
    return idx;
}

}  // namespace

double heat_kernel(const double* x, int d, double eps) {
    if (!(eps > 0.0)) throw ValidationError("mollifier width must be positive");
    if (d < 1) throw ValidationError("dimension must be at least 1");
    double r2 = 0.0;
    for (int c = 0; c < d; ++c) r2 += x[c] * x[c];
    return norm_const(d, eps) * std::exp(-0.5 * r2 / eps);
}

double heat_kernel(const std::vector<double>& x, double eps) {
    return heat_kernel(x.data(), static_cast<int>(x.size()), eps);
}

double local_time_path(const double* path, const Grid& grid, int dim, double eps) {
    if (grid.size() < 2) throw ValidationError("grid must contain at least 2 points");
    if (!(eps > 0.0)) throw ValidationError("mollifier width must be positive");
    double out = 0.0;
    const std::vector<double> ladder{eps};
    if (grid.kind == GridKind::CircleUniform) {
        const int N = static_cast<int>(grid.size());
        const double h = grid.weights[0];
        circle_path_ladder(path, N, dim, h, N / 2, ladder, &out);
    } else {
        Geometry geom;  // only needed when a cutoff filters pairs
        generic_path_ladder(path, grid, geom, dim, std::nullopt, ladder, &out);
    }
    return out;
}

GapSplit local_time_gap_split(const double* path, const Grid& grid, int dim,
                              double eps, double delta, const Geometry& geom) {
    if (grid.size() < 2) throw ValidationError("grid must contain at least 2 points");
    if (!(eps > 0.0)) throw ValidationError("mollifier width must be positive");
    check_gap(delta, geom);
    GapSplit out;
    const std::vector<double> ladder{eps};
    if (grid.kind == GridKind::CircleUniform) {
        const int N = static_cast<int>(grid.size());
        const double h = grid.weights[0];
        const int m_max = circle_gap_max_offset(N, geom.T, delta);
        double lam = 0.0, full = 0.0;
        circle_path_ladder(path, N, dim, h, m_max, ladder, &lam);
        circle_path_ladder(path, N, dim, h, N / 2, ladder, &full);
        out.lambda = lam;
        out.gamma = full - lam;
        return out;
    }
    double lam = 0.0, full = 0.0;
    generic_path_ladder(path, grid, geom, dim, delta, ladder, &lam);
    generic_path_ladder(path, grid, geom, dim, std::nullopt, ladder, &full);
    out.lambda = lam;
    out.gamma = full - lam;
    return out;
}

void LocalTimeEstimate::refresh_moments() {
    if (per_path.empty()) {
        mean = 0.0;
        std_error = 0.0;
        return;
    }
    const MeanSe ms = mean_se(per_path);
    mean = ms.mean;
    std_error = ms.std_error;
}

std::vector<LocalTimeEstimate> local_time_ensemble_multi(
    const PathEnsemble& paths, const std::vector<double>& eps_ladder,
    std::optional<double> gap, int threads) {
    if (eps_ladder.empty()) throw ValidationError("empty mollifier ladder");
    for (double e : eps_ladder)
        if (!(e > 0.0)) throw ValidationError("mollifier width must be positive");
    const Geometry& geom = paths.spec().geom;
    if (gap) check_gap(*gap, geom);

    const auto order = descending_order(eps_ladder);
    std::vector<double> eps_desc(eps_ladder.size());
    for (std::size_t k = 0; k < order.size(); ++k) eps_desc[k] = eps_ladder[order[k]];

    const std::size_t n = paths.n_samples();
    const std::size_t K = eps_ladder.size();
    std::vector<double> vals(n * K);

    const Grid& grid = paths.grid();
    const int d = paths.dim();
    const bool circle = grid.kind == GridKind::CircleUniform;
    const int N = static_cast<int>(grid.size());
    const double h = circle ? grid.weights[0] : 0.0;
    const int m_max = circle ? (gap ? circle_gap_max_offset(N, geom.T, *gap) : N / 2) : 0;

    auto worker = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> out(K);
        for (std::size_t s = lo; s < hi; ++s) {
            if (circle)
                circle_path_ladder(paths.path(s), N, d, h, m_max, eps_desc, out.data());
            else
                generic_path_ladder(paths.path(s), grid, geom, d, gap, eps_desc,
                                    out.data());
            for (std::size_t k = 0; k < K; ++k) vals[s * K + k] = out[k];
        }
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

    std::vector<LocalTimeEstimate> result(K);
    for (std::size_t k = 0; k < K; ++k) {
        // order[k] is the caller slot of eps_desc[k]
        LocalTimeEstimate& est = result[order[k]];
        est.epsilon = eps_desc[k];
        est.centered = false;
        est.gap = gap;
        est.grid = grid;
        est.per_path.resize(n);
        for (std::size_t s = 0; s < n; ++s) est.per_path[s] = vals[s * K + k];
        est.refresh_moments();
    }
    return result;
}

LocalTimeEstimate local_time_ensemble(const PathEnsemble& paths, double eps) {
    return local_time_ensemble_multi(paths, {eps}, std::nullopt).front();
}

LocalTimeEstimate gap_local_time_ensemble(const PathEnsemble& paths, double eps,
                                          double delta) {
    return local_time_ensemble_multi(paths, {eps}, delta).front();
}

double expected_L_eps_analytic(const KernelSpec& spec, double eps) {
    if (spec.geom.type != GeometryType::Circle)
        throw ValidationError("loop expectation is defined for circle kernels");
    if (eps < 0.0) throw ValidationError("mollifier width must be >= 0");
    const double T = spec.geom.T;
    return mean_local_time_circle(spec.hurst, spec.dim, T, eps, 0.5 * T);
}

double expected_gap_L_eps_analytic(const KernelSpec& spec, double eps,
                                   double delta) {
    if (spec.geom.type != GeometryType::Circle)
        throw ValidationError("loop expectation is defined for circle kernels");
    if (eps < 0.0) throw ValidationError("mollifier width must be >= 0");
    check_gap(delta, spec.geom);
    return mean_local_time_circle(spec.hurst, spec.dim, spec.geom.T, eps, delta);
}

double expected_L_eps_discrete(const KernelSpec& spec, const Grid& grid,
                               double eps, std::optional<double> gap) {
    if (!(eps > 0.0)) throw ValidationError("mollifier width must be positive");
    const Geometry& geom = spec.geom;
    const bool circle = grid.kind == GridKind::CircleUniform;
    if (circle != (geom.type == GeometryType::Circle))
        throw ValidationError("grid geometry does not match the kernel geometry");
    if (gap) check_gap(*gap, geom);
    const double pref = std::pow(2.0 * std::numbers::pi, -0.5 * spec.dim);
    if (circle) {
        const int N = static_cast<int>(grid.size());
        const double h = grid.weights[0];
        const int m_max = gap ? circle_gap_max_offset(N, geom.T, *gap) : N / 2;
        KahanSum s;
        for (int m = 1; m <= m_max; ++m) {
            const double count = (2 * m == N) ? 0.5 * N : N;
            const double v = spec.increment_variance(geodesic_circle(0.0, m * h, geom.T));
            s.add(count * std::pow(v + eps, -0.5 * spec.dim));
        }
        return pref * h * h * s.value();
    }
    const std::size_t P = grid.size();
    KahanSum s;
    for (std::size_t i = 0; i + 1 < P; ++i) {
        for (std::size_t j = i + 1; j < P; ++j) {
            if (gap && geom.geodesic(grid.points[i], grid.points[j]) > *gap) continue;
            const double w = grid.weights[i] * grid.weights[j];
            if (w == 0.0) continue;
            const double v =
                spec.increment_variance(geom.geodesic(grid.points[i], grid.points[j]));
            s.add(w * std::pow(v + eps, -0.5 * spec.dim));
        }
    }
    return pref * s.value();
}

double second_moment_gap_discrete(const KernelSpec& spec, int N, double e1,
                                  double e2, double delta) {
    if (spec.geom.type != GeometryType::Circle)
        throw ValidationError("gap second moment is defined for circle kernels");
    if (!(e1 > 0.0 && e2 > 0.0)) throw ValidationError("mollifier width must be positive");
    const Geometry& geom = spec.geom;
    check_gap(delta, geom);
    if (N < 2) throw ValidationError("circle grid needs at least 2 points");
    const double T = geom.T;
    const double h = T / N;
    const int M = circle_gap_max_offset(N, T, delta);

    // V[x] = increment variance at index distance x
    std::vector<double> V(static_cast<std::size_t>(N));
    for (int x = 0; x < N; ++x)
        V[static_cast<std::size_t>(x)] =
            spec.increment_variance(geodesic_circle(0.0, x * h, T));
    auto at = [&](int x) {
        x %= N;
        if (x < 0) x += N;
        return V[static_cast<std::size_t>(x)];
    };
    auto offw = [&](int m) { return (2 * m == N) ? 0.5 : 1.0; };

    const bool sym = e1 == e2;
    const double halfd = -0.5 * spec.dim;
    const bool inv = spec.dim == 2;  // det^{-1} fast path
    KahanSum total;
    for (int m1 = 1; m1 <= M; ++m1) {
        const double lam = at(m1) + e1;
        const int m2_lo = sym ? m1 : 1;
        for (int m2 = m2_lo; m2 <= M; ++m2) {
            const double rho = at(m2) + e2;
            const double lr = lam * rho;
            double inner = 0.0;
            for (int b = 0; b < N; ++b) {
                const double mu =
                    0.5 * (at(b + m2) + at(b - m1) - at(b) - at(b - m1 + m2));
                const double det = lr - mu * mu;
                inner += inv ? 1.0 / det : std::pow(det, halfd);
            }
            const double mult = (sym && m2 != m1) ? 2.0 : 1.0;
            total.add(mult * offw(m1) * offw(m2) * inner);
        }
    }
    const double pref = std::pow(2.0 * std::numbers::pi, -spec.dim);
    return h * h * h * h * pref * N * total.value();
}

LocalTimeEstimate center(const LocalTimeEstimate& est, const KernelSpec& spec) {
    if (est.centered) throw ValidationError("estimate is already centered");
    if (est.grid.size() < 2)
        throw ValidationError("estimate carries no usable grid reference");
    const double expectation =
        expected_L_eps_discrete(spec, est.grid, est.epsilon, est.gap);
    LocalTimeEstimate out = est;
    for (double& v : out.per_path) v -= expectation;
    out.centered = true;
    out.refresh_moments();
    return out;
}

double second_moment_analytic(const KernelSpec& spec, double eps, double delta) {
    if (spec.geom.type != GeometryType::Circle)
        throw ValidationError("gap second moment is defined for circle kernels");
    check_gap(delta, spec.geom);
    return second_moment_quadrature(spec.hurst, spec.dim, spec.geom.T, delta, eps)
        .value;
}

}  // namespace frl
