// SPDX-License-Identifier: Apache-2.0
#include "frl/sampler.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>

#include "frl/errors.hpp"
#include "frl/rng.hpp"

namespace frl {

namespace {

constexpr std::size_t kBatch = 64;

void check_grid_geometry(const KernelSpec& spec, const Grid& grid) {
    const bool circle = spec.geom.type == GeometryType::Circle;
    if (circle != (grid.kind == GridKind::CircleUniform))
        throw ValidationError("grid geometry does not match the kernel geometry");
    if (!circle && grid.kind != GridKind::Star)
        throw ValidationError("grid geometry does not match the kernel geometry");
}

std::vector<std::pair<std::size_t, std::size_t>> split_ranges(std::size_t n,
                                                              int threads) {
    const std::size_t t = static_cast<std::size_t>(std::max(threads, 1));
    std::vector<std::pair<std::size_t, std::size_t>> r;
    const std::size_t base = n / t, rem = n % t;
    std::size_t lo = 0;
    for (std::size_t i = 0; i < t && lo < n; ++i) {
        const std::size_t len = base + (i < rem ? 1 : 0);
        r.emplace_back(lo, lo + len);
        lo += len;
    }
    return r;
}

}  // namespace

PathEnsemble::PathEnsemble(KernelSpec spec, Grid grid, std::size_t n_samples)
    : spec_(std::move(spec)),
      grid_(std::move(grid)),
      n_samples_(n_samples),
      stride_(grid_.size() * static_cast<std::size_t>(spec_.dim)),
      data_(n_samples * stride_, 0.0) {}

PathEnsemble sample_dense(const KernelSpec& spec, const Grid& grid, std::size_t n,
                          SeedSpec seed, SamplerOptions opt) {
    spec.require_sampling_range();
    check_grid_geometry(spec, grid);
    const std::size_t P = grid.size();
    if (P < 2) throw ValidationError("grid must contain the origin and at least one point");
    const auto m = static_cast<Eigen::Index>(P - 1);

    Eigen::MatrixXd A = build_cov_matrix(spec, grid).m.bottomRightCorner(m, m);
    const double scale = A.trace() / static_cast<double>(m);

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        double ridge = 1e-12;
        for (; ridge <= 1e-8; ridge *= 10.0) {
            Eigen::MatrixXd Aj = A;
            Aj.diagonal().array() += ridge * scale;
            llt.compute(Aj);
            if (llt.info() == Eigen::Success) break;
        }
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A,
                                                              Eigen::EigenvaluesOnly);
            throw NumericError(
                "kernel is not positive definite on this grid (factorization failed "
                "after jitter escalation)",
                es.eigenvalues().minCoeff());
        }
    }
    const Eigen::MatrixXd L = llt.matrixL();

    PathEnsemble out(spec, grid, n);
    out.seed = seed;
    out.first_index = opt.first_index;
    if (n == 0) return out;

    const int d = spec.dim;
    auto worker = [&](std::size_t lo, std::size_t hi) {
        Eigen::MatrixXd Z(m, static_cast<Eigen::Index>(kBatch));
        Eigen::MatrixXd X(m, static_cast<Eigen::Index>(kBatch));
        std::vector<NormalStream> streams;
        for (std::size_t s0 = lo; s0 < hi; s0 += kBatch) {
            const std::size_t b = std::min(kBatch, hi - s0);
            streams.clear();
            for (std::size_t j = 0; j < b; ++j)
                streams.emplace_back(seed.master_seed, StreamPurpose::PathNoise,
                                     opt.first_index + s0 + j);
            for (int c = 0; c < d; ++c) {
                for (std::size_t j = 0; j < b; ++j) {
                    double* col = Z.col(static_cast<Eigen::Index>(j)).data();
                    for (Eigen::Index i = 0; i < m; ++i) col[i] = streams[j].next();
                }
                X.leftCols(static_cast<Eigen::Index>(b)).noalias() =
                    L.triangularView<Eigen::Lower>() *
                    Z.leftCols(static_cast<Eigen::Index>(b));
                for (std::size_t j = 0; j < b; ++j) {
                    double* p = out.path(s0 + j);
                    const double* col = X.col(static_cast<Eigen::Index>(j)).data();
                    for (Eigen::Index i = 0; i < m; ++i)
                        p[(static_cast<std::size_t>(i) + 1) * static_cast<std::size_t>(d) +
                          static_cast<std::size_t>(c)] = col[i];
                }
            }
        }
    };

    const auto ranges = split_ranges(n, opt.threads);
    if (ranges.size() <= 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        for (const auto& r : ranges) pool.emplace_back(worker, r.first, r.second);
        for (auto& t : pool) t.join();
    }
    return out;
}

std::vector<double> circulant_increment_spectrum(const KernelSpec& spec, int N) {
    if (N < 2) throw ValidationError("uniform loop grid needs at least 2 points");
    if (spec.geom.type != GeometryType::Circle)
        throw ValidationError("circulant spectrum is defined for circle kernels only");
    const double T = spec.geom.T;
    const double h = T / N;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(N)),
        out(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        auto v = [&](int j) {
            return spec.increment_variance(geodesic_circle(0.0, std::fabs(j) * h, T));
        };
        in[static_cast<std::size_t>(k)] = 0.5 * (v(k + 1) + v(k - 1) - 2.0 * v(k));
    }
    fftw_plan plan = fftw_plan_dft_1d(
        N, reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<double> lambda(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) lambda[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k)].real();
    lambda[0] = 0.0;  // zero-frequency weight: exact closure
    const double lmax = *std::max_element(lambda.begin(), lambda.end());
    const double lmin = *std::min_element(lambda.begin(), lambda.end());
    if (lmin < -1e-8 * lmax)
        throw NumericError("circulant increment spectrum has a negative eigenvalue", lmin);
    for (double& l : lambda) l = std::max(l, 0.0);
    return lambda;
}

PathEnsemble sample_loop_circulant(const KernelSpec& spec, const Grid& grid,
                                   std::size_t n, SeedSpec seed, SamplerOptions opt) {
    spec.require_sampling_range();
    if (grid.kind != GridKind::CircleUniform || spec.geom.type != GeometryType::Circle)
        throw ValidationError("circulant sampling needs a uniform circle grid");
    const int N = static_cast<int>(grid.size());
    const std::vector<double> lambda = circulant_increment_spectrum(spec, N);
    std::vector<double> w(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k)
        w[static_cast<std::size_t>(k)] =
            std::sqrt(lambda[static_cast<std::size_t>(k)] / (2.0 * N));

    PathEnsemble out(spec, grid, n);
    out.seed = seed;
    out.first_index = opt.first_index;
    if (n == 0) return out;

    // one plan, executed on per-thread buffers
    std::vector<std::complex<double>> pin(static_cast<std::size_t>(N)),
        pout(static_cast<std::size_t>(N));
    fftw_plan plan = fftw_plan_dft_1d(
        N, reinterpret_cast<fftw_complex*>(pin.data()),
        reinterpret_cast<fftw_complex*>(pout.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);

    const int d = spec.dim;
    const double sqrt2 = std::sqrt(2.0);
    auto worker = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::complex<double>> fin(static_cast<std::size_t>(N)),
            fout(static_cast<std::size_t>(N));
        for (std::size_t s = lo; s < hi; ++s) {
            NormalStream stream(seed.master_seed, StreamPurpose::PathNoise,
                                opt.first_index + s);
            double* p = out.path(s);
            for (int c = 0; c < d; ++c) {
                for (int k = 0; k < N; ++k) {
                    const double zr = stream.next();
                    const double zi = stream.next();
                    fin[static_cast<std::size_t>(k)] =
                        w[static_cast<std::size_t>(k)] * std::complex<double>(zr, zi);
                }
                fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(fin.data()),
                                 reinterpret_cast<fftw_complex*>(fout.data()));
                double v = 0.0;
                p[static_cast<std::size_t>(c)] = 0.0;
                for (int j = 1; j < N; ++j) {
                    v += sqrt2 * fout[static_cast<std::size_t>(j - 1)].real();
                    p[static_cast<std::size_t>(j) * static_cast<std::size_t>(d) +
                      static_cast<std::size_t>(c)] = v;
                }
            }
        }
    };

    const auto ranges = split_ranges(n, opt.threads);
    if (ranges.size() <= 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        for (const auto& r : ranges) pool.emplace_back(worker, r.first, r.second);
        for (auto& t : pool) t.join();
    }
    fftw_destroy_plan(plan);
    return out;
}

PathEnsemble sample_star(const KernelSpec& spec, const Grid& grid, std::size_t n,
                         SeedSpec seed, SamplerOptions opt) {
    if (spec.geom.type != GeometryType::Star || grid.kind != GridKind::Star)
        throw ValidationError("star sampling needs a star kernel and a star grid");
    return sample_dense(spec, grid, n, seed, opt);
}

}  // namespace frl
