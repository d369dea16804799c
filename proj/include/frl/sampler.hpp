// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "frl/geometry.hpp"
#include "frl/kernel.hpp"

namespace frl {

struct SeedSpec {
    std::uint64_t master_seed = 0;
};

struct SamplerOptions {
    int threads = 1;
    // global index of the first sample; lets callers generate an ensemble in
    // chunks while keeping every sample on its (seed, index) substream
    std::size_t first_index = 0;
};

// Sample paths on a grid, flat layout [sample][point][dim].
// Invariant: the origin point is exactly 0 in every coordinate of every path.
class PathEnsemble {
public:
    PathEnsemble(KernelSpec spec, Grid grid, std::size_t n_samples);

    const KernelSpec& spec() const { return spec_; }
    const Grid& grid() const { return grid_; }
    std::size_t n_samples() const { return n_samples_; }
    std::size_t n_points() const { return grid_.size(); }
    int dim() const { return spec_.dim; }

    double* path(std::size_t s) { return data_.data() + s * stride_; }
    const double* path(std::size_t s) const { return data_.data() + s * stride_; }
    double value(std::size_t s, std::size_t point, int coord) const {
        return data_[s * stride_ + point * static_cast<std::size_t>(spec_.dim) +
                     static_cast<std::size_t>(coord)];
    }

    SeedSpec seed;
    std::size_t first_index = 0;

private:
    KernelSpec spec_;
    Grid grid_;
    std::size_t n_samples_;
    std::size_t stride_;
    std::vector<double> data_;
};

// General sampler: dense factorization of the grid covariance (origin row
// dropped, jitter escalation on borderline matrices).
PathEnsemble sample_dense(const KernelSpec& spec, const Grid& grid, std::size_t n,
                          SeedSpec seed, SamplerOptions opt = {});

// Loop sampler on a uniform circle grid: exact spectral draw of the
// circularly stationary increments, then cumulative sums pinned at 0.
PathEnsemble sample_loop_circulant(const KernelSpec& spec, const Grid& grid,
                                   std::size_t n, SeedSpec seed,
                                   SamplerOptions opt = {});

// Joint draw across starburst branches (dense factorization of the joint
// grid; the cross-branch covariance is honored exactly).
PathEnsemble sample_star(const KernelSpec& spec, const Grid& grid, std::size_t n,
                         SeedSpec seed, SamplerOptions opt = {});

// Circulant increment spectrum for a uniform N-point loop grid (diagnostic;
// the zero-frequency weight is forced to 0, closure).
std::vector<double> circulant_increment_spectrum(const KernelSpec& spec, int N);

}  // namespace frl
