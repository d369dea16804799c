// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "frl/errors.hpp"

namespace frl {

enum class GeometryType { Circle, Star };

// A parameter point. Circle: branch must be 0, t in [0, T].
// Star: branch in 1..n_branches, t in [0, T_branch]; the shared origin is
// (0, 0) but any (k, 0) denotes the same point.
struct ParamPoint {
    int branch = 0;
    double t = 0.0;
};

struct Geometry {
    GeometryType type = GeometryType::Circle;
    double T = 1.0;                  // circle circumference
    std::vector<double> lengths;     // star branch lengths, 1-based branch ids

    static Geometry circle(double T);
    static Geometry star(std::vector<double> lengths);

    int n_branches() const { return type == GeometryType::Star ? static_cast<int>(lengths.size()) : 1; }
    double branch_length(int k) const;
    // geodesic distance between two parameter points
    double geodesic(const ParamPoint& p, const ParamPoint& q) const;
};

// d(s,t) = min(|s-t|, T-|s-t|); arguments must lie in [0, T]
double geodesic_circle(double s, double t, double T);

// |s-t| on a common branch, s+t across branches (path through the origin)
double geodesic_star(int k, double s, int l, double t,
                     const std::vector<double>& lengths);

enum class GridKind { CircleUniform, Star };

// Uniform grids. The origin appears exactly once and carries zero
// quadrature weight on stars (it is the shared endpoint of every branch).
struct Grid {
    GridKind kind = GridKind::CircleUniform;
    std::vector<ParamPoint> points;
    std::vector<double> weights;
    int n_per_branch = 0;  // circle: total points; star: points per branch

    static Grid circle_uniform(double T, int N);
    // N points per branch at spacing T_k/N, plus the origin at index 0
    static Grid star_uniform(const std::vector<double>& lengths, int N);

    std::size_t size() const { return points.size(); }
    // index of the first stored point of branch k (1-based), star grids only
    std::size_t branch_begin(int k, int n_branches) const;
};

}  // namespace frl
