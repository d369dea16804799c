// SPDX-License-Identifier: Apache-2.0
#include "frl/geometry.hpp"

#include <cmath>

namespace frl {

Geometry Geometry::circle(double T) {
    if (!(T > 0.0)) throw ValidationError("circle circumference must be positive");
    Geometry g;
    g.type = GeometryType::Circle;
    g.T = T;
    return g;
}

Geometry Geometry::star(std::vector<double> lengths) {
    if (lengths.empty()) throw ValidationError("star needs at least one branch");
    for (double L : lengths)
        if (!(L > 0.0)) throw ValidationError("star branch lengths must be positive");
    Geometry g;
    g.type = GeometryType::Star;
    g.lengths = std::move(lengths);
    g.T = 0.0;
    for (double L : g.lengths) g.T += L;
    return g;
}

double Geometry::branch_length(int k) const {
    if (type == GeometryType::Circle) {
        if (k != 0) throw ValidationError("circle has no branch " + std::to_string(k));
        return T;
    }
    if (k < 1 || k > static_cast<int>(lengths.size()))
        throw ValidationError("unknown branch index " + std::to_string(k));
    return lengths[static_cast<std::size_t>(k - 1)];
}

double Geometry::geodesic(const ParamPoint& p, const ParamPoint& q) const {
    if (type == GeometryType::Circle) return geodesic_circle(p.t, q.t, T);
    return geodesic_star(p.branch, p.t, q.branch, q.t, lengths);
}

double geodesic_circle(double s, double t, double T) {
    if (!(T > 0.0)) throw ValidationError("circle circumference must be positive");
    if (s < 0.0 || s > T || t < 0.0 || t > T)
        throw ValidationError("circle times must lie in [0, T]");
    const double a = std::fabs(s - t);
    return std::min(a, T - a);
}

double geodesic_star(int k, double s, int l, double t,
                     const std::vector<double>& lengths) {
    const int n = static_cast<int>(lengths.size());
    auto check = [&](int b, double u) {
        // branch 0 with u == 0 is the shared origin
        if (b == 0 && u == 0.0) return;
        if (b < 1 || b > n) throw ValidationError("unknown branch index " + std::to_string(b));
        if (u < 0.0 || u > lengths[static_cast<std::size_t>(b - 1)])
            throw ValidationError("arc position outside branch");
    };
    check(k, s);
    check(l, t);
    if (k == l) return std::fabs(s - t);
    return s + t;  // path through the shared origin
}

Grid Grid::circle_uniform(double T, int N) {
    if (N < 2) throw ValidationError("circle grid needs at least 2 points");
    Grid g;
    g.kind = GridKind::CircleUniform;
    g.n_per_branch = N;
    const double h = T / N;
    g.points.resize(static_cast<std::size_t>(N));
    g.weights.assign(static_cast<std::size_t>(N), h);
    for (int i = 0; i < N; ++i) g.points[static_cast<std::size_t>(i)] = {0, i * h};
    return g;
}

Grid Grid::star_uniform(const std::vector<double>& lengths, int N) {
    if (N < 1) throw ValidationError("star grid needs at least 1 point per branch");
    if (lengths.empty()) throw ValidationError("star grid needs branches");
    Grid g;
    g.kind = GridKind::Star;
    g.n_per_branch = N;
    g.points.push_back({0, 0.0});
    g.weights.push_back(0.0);  // origin carries no quadrature mass
    for (int k = 1; k <= static_cast<int>(lengths.size()); ++k) {
        const double h = lengths[static_cast<std::size_t>(k - 1)] / N;
        for (int i = 1; i <= N; ++i) {
            g.points.push_back({k, i * h});
            g.weights.push_back(h);
        }
    }
    return g;
}

std::size_t Grid::branch_begin(int k, int n_branches) const {
    if (k < 1 || k > n_branches) throw ValidationError("unknown branch index " + std::to_string(k));
    return 1 + static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(n_per_branch);
}

}  // namespace frl
