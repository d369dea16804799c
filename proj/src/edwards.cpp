// SPDX-License-Identifier: Apache-2.0
#include "frl/edwards.hpp"

#include <algorithm>
#include <cmath>

#include "frl/stats.hpp"

namespace frl {

namespace {

// ln(DBL_MAX) is 709.78; past this the unshifted normalizer cannot be held
// in a double no matter how the mean is formed
constexpr double kMaxExponent = 700.0;

double centroid_deviation_sq(const PathEnsemble& ens, std::size_t s) {
    // weighted squared radius of gyration for one path
    const Grid& grid = ens.grid();
    const int d = ens.dim();
    const double* p = ens.path(s);
    const std::size_t P = grid.size();
    std::vector<double> c(static_cast<std::size_t>(d), 0.0);
    double W = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        const double w = grid.weights[i];
        W += w;
        for (int a = 0; a < d; ++a)
            c[static_cast<std::size_t>(a)] += w * p[i * static_cast<std::size_t>(d) +
                                                    static_cast<std::size_t>(a)];
    }
    for (double& x : c) x /= W;
    KahanSum r2;
    for (std::size_t i = 0; i < P; ++i) {
        const double w = grid.weights[i];
        if (w == 0.0) continue;
        double q = 0.0;
        for (int a = 0; a < d; ++a) {
            const double t = p[i * static_cast<std::size_t>(d) +
                               static_cast<std::size_t>(a)] -
                             c[static_cast<std::size_t>(a)];
            q += t * t;
        }
        r2.add(w * q);
    }
    return r2.value() / W;
}

}  // namespace

EdwardsEstimate edwards_weights(const LocalTimeEstimate& est, double g) {
    if (!(g >= 0.0)) throw ValidationError("coupling must be >= 0");
    if (est.per_path.empty())
        throw ValidationError("weights need per-path local time values");
    const std::size_t n = est.per_path.size();

    EdwardsEstimate ew;
    ew.g = g;
    std::vector<double> a(n);
    for (std::size_t s = 0; s < n; ++s) a[s] = -g * est.per_path[s];
    const double amax = *std::max_element(a.begin(), a.end());
    ew.max_exponent = amax;
    if (amax > kMaxExponent)
        throw NumericError(
            "importance weight overflows a double (coupling beyond the stable "
            "range for this ensemble)",
            amax);

    std::vector<double> shifted(n);
    for (std::size_t s = 0; s < n; ++s) shifted[s] = std::exp(a[s] - amax);
    KahanSum sum, sumsq;
    for (double w : shifted) {
        sum.add(w);
        sumsq.add(w * w);
    }
    const double S = sum.value();
    ew.ess = S * S / sumsq.value();

    ew.weights.resize(n);
    for (std::size_t s = 0; s < n; ++s) ew.weights[s] = shifted[s] / S;

    const MeanSe raw = mean_se(shifted);
    const double scale = std::exp(amax);
    ew.normalizer = scale * raw.mean;
    ew.normalizer_std_error = scale * raw.std_error;
    return ew;
}

EdwardsEstimate edwards_weights_star(const LocalTimeEstimate& est,
                                     const CouplingWeights& coupling, double g) {
    EdwardsEstimate ew = edwards_weights(est, g);
    ew.star_coupling = coupling;
    return ew;
}

std::vector<double> observable_per_path(const PathEnsemble& ens,
                                        const std::string& name) {
    const std::size_t n = ens.n_samples();
    const Grid& grid = ens.grid();
    const int d = ens.dim();
    std::vector<double> f(n);

    if (name == "gyration") {
        for (std::size_t s = 0; s < n; ++s) f[s] = centroid_deviation_sq(ens, s);
        return f;
    }
    if (name == "antipodal") {
        if (grid.kind != GridKind::CircleUniform)
            throw ValidationError("antipodal displacement is a loop observable");
        const double half = 0.5 * ens.spec().geom.T;
        std::size_t idx = 0;
        double best = std::abs(grid.points[0].t - half);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double dist = std::abs(grid.points[i].t - half);
            if (dist < best) {
                best = dist;
                idx = i;
            }
        }
        if (best > 1e-9 * ens.spec().geom.T)
            throw ValidationError("grid has no point at half circumference");
        for (std::size_t s = 0; s < n; ++s) {
            const double* p = ens.path(s) + idx * static_cast<std::size_t>(d);
            double q = 0.0;
            for (int a = 0; a < d; ++a) q += p[a] * p[a];
            f[s] = q;  // the origin value is pinned at 0
        }
        return f;
    }
    if (name.rfind("branch_end_", 0) == 0) {
        if (grid.kind != GridKind::Star)
            throw ValidationError("branch end-to-end is a star observable");
        const int k = std::stoi(name.substr(11));
        const int nb = ens.spec().geom.n_branches();
        const std::size_t tip =
            grid.branch_begin(k, nb) + static_cast<std::size_t>(grid.n_per_branch) - 1;
        for (std::size_t s = 0; s < n; ++s) {
            const double* p = ens.path(s) + tip * static_cast<std::size_t>(d);
            double q = 0.0;
            for (int a = 0; a < d; ++a) q += p[a] * p[a];
            f[s] = q;
        }
        return f;
    }
    throw ValidationError("unknown observable: " + name);
}

ObservableStats reweighted_observable(const PathEnsemble& ens,
                                      EdwardsEstimate& ew,
                                      const std::string& name) {
    if (ew.weights.size() != ens.n_samples())
        throw ValidationError("weights were not computed from this ensemble");
    const std::vector<double> f = observable_per_path(ens, name);

    ObservableStats st;
    const MeanSe raw = mean_se(f);
    st.raw = raw.mean;
    st.raw_std_error = raw.std_error;
    st.low_ess_warning = ew.ess < 10.0;

    if (ew.g == 0.0) {
        st.reweighted = st.raw;  // exact identity, no reweighting applied
        st.std_error = st.raw_std_error;
    } else {
        KahanSum m;
        for (std::size_t s = 0; s < f.size(); ++s) m.add(ew.weights[s] * f[s]);
        const double mu = m.value();
        KahanSum var;
        for (std::size_t s = 0; s < f.size(); ++s) {
            const double u = ew.weights[s] * (f[s] - mu);
            var.add(u * u);
        }
        st.reweighted = mu;
        st.std_error = std::sqrt(var.value());
    }
    ew.observables[name] = st;
    return st;
}

std::vector<StabilityRow> stability_scan(const LocalTimeEstimate& est,
                                         const std::vector<double>& g_grid,
                                         double ess_fraction) {
    if (g_grid.empty()) throw ValidationError("empty coupling grid");
    if (!(ess_fraction > 0.0 && ess_fraction <= 1.0))
        throw ValidationError("ess fraction must lie in (0, 1]");
    const double n = static_cast<double>(est.per_path.size());
    std::vector<StabilityRow> rows;
    rows.reserve(g_grid.size());
    for (double g : g_grid) {
        StabilityRow row;
        row.g = g;
        try {
            const EdwardsEstimate ew = edwards_weights(est, g);
            row.finite = std::isfinite(ew.normalizer);
            row.ess = ew.ess;
        } catch (const NumericError&) {
            row.finite = false;
            row.ess = 0.0;
        }
        row.stable = row.finite && row.ess >= ess_fraction * n;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace frl
