// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "frl/errors.hpp"

namespace frl {

// Compensated accumulation; reduction order is fixed by the caller.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double kahan_mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    KahanSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

struct MeanSe {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

inline MeanSe mean_se(std::span<const double> v) {
    MeanSe r;
    r.n = v.size();
    if (r.n == 0) return r;
    r.mean = kahan_mean(v);
    if (r.n < 2) return r;
    KahanSum q;
    for (double x : v) {
        const double d = x - r.mean;
        q.add(d * d);
    }
    r.std_error = std::sqrt(q.value() / (static_cast<double>(r.n) - 1.0) /
                            static_cast<double>(r.n));
    return r;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw ValidationError("linear fit needs matched arrays, n >= 2");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw ValidationError("degenerate abscissae in linear fit");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

struct Extrapolation {
    double value = 0.0;
    double residual = 0.0;  // magnitude of the last applied correction
    double rate = 0.0;      // fitted per-step contraction factor
};

// Aitken limit of a sequence v_k -> v with geometric error decay
// v_k = v + c r^k. Needs >= 3 entries; with exactly 2, `fixed_ratio` is used.
inline Extrapolation extrapolate_geometric(std::span<const double> v,
                                           double fixed_ratio = 0.0) {
    Extrapolation e;
    if (v.size() < 2) throw ValidationError("extrapolation needs >= 2 ladder values");
    const double last = v[v.size() - 1];
    const double d2 = last - v[v.size() - 2];
    double r;
    if (v.size() >= 3) {
        const double d1 = v[v.size() - 2] - v[v.size() - 3];
        if (d1 == 0.0) {
            e.value = last;
            return e;
        }
        r = d2 / d1;
        if (!(r > 0.0 && r < 1.0)) {
            // no contraction visible; fall back to the fixed ratio when given
            if (!(fixed_ratio > 0.0 && fixed_ratio < 1.0)) {
                e.value = last;
                e.residual = std::fabs(d2);
                e.rate = r;
                return e;
            }
            r = fixed_ratio;
        }
    } else {
        if (!(fixed_ratio > 0.0 && fixed_ratio < 1.0))
            throw ValidationError("2-point extrapolation needs a contraction ratio");
        r = fixed_ratio;
    }
    const double corr = d2 * r / (1.0 - r);
    e.value = last + corr;
    e.residual = std::fabs(corr);
    e.rate = r;
    return e;
}

inline std::vector<double> log_of(std::span<const double> v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
    return out;
}

}  // namespace frl
