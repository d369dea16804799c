// SPDX-License-Identifier: Apache-2.0
#include "frl/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace frl {

namespace {

constexpr double kGlX[4] = {0.1834346424956498, 0.5255324099163290,
                            0.7966664774136267, 0.9602898564975363};
constexpr double kGlW[4] = {0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

double gl8(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        s += kGlW[i] * (f(mid + half * kGlX[i]) + f(mid - half * kGlX[i]));
    }
    return s * half;
}

// x^{2H} with fast paths for the common exponents
struct Pow2H {
    explicit Pow2H(double H) : e(2.0 * H) {}
    double operator()(double x) const {
        if (e == 1.0) return x;
        if (e == 0.5) return std::sqrt(x);
        return std::pow(x, e);
    }
    double e;
};

double two_pi_pow(int d) { return std::pow(2.0 * std::numbers::pi, -0.5 * d); }

}  // namespace

double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        int panels) {
    if (!(b > a)) return 0.0;
    const double w = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) s += gl8(f, a + p * w, a + (p + 1) * w);
    return s;
}

double integrate_left_refined(const std::function<double(double)>& f, double b,
                              int panels, double head_frac) {
    if (!(b > 0.0)) return 0.0;
    const double a0 = b * head_frac;
    double s = gl8(f, 0.0, a0);
    const double ratio = std::pow(head_frac, -1.0 / panels);
    double lo = a0;
    for (int p = 0; p < panels; ++p) {
        double hi = (p + 1 == panels) ? b : lo * ratio;
        s += gl8(f, lo, hi);
        lo = hi;
    }
    return s;
}

double mean_local_time_circle(double H, int d, double T, double eps, double delta) {
    if (!(delta > 0.0 && delta <= 0.5 * T)) throw ValidationError("gap must lie in (0, T/2]");
    const double dH = d * H;
    if (eps == 0.0) {
        if (dH >= 1.0)
            throw NumericError("mean intersection time diverges at eps=0 for H*d >= 1", dH);
        return T * two_pi_pow(d) * std::pow(delta, 1.0 - dH) / (1.0 - dH);
    }
    if (!(eps > 0.0)) throw ValidationError("eps must be >= 0");
    const Pow2H p2h(H);
    auto f = [&](double tau) { return std::pow(p2h(tau) + eps, -0.5 * d); };
    return T * two_pi_pow(d) * integrate_left_refined(f, delta);
}

double mean_local_time_line(double H, int d, double Tk, double eps) {
    if (!(Tk > 0.0)) throw ValidationError("branch length must be positive");
    const double dH = d * H;
    if (eps == 0.0) {
        if (dH >= 1.0)
            throw NumericError("mean intersection time diverges at eps=0 for H*d >= 1", dH);
        return two_pi_pow(d) * std::pow(Tk, 2.0 - dH) *
               (1.0 / (1.0 - dH) - 1.0 / (2.0 - dH));
    }
    if (!(eps > 0.0)) throw ValidationError("eps must be >= 0");
    const Pow2H p2h(H);
    auto f = [&](double tau) { return (Tk - tau) * std::pow(p2h(tau) + eps, -0.5 * d); };
    return two_pi_pow(d) * integrate_left_refined(f, Tk);
}

double star_cross_mean(double H, int d, double Tk, double Tl, double eps) {
    if (!(Tk > 0.0 && Tl > 0.0)) throw ValidationError("branch lengths must be positive");
    const double dH = d * H;
    if (eps == 0.0 && dH >= 2.0)
        throw NumericError("cross intersection time diverges at eps=0 for H*d >= 2", dH);
    if (eps < 0.0) throw ValidationError("eps must be >= 0");
    const double W = Tk + Tl;
    const double m1 = std::min(Tk, Tl);
    const double m2 = std::max(Tk, Tl);
    const Pow2H p2h(H);
    auto rho = [&](double w) { return std::min(std::min(w, m1), W - w); };
    auto f = [&](double w) { return rho(w) * std::pow(p2h(w) + eps, -0.5 * d); };
    // rho has kinks at m1 and m2; integrate each smooth piece separately
    double s = 0.0;
    if (eps == 0.0) {
        // analytic head on [0, a0] where rho(w) = w exactly: w^{1-dH} integrable
        const double a0 = std::min(m1, 1e-10 * W);
        s += std::pow(a0, 2.0 - dH) / (2.0 - dH);
        const double ratio = std::pow(m1 / a0, 1.0 / 60.0);
        double lo = a0;
        for (int p = 0; p < 60; ++p) {
            const double hi = (p == 59) ? m1 : lo * ratio;
            s += gl8(f, lo, hi);
            lo = hi;
        }
    } else {
        s += integrate_left_refined(f, m1);
    }
    if (m2 > m1) s += integrate_smooth(f, m1, m2, 16);
    if (W > m2) s += integrate_smooth(f, m2, W, 16);
    return two_pi_pow(d) * s;
}

namespace {

struct Nodes {
    std::vector<double> x, w;
};

// geometric panels on (b*frac, b], 8-point GL each
Nodes left_refined_nodes(double b, int panels, double frac) {
    Nodes n;
    n.x.reserve(static_cast<std::size_t>(8 * panels));
    n.w.reserve(static_cast<std::size_t>(8 * panels));
    const double a0 = b * frac;
    const double ratio = std::pow(frac, -1.0 / panels);
    double lo = a0;
    for (int p = 0; p < panels; ++p) {
        const double hi = (p + 1 == panels) ? b : lo * ratio;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (int i = 0; i < 4; ++i) {
            n.x.push_back(mid + half * kGlX[i]);
            n.w.push_back(half * kGlW[i]);
            n.x.push_back(mid - half * kGlX[i]);
            n.w.push_back(half * kGlW[i]);
        }
        lo = hi;
    }
    return n;
}

}  // namespace

double second_moment_gap(double H, int d, double T, double delta, double e1,
                         double e2, bool force_zero_cross, int n_dist, int n_shift) {
    if (!(delta > 0.0 && delta <= 0.5 * T)) throw ValidationError("gap must lie in (0, T/2]");
    if (!(e1 > 0.0 && e2 > 0.0)) throw ValidationError("eps must be positive");
    const Pow2H p2h(H);
    auto d2h = [&](double x) {
        double r = std::fabs(std::fmod(x, T));
        r = std::min(r, T - r);
        return p2h(r);
    };

    const Nodes a = left_refined_nodes(delta, n_dist, 1e-8);
    // second-pair separations live in both strips (0,delta) and (T-delta, T)
    const std::size_t nu = 2 * a.x.size();
    std::vector<double> ux(nu), uw(nu), urho(nu);
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        ux[i] = a.x[i];
        uw[i] = a.w[i];
        urho[i] = p2h(a.x[i]);
        ux[a.x.size() + i] = T - a.x[i];
        uw[a.x.size() + i] = a.w[i];
        urho[a.x.size() + i] = urho[i];
    }
    const double bw = T / n_shift;
    std::vector<double> bx(static_cast<std::size_t>(n_shift));
    for (int j = 0; j < n_shift; ++j) bx[static_cast<std::size_t>(j)] = (j + 0.5) * bw;

    const double halfd = -0.5 * d;
    double total = 0.0;
    for (std::size_t ia = 0; ia < a.x.size(); ++ia) {
        const double av = a.x[ia];
        const double lam = p2h(av) + e1;
        double acc_a = 0.0;
        for (std::size_t iu = 0; iu < nu; ++iu) {
            const double uv = ux[iu];
            const double rho = urho[iu] + e2;
            double acc_b = 0.0;
            if (force_zero_cross) {
                acc_b = std::pow(lam * rho, halfd) * n_shift;
            } else {
                for (int j = 0; j < n_shift; ++j) {
                    const double b = bx[static_cast<std::size_t>(j)];
                    const double mu = 0.5 * (d2h(b + uv) + d2h(b - av) -
                                             d2h(av - b - uv) - d2h(b));
                    acc_b += std::pow(lam * rho - mu * mu, halfd);
                }
            }
            acc_a += uw[iu] * acc_b;
        }
        total += a.w[ia] * acc_a * bw;
    }
    total *= 2.0;  // pair-swap symmetry of the first separation
    return 0.25 * T * std::pow(2.0 * std::numbers::pi, -d) * total;
}

QuadResult second_moment_quadrature(double H, int d, double T, double delta,
                                    double eps, double rel_tol) {
    const double coarse = second_moment_gap(H, d, T, delta, eps, eps, false, 60, 400);
    const double fine = second_moment_gap(H, d, T, delta, eps, eps, false, 90, 800);
    QuadResult r;
    r.value = fine;
    r.rel_error = std::fabs(fine - coarse) / std::fabs(fine);
    if (!(r.rel_error <= rel_tol))
        throw NumericError("second-moment quadrature did not converge to requested tolerance",
                           r.rel_error);
    return r;
}

}  // namespace frl
