#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <vector>

#include "nonloc/errors.hpp"
#include "nonloc/interval.hpp"

namespace nonloc {
namespace quad {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre nodes via Newton iteration on P_n. Accurate to machine
// precision for the small n used here.
inline Rule gauss_legendre(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

inline const Rule& rule15() {
    static const Rule r = gauss_legendre(15);
    return r;
}

inline const Rule& rule10() {
    static const Rule r = gauss_legendre(10);
    return r;
}

template <class F>
double fixed(const F& f, double a, double b, const Rule& r = rule15()) {
    const double c = 0.5 * (a + b), s = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * f(c + s * r.nodes[i]);
    return acc * s;
}

struct AdaptiveResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

template <class F>
void adaptive_rec(const F& f, double a, double b, double tol, double scale, int depth,
                  int max_depth, AdaptiveResult& out) {
    const double whole = fixed(f, a, b);
    const double m = 0.5 * (a + b);
    const double halves = fixed(f, a, m) + fixed(f, m, b);
    const double err = std::abs(whole - halves);
    // refinement cannot beat roundoff of the integrand scale
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                         (scale + std::abs(whole) + std::abs(halves));
    if (err <= tol || err <= floor || depth >= max_depth) {
        if (err > tol && err > floor) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "adaptive quadrature did not converge on [%g, %g]; achieved "
                          "estimate %.3g > tolerance %.3g",
                          a, b, err, tol);
            throw QuadratureError(msg, err);
        }
        out.value += halves;
        out.error_estimate += err;
        return;
    }
    adaptive_rec(f, a, m, 0.5 * tol, scale, depth + 1, max_depth, out);
    adaptive_rec(f, m, b, 0.5 * tol, scale, depth + 1, max_depth, out);
}

}  // namespace detail

// Recursive bisection on a 15-point Gauss rule, absolute tolerance.
template <class F>
AdaptiveResult adaptive(const F& f, double a, double b, double abs_tol = 1e-10,
                        int max_depth = 40) {
    AdaptiveResult out;
    if (!(b > a)) return out;
    const double scale = std::abs(fixed(f, a, b)) + 1e-3 * std::abs(abs_tol);
    detail::adaptive_rec(f, a, b, abs_tol, scale, 0, max_depth, out);
    return out;
}

// Adaptive integration with forced subdivision at known breakpoints
// (kinks, jumps, horizon edges). Breakpoints outside (a,b) are ignored.
template <class F>
AdaptiveResult adaptive_split(const F& f, double a, double b,
                              std::vector<double> breaks,
                              double abs_tol = 1e-10, int max_depth = 40) {
    AdaptiveResult out;
    if (!(b > a)) return out;
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> pts;
    for (double t : breaks)
        if (t >= a && t <= b && (pts.empty() || t > pts.back() + 1e-15))
            pts.push_back(t);
    if (pts.front() > a) pts.insert(pts.begin(), a);
    if (pts.back() < b) pts.push_back(b);
    const double per = abs_tol / std::max<size_t>(1, pts.size() - 1);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        auto piece = adaptive(f, pts[i], pts[i + 1], per, max_depth);
        out.value += piece.value;
        out.error_estimate += piece.error_estimate;
    }
    return out;
}

}  // namespace quad
}  // namespace nonloc
