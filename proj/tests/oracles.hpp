// Test-only reference implementations, kept independent of the library's
// quadrature and operator code paths on purpose.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

// Adaptive Simpson with explicit recursion; endpoints may be nudged inward to
// dodge an integrable endpoint singularity.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-11, int depth = 48) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integrates over [a, b] with an integrable singularity at the left endpoint
// by geometric subintervals shrinking toward a.
inline double singular_left_integral(const std::function<double(double)>& f, double a, double b,
                                     double tol = 1e-11) {
    double total = 0.0;
    double hi = b;
    double len = (b - a);
    for (int k = 0; k < 60 && len > 1e-15 * (b - a); ++k) {
        len *= 0.5;
        const double lo = a + len;
        total += adaptive_simpson(f, lo, hi, tol * 0.1);
        hi = lo;
    }
    return total;
}

// Central finite-difference gradient of a scalar function of a vector.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double step = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fmv = f(x);
        x[i] = xi;
        g[i] = (fp - fmv) / (2.0 * h);
    }
    return g;
}

// Derivative-free cyclic coordinate search with shrinking steps. Slow and
// dumb on purpose: a brute-force check of the gradient-based solver.
inline std::vector<double> coordinate_search(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double step = 0.5, double final_step = 1e-9) {
    double fx = f(x);
    while (step > final_step) {
        bool improved = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (const double d : {step, -step}) {
                x[i] += d;
                const double ft = f(x);
                if (ft < fx) {
                    fx = ft;
                    improved = true;
                } else {
                    x[i] -= d;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}

} // namespace oracles
