#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "anemo/error.hpp"

namespace anemo {

/// Nodes and weights for n-point Gauss-Legendre quadrature on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/**
 * Computes (and caches) the n-point Gauss-Legendre rule. Nodes are the
 * roots of P_n found by Newton iteration from the Chebyshev initial guess;
 * accurate to machine precision for the sizes used here (n <= 128).
 */
inline const GaussLegendreRule& gauss_legendre_rule(std::size_t n) {
    static std::map<std::size_t, GaussLegendreRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        // Chebyshev guess for the i-th root of P_n
        double x = std::cos(3.14159265358979323846 * (static_cast<double>(i) + 0.75)
                            / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // evaluate P_n(x) and P'_n(x) by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
template <typename F>
double gauss_legendre_integrate(F&& f, double a, double b, std::size_t n) {
    const auto& rule = gauss_legendre_rule(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

/// Product-rule integral of f(x, y) over [ax,bx] x [ay,by], n x n points.
template <typename F>
double gauss_legendre_integrate_2d(F&& f, double ax, double bx, double ay, double by,
                                   std::size_t n) {
    const auto& rule = gauss_legendre_rule(n);
    const double hx = 0.5 * (bx - ax), mx = 0.5 * (ax + bx);
    const double hy = 0.5 * (by - ay), my = 0.5 * (ay + by);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mx + hx * rule.nodes[i];
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += rule.weights[j] * f(x, my + hy * rule.nodes[j]);
        }
        sum += rule.weights[i] * row;
    }
    return sum * hx * hy;
}

namespace detail {

template <typename F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson integration with Richardson error control.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace anemo
