#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "anemo/error.hpp"

namespace anemo {

struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double spread_tol = 1e-9;      // stop when max|f_i - f_best| drops below this
    std::size_t max_evaluations = 4000;
    double initial_step = 0.25;    // simplex edge length per coordinate
};

/**
 * Nelder-Mead downhill simplex minimization (standard 1/2/0.5/0.5
 * reflection/expansion/contraction/shrink coefficients). Intended for the
 * low-dimensional bounded-transform likelihood surfaces in this library;
 * callers needing robustness should restart from perturbed points and
 * compare (see copula_fit).
 */
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0,
                                    const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    if (n == 0) throw DomainError("nelder_mead: empty start point");

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;

    NelderMeadResult res;
    std::vector<double> fval(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fval[i] = f(simplex[i]);
        ++res.evaluations;
    }

    const auto order = [&] {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = i + 1; j <= n; ++j)
                if (fval[j] < fval[i]) {
                    std::swap(fval[i], fval[j]);
                    std::swap(simplex[i], simplex[j]);
                }
    };
    order();

    while (res.evaluations < opt.max_evaluations) {
        double spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i) spread = std::max(spread, fval[i] - fval[0]);
        if (spread < opt.spread_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

        const auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };

        auto reflected = blend(-1.0);
        const double fr = f(reflected);
        ++res.evaluations;
        if (fr < fval[0]) {
            auto expanded = blend(-2.0);
            const double fe = f(expanded);
            ++res.evaluations;
            if (fe < fr) {
                simplex[n] = std::move(expanded);
                fval[n] = fe;
            } else {
                simplex[n] = std::move(reflected);
                fval[n] = fr;
            }
        } else if (fr < fval[n - 1]) {
            simplex[n] = std::move(reflected);
            fval[n] = fr;
        } else {
            const bool outside = fr < fval[n];
            auto contracted = blend(outside ? -0.5 : 0.5);
            const double fc = f(contracted);
            ++res.evaluations;
            if (fc < std::min(fr, fval[n])) {
                simplex[n] = std::move(contracted);
                fval[n] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fval[i] = f(simplex[i]);
                    ++res.evaluations;
                }
            }
        }
        order();
    }

    res.x = simplex[0];
    res.fmin = fval[0];
    return res;
}

/**
 * Root of a continuous monotone-ish function on [a, b] by bisection with a
 * secant acceleration step. Requires f(a) and f(b) to bracket zero.
 */
inline double find_root(const std::function<double(double)>& f, double a, double b,
                        double xtol = 1e-12, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw NumericalError("find_root: interval does not bracket a root");
    for (int i = 0; i < max_iter; ++i) {
        // secant proposal, clipped into the bracket; fall back to midpoint
        double m = b - fb * (b - a) / (fb - fa);
        const double mid = 0.5 * (a + b);
        if (!(m > std::min(a, b) && m < std::max(a, b))) m = mid;
        if (std::fabs(m - mid) > 0.4 * std::fabs(b - a)) m = mid;
        const double fm = f(m);
        if (fm == 0.0 || std::fabs(b - a) < xtol * (1.0 + std::fabs(m))) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace anemo
