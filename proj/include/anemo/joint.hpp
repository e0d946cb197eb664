#pragma once

// Composition of two fitted marginals and a fitted copula into a bivariate
// distribution: joint CDF/PDF, conditional probabilities, simulation and
// simulation-based goodness of fit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "anemo/copulas.hpp"
#include "anemo/error.hpp"
#include "anemo/marginals.hpp"
#include "anemo/rng.hpp"
#include "anemo/stats.hpp"

namespace anemo {

/// Two marginal fits plus a copula fit: joint_cdf(x,y) = C(F1(x), F2(y)).
struct JointModel {
    MarginalFit marginal_1;
    MarginalFit marginal_2;
    CopulaFit copula;
    std::string label_1 = "x";
    std::string label_2 = "y";
};

inline JointModel build_joint(MarginalFit m1, MarginalFit m2, CopulaFit cop,
                              std::string label_1 = "x", std::string label_2 = "y") {
    m1.dist.validate();
    m2.dist.validate();
    cop.spec.validate();
    return {std::move(m1), std::move(m2), std::move(cop),
            std::move(label_1), std::move(label_2)};
}

inline double joint_cdf(const JointModel& j, double x, double y) {
    const double u = x == std::numeric_limits<double>::infinity() ? 1.0 : cdf(j.marginal_1.dist, x);
    const double v = y == std::numeric_limits<double>::infinity() ? 1.0 : cdf(j.marginal_2.dist, y);
    return copula_cdf(j.copula.spec, u, v);
}

inline double joint_pdf(const JointModel& j, double x, double y) {
    const double u = cdf(j.marginal_1.dist, x);
    const double v = cdf(j.marginal_2.dist, y);
    return copula_pdf(j.copula.spec, u, v) * pdf(j.marginal_1.dist, x) * pdf(j.marginal_2.dist, y);
}

/// The Sklar conditional/joint corollaries, keyed by the identity they
/// compute (probabilities over the events {X<=x}/{X>x} and {Y<=y}/{Y>y},
/// plus the two conditionals).
enum class JointProbability {
    both_below = 32,          // P(X<=x, Y<=y)
    x_below_y_above = 33,     // P(X<=x, Y>y)
    x_above_y_below = 34,     // P(X>x, Y<=y)
    below_given_below = 35,   // P(X<=x | Y<=y)
    below_given_above = 36,   // P(X<=x | Y>y)
    below_given_equal = 37    // P(X<=x | Y=y) = dC/dv at (F1(x), F2(y))
};

inline double conditional(const JointModel& j, JointProbability kind, double x, double y) {
    const double u = cdf(j.marginal_1.dist, x);
    const double v = cdf(j.marginal_2.dist, y);
    const double c = copula_cdf(j.copula.spec, u, v);
    switch (kind) {
        case JointProbability::both_below:
            return c;
        case JointProbability::x_below_y_above:
            return u - c;
        case JointProbability::x_above_y_below:
            return v - c;
        case JointProbability::below_given_below:
            if (v <= 0.0) throw DomainError("conditional: P(Y<=y) is zero");
            return c / v;
        case JointProbability::below_given_above:
            if (v >= 1.0) throw DomainError("conditional: P(Y>y) is zero");
            return (u - c) / (1.0 - v);
        case JointProbability::below_given_equal:
            return copula_h(j.copula.spec, u, v);
    }
    throw DomainError("conditional: unknown kind");
}

/// n pairs (x, y) = (quantile_1(u), quantile_2(v)) with (u,v) drawn from
/// the copula. Deterministic for a fixed seed.
inline std::vector<std::pair<double, double>> joint_sample(const JointModel& j, std::size_t n,
                                                           Rng& rng) {
    auto uv = copula_sample(j.copula.spec, n, rng);
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (const auto& [u, v] : uv)
        out.emplace_back(quantile(j.marginal_1.dist, u), quantile(j.marginal_2.dist, v));
    return out;
}

/// Real-vs-simulated comparison: Spearman correlations with standard
/// errors, plus sorted-quantile pairings per margin for Q-Q plot data.
struct GofReport {
    double spearman_real = 0.0;
    double spearman_sim = 0.0;
    double se_real = 0.0;
    double se_sim = 0.0;
    std::size_t n_real = 0;
    std::size_t n_sim = 0;
    std::vector<std::pair<double, double>> qq_margin_1;  // (simulated, real) quantiles
    std::vector<std::pair<double, double>> qq_margin_2;
};

namespace detail {

// Q-Q pairing of two samples: both sorted; the shorter side is walked with
// interpolated order statistics when lengths differ.
inline std::vector<std::pair<double, double>> qq_pairing(std::vector<double> sim,
                                                         std::vector<double> real) {
    std::sort(sim.begin(), sim.end());
    std::sort(real.begin(), real.end());
    const std::size_t n = std::min(sim.size(), real.size());
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    const auto pick = [](const std::vector<double>& v, double q) {
        const double pos = q * (static_cast<double>(v.size()) - 1.0);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double q = n == 1 ? 0.5 : static_cast<double>(i) / (static_cast<double>(n) - 1.0);
        out.emplace_back(pick(sim, q), pick(real, q));
    }
    return out;
}

}  // namespace detail

/**
 * Goodness of fit by simulation: draws n_sim fresh pairs from the model,
 * then reports Spearman correlation and its standard error for both the
 * real pairs and the simulation, with Q-Q pairing data per margin.
 * n_sim = 0 defaults to the size of the real data.
 */
inline GofReport gof(const JointModel& j, std::span<const std::pair<double, double>> real_pairs,
                     std::size_t n_sim, Rng& rng) {
    if (real_pairs.empty()) throw InsufficientDataError("gof: no real pairs");
    if (n_sim == 0) n_sim = real_pairs.size();

    std::vector<double> rx, ry;
    rx.reserve(real_pairs.size());
    ry.reserve(real_pairs.size());
    for (const auto& [x, y] : real_pairs) {
        rx.push_back(x);
        ry.push_back(y);
    }
    const auto sim = joint_sample(j, n_sim, rng);
    std::vector<double> sx, sy;
    sx.reserve(n_sim);
    sy.reserve(n_sim);
    for (const auto& [x, y] : sim) {
        sx.push_back(x);
        sy.push_back(y);
    }

    GofReport report;
    report.n_real = real_pairs.size();
    report.n_sim = n_sim;
    report.spearman_real = spearman(rx, ry);
    report.spearman_sim = spearman(sx, sy);
    report.se_real = corr_std_error(report.spearman_real, report.n_real);
    report.se_sim = corr_std_error(report.spearman_sim, report.n_sim);
    report.qq_margin_1 = detail::qq_pairing(std::move(sx), std::move(rx));
    report.qq_margin_2 = detail::qq_pairing(std::move(sy), std::move(ry));
    return report;
}

}  // namespace anemo
