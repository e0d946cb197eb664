#pragma once

// Maximum-likelihood fitting of the candidate marginal families, with
// information criteria, standard errors from the observed information, and
// the skewness-kurtosis (Cullen-Frey) diagnostic data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "anemo/distributions.hpp"
#include "anemo/error.hpp"
#include "anemo/rng.hpp"
#include "anemo/series.hpp"
#include "anemo/special_functions.hpp"
#include "anemo/stats.hpp"

namespace anemo {

struct MarginalFit {
    Distribution dist;
    double loglik = 0.0;
    double aic = 0.0;   // -2 loglik + 2k, k = 2
    double bic = 0.0;   // -2 loglik + ln(n) k
    double se1 = 0.0;   // standard error of p1
    double se2 = 0.0;   // standard error of p2
    std::size_t n = 0;
};

namespace detail {

inline void require_positive_data(std::span<const double> xs, const char* who) {
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!(xs[i] > 0.0))
            throw DomainError(std::string(who) + ": nonpositive value at index "
                              + std::to_string(i));
}

// Weibull shape equation g(a) = sum(x^a ln x)/sum(x^a) - 1/a - mean(ln x),
// increasing in a; solved by safeguarded Newton with bracket expansion.
inline double weibull_shape_mle(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<double> lx(n);
    double mean_lx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(xs[i]);
        mean_lx += lx[i];
    }
    mean_lx /= static_cast<double>(n);

    const auto g_and_dg = [&](double a, double& g, double& dg) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::exp(a * lx[i]);
            s0 += w;
            s1 += w * lx[i];
            s2 += w * lx[i] * lx[i];
        }
        g = s1 / s0 - 1.0 / a - mean_lx;
        dg = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (a * a);
    };

    double sd_lx = 0.0;
    for (double l : lx) sd_lx += (l - mean_lx) * (l - mean_lx);
    sd_lx = std::sqrt(sd_lx / static_cast<double>(n));
    if (sd_lx <= 0.0) throw DegenerateDataError("weibull fit: constant data");

    double a = 1.2 / sd_lx;
    double lo = 1e-8, hi = a;
    double g, dg;
    g_and_dg(hi, g, dg);
    int guard = 0;
    while (g < 0.0) {
        hi *= 2.0;
        g_and_dg(hi, g, dg);
        if (++guard > 200) throw NumericalError("weibull fit: shape bracket expansion failed");
    }
    for (int iter = 0; iter < 200; ++iter) {
        g_and_dg(a, g, dg);
        if (g > 0.0) hi = a; else lo = a;
        double next = a - g / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - a) < 1e-12 * (1.0 + a)) return next;
        a = next;
    }
    return a;
}

// Gamma shape by Newton on ln(a) - psi(a) = s, with the Minka-style start.
inline double gamma_shape_mle(double s) {
    if (!(s > 0.0)) throw DegenerateDataError("gamma fit: constant data");
    double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int iter = 0; iter < 100; ++iter) {
        const double f = std::log(a) - digamma(a) - s;
        const double df = 1.0 / a - trigamma(a);
        const double next = a - f / df;
        if (!(next > 0.0)) {
            a *= 0.5;
            continue;
        }
        if (std::fabs(next - a) < 1e-13 * (1.0 + a)) return next;
        a = next;
    }
    return a;
}

inline double total_loglik(const Distribution& d, std::span<const double> xs) {
    double ll = 0.0;
    for (double x : xs) ll += log_pdf(d, x);
    return ll;
}

// Standard errors from the inverse observed information (2x2 numeric
// Hessian of -loglik at the optimum, central differences).
inline std::pair<double, double> observed_information_se(const Distribution& fit,
                                                         std::span<const double> xs) {
    const auto nll = [&](double p1, double p2) {
        Distribution d = fit;
        d.p1 = p1;
        d.p2 = p2;
        return -total_loglik(d, xs);
    };
    const double h1 = 1e-4 * std::max(std::fabs(fit.p1), 1e-3);
    const double h2 = 1e-4 * std::max(std::fabs(fit.p2), 1e-3);
    const double f0 = nll(fit.p1, fit.p2);
    const double h11 = (nll(fit.p1 + h1, fit.p2) - 2.0 * f0 + nll(fit.p1 - h1, fit.p2)) / (h1 * h1);
    const double h22 = (nll(fit.p1, fit.p2 + h2) - 2.0 * f0 + nll(fit.p1, fit.p2 - h2)) / (h2 * h2);
    const double h12 = (nll(fit.p1 + h1, fit.p2 + h2) - nll(fit.p1 + h1, fit.p2 - h2)
                        - nll(fit.p1 - h1, fit.p2 + h2) + nll(fit.p1 - h1, fit.p2 - h2))
                       / (4.0 * h1 * h2);
    const double det = h11 * h22 - h12 * h12;
    if (!(det > 0.0) || !(h11 > 0.0)) return {0.0, 0.0};  // not locally convex: no SEs
    return {std::sqrt(h22 / det), std::sqrt(h11 / det)};
}

}  // namespace detail

/**
 * Maximum-likelihood fit of one marginal family to positive data.
 *
 * Weibull: 1-D profile equation for the shape (safeguarded Newton), scale
 * in closed form. Gamma: Newton on the digamma equation. Lognormal: closed
 * form on logs (sigma with the n divisor, the MLE). AIC/BIC use k = 2.
 */
inline MarginalFit fit_marginal(DistributionKind kind, const Series& data) {
    if (data.size() < 10)
        throw InsufficientDataError("fit_marginal: need at least 10 observations");
    detail::require_positive_data(data.span(), "fit_marginal");
    const std::size_t n = data.size();
    const double nd = static_cast<double>(n);

    Distribution d;
    d.kind = kind;
    switch (kind) {
        case DistributionKind::weibull: {
            d.p1 = detail::weibull_shape_mle(data.span());
            double s = 0.0;
            for (double x : data) s += std::pow(x, d.p1);
            d.p2 = std::pow(s / nd, 1.0 / d.p1);
            break;
        }
        case DistributionKind::gamma: {
            const double m = mean(data.span());
            double mean_lx = 0.0;
            for (double x : data) mean_lx += std::log(x);
            mean_lx /= nd;
            d.p1 = detail::gamma_shape_mle(std::log(m) - mean_lx);
            d.p2 = d.p1 / m;
            break;
        }
        case DistributionKind::lognormal: {
            double mu = 0.0;
            for (double x : data) mu += std::log(x);
            mu /= nd;
            double ss = 0.0;
            for (double x : data) ss += (std::log(x) - mu) * (std::log(x) - mu);
            d.p1 = mu;
            d.p2 = std::sqrt(ss / nd);
            if (!(d.p2 > 0.0)) throw DegenerateDataError("lognormal fit: constant data");
            break;
        }
    }

    MarginalFit fit;
    fit.dist = d;
    fit.n = n;
    fit.loglik = detail::total_loglik(d, data.span());
    fit.aic = -2.0 * fit.loglik + 2.0 * 2.0;
    fit.bic = -2.0 * fit.loglik + std::log(nd) * 2.0;
    std::tie(fit.se1, fit.se2) = detail::observed_information_se(d, data.span());
    return fit;
}

/// One skewness-squared / kurtosis coordinate (kurtosis non-excess).
struct MomentPoint {
    double skewness_sq = 0.0;
    double kurtosis = 0.0;
};

struct CullenFreyData {
    MomentPoint observed;
    std::vector<MomentPoint> bootstrap_points;
    MomentPoint normal_marker{0.0, 3.0};
    MomentPoint exponential_marker{4.0, 9.0};
    std::vector<MomentPoint> gamma_curve;      // kurt = 3 + 1.5 skew^2
    std::vector<MomentPoint> lognormal_curve;  // parametric in sigma
};

/**
 * Skewness-kurtosis diagnostic data: the observed moment point, a seeded
 * bootstrap cloud showing its sampling variability, and the theoretical
 * markers/curves of the candidate families.
 */
inline CullenFreyData cullen_frey(const Series& data, std::size_t n_boot, Rng& rng) {
    if (data.size() < 10) throw InsufficientDataError("cullen_frey: need at least 10 observations");
    const auto point_of = [](const Series& s) {
        const Descriptive d = describe(s);
        if (d.degenerate) throw DegenerateDataError("cullen_frey: zero variance");
        return MomentPoint{d.skewness * d.skewness, d.excess_kurtosis + 3.0};
    };

    CullenFreyData out;
    out.observed = point_of(data);
    out.bootstrap_points.reserve(n_boot);
    std::vector<double> resample(data.size());
    for (std::size_t b = 0; b < n_boot; ++b) {
        for (std::size_t i = 0; i < data.size(); ++i) resample[i] = data[rng.integer(data.size())];
        out.bootstrap_points.push_back(point_of(Series(resample)));
    }

    for (int i = 0; i <= 60; ++i) {
        const double s2 = 0.05 * i * 0.05 * i * 4.0;  // skewness^2 from 0 to 36
        out.gamma_curve.push_back({s2, 3.0 + 1.5 * s2});
    }
    for (int i = 1; i <= 60; ++i) {
        const double sigma2 = 0.0005 * i * i;  // dense near 0 where the curve bends
        const double w = std::exp(sigma2);
        const double skew = (w + 2.0) * std::sqrt(w - 1.0);
        const double kurt = w * w * w * w + 2.0 * w * w * w + 3.0 * w * w - 3.0;
        if (skew * skew > 40.0) break;
        out.lognormal_curve.push_back({skew * skew, kurt});
    }
    return out;
}

/// Result of comparing several candidate families on the same data.
struct FitComparison {
    std::vector<MarginalFit> fits;                          // sorted by BIC ascending
    std::vector<std::pair<DistributionKind, std::string>> failures;
};

/**
 * Fits every requested family and ranks the successes by BIC (ascending);
 * per-family failures are collected rather than aborting the comparison.
 */
inline FitComparison compare_fits(const Series& data,
                                  const std::vector<DistributionKind>& kinds) {
    FitComparison out;
    for (DistributionKind kind : kinds) {
        try {
            out.fits.push_back(fit_marginal(kind, data));
        } catch (const Error& e) {
            out.failures.emplace_back(kind, e.what());
        }
    }
    std::sort(out.fits.begin(), out.fits.end(),
              [](const MarginalFit& a, const MarginalFit& b) { return a.bic < b.bic; });
    return out;
}

/// Plot-ready series describing how one fit tracks the data.
struct FitInspection {
    std::vector<double> grid;            // abscissa over the data range
    std::vector<double> fitted_pdf;      // density on the grid
    std::vector<double> fitted_cdf;      // CDF on the grid
    std::vector<double> empirical_cdf;   // step ECDF on the grid
    std::vector<double> sorted_data;     // QQ/PP ordinates
    std::vector<double> theoretical_q;   // quantile at (i-0.5)/n
    std::vector<double> theoretical_p;   // cdf at sorted data
    std::vector<double> empirical_p;     // (i-0.5)/n
};

inline FitInspection fit_inspection(const Series& data, const MarginalFit& fit,
                                    std::size_t grid_points = 201) {
    FitInspection out;
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    const double nd = static_cast<double>(sorted.size());
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        out.grid.push_back(x);
        out.fitted_pdf.push_back(pdf(fit.dist, x));
        out.fitted_cdf.push_back(cdf(fit.dist, x));
        const auto count = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        out.empirical_cdf.push_back(static_cast<double>(count) / nd);
    }
    out.sorted_data = sorted;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / nd;
        out.theoretical_q.push_back(quantile(fit.dist, p));
        out.theoretical_p.push_back(cdf(fit.dist, sorted[i]));
        out.empirical_p.push_back(p);
    }
    return out;
}

}  // namespace anemo
