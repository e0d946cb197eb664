#pragma once

// Feature screening and conditioning: correlation matrix, high-correlation
// pruning, VIF-driven collinearity elimination, min-max scaling, seeded
// train/test splitting, and chi-squared Q-Q data for a multivariate
// normality check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anemo/dataset.hpp"
#include "anemo/error.hpp"
#include "anemo/matrix.hpp"
#include "anemo/rng.hpp"
#include "anemo/special_functions.hpp"
#include "anemo/stats.hpp"

namespace anemo {

enum class CorrelationMethod { spearman, pearson, kendall };

inline const char* to_string(CorrelationMethod m) {
    switch (m) {
        case CorrelationMethod::spearman: return "spearman";
        case CorrelationMethod::pearson: return "pearson";
        case CorrelationMethod::kendall: return "kendall";
    }
    return "?";
}

inline double correlate(std::span<const double> x, std::span<const double> y,
                        CorrelationMethod method) {
    switch (method) {
        case CorrelationMethod::spearman: return spearman(x, y);
        case CorrelationMethod::pearson: return pearson(x, y);
        case CorrelationMethod::kendall: return kendall_tau(x, y);
    }
    throw DomainError("correlate: unknown method");
}

/// p x p correlation matrix of all dataset columns. Symmetric with a unit
/// diagonal by construction; a constant column is reported by name.
inline Matrix correlation_matrix(const Dataset& d, CorrelationMethod method) {
    if (d.n_rows() < 3) throw InsufficientDataError("correlation_matrix: need n >= 3 rows");
    const std::size_t p = d.n_cols();
    for (std::size_t j = 0; j < p; ++j) {
        const auto& col = d.column(j);
        if (std::all_of(col.begin(), col.end(), [&](double x) { return x == col.front(); }))
            throw DegenerateDataError("correlation_matrix: constant column '"
                                      + d.column_names()[j] + "'");
    }
    Matrix c(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        c(i, i) = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) {
            const double r = correlate(d.column(i), d.column(j), method);
            c(i, j) = r;
            c(j, i) = r;
        }
    }
    return c;
}

struct PruneRecord {
    std::string removed;
    std::string against;   // the partner column that was kept
    double correlation = 0.0;
};

/**
 * Removes one column of every predictor pair whose |correlation| exceeds
 * @p threshold. The column less correlated (in absolute value) with the
 * response is dropped; without a response, or on an exact tie, the later
 * column of the pair is dropped. The response column itself is never
 * removed. Repeats until no violating pair remains.
 */
inline std::pair<Dataset, std::vector<PruneRecord>>
prune_high_correlation(const Dataset& d, double threshold = 0.9,
                       CorrelationMethod method = CorrelationMethod::spearman) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw DomainError("prune_high_correlation: threshold must be in (0, 1]");
    std::vector<std::string> keep = d.column_names();
    const std::optional<std::string> response = d.response();
    std::vector<PruneRecord> log;

    for (;;) {
        Dataset current = d.select(keep);
        const Matrix corr = correlation_matrix(current, method);
        double worst = threshold;
        std::size_t wi = 0, wj = 0;
        bool found = false;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (response && keep[i] == *response) continue;
            for (std::size_t j = i + 1; j < keep.size(); ++j) {
                if (response && keep[j] == *response) continue;
                const double a = std::fabs(corr(i, j));
                if (a > worst) {
                    worst = a;
                    wi = i;
                    wj = j;
                    found = true;
                }
            }
        }
        if (!found) break;

        std::size_t drop = wj;  // default: later column goes
        if (response) {
            const auto& y = current.column(*response);
            const double ri = std::fabs(correlate(current.column(wi), y, method));
            const double rj = std::fabs(correlate(current.column(wj), y, method));
            drop = (ri < rj) ? wi : wj;  // keep the one closer to the response
        }
        const std::size_t kept = (drop == wi) ? wj : wi;
        log.push_back({keep[drop], keep[kept], corr(wi, wj)});
        keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    return {d.select(keep), std::move(log)};
}

struct VifEntry {
    std::string column;
    double vif = 0.0;  // +inf sentinel when the predictor set is singular
};

struct VifReport {
    std::vector<VifEntry> entries;
    std::vector<VifEntry> removed;  // elimination log with the triggering VIF
};

/**
 * Variance inflation factors: the diagonal of the inverse of the predictor
 * correlation matrix (equivalently 1/(1-R_j^2) of each predictor regressed
 * on the others). A singular correlation matrix yields +inf sentinels on
 * the implicated columns, located through the eigendecomposition.
 */
inline VifReport vif(const Dataset& predictors) {
    const std::size_t p = predictors.n_cols();
    if (p < 2) throw InsufficientDataError("vif: need at least 2 predictors");
    const Matrix corr = correlation_matrix(predictors, CorrelationMethod::pearson);
    const auto eig = jacobi_eigen(corr);
    constexpr double kSingularEigenvalue = 1e-10;

    VifReport report;
    report.entries.resize(p);
    for (std::size_t j = 0; j < p; ++j) report.entries[j].column = predictors.column_names()[j];

    // VIF_j = sum_k Q_jk^2 / lambda_k; a near-zero eigenvalue marks the
    // columns loading on the null space as perfectly collinear.
    for (std::size_t j = 0; j < p; ++j) {
        double value = 0.0;
        bool singular = false;
        for (std::size_t k = 0; k < p; ++k) {
            const double load = eig.vectors(j, k) * eig.vectors(j, k);
            if (eig.values[k] < kSingularEigenvalue) {
                if (load > 1e-8) singular = true;
                continue;
            }
            value += load / eig.values[k];
        }
        report.entries[j].vif =
            singular ? std::numeric_limits<double>::infinity() : value;
    }
    return report;
}

/**
 * Iteratively removes the predictor with the largest VIF until all values
 * are at or below @p vif_threshold, re-running the VIF computation after
 * every removal. Stops early (with the log so far) when fewer than two
 * predictors would remain.
 */
inline std::pair<Dataset, VifReport>
eliminate_collinear(const Dataset& predictors, double vif_threshold = 5.0) {
    if (!(vif_threshold >= 1.0))
        throw DomainError("eliminate_collinear: threshold must be >= 1");
    std::vector<std::string> keep = predictors.column_names();
    VifReport final_report;

    for (;;) {
        if (keep.size() < 2) {
            // nothing left to test against; report the survivors as-is
            final_report.entries.clear();
            for (const auto& name : keep) final_report.entries.push_back({name, 1.0});
            break;
        }
        const Dataset current = predictors.select(keep);
        VifReport report = vif(current);
        std::size_t worst = 0;
        for (std::size_t j = 1; j < report.entries.size(); ++j)
            if (report.entries[j].vif > report.entries[worst].vif) worst = j;
        if (!(report.entries[worst].vif > vif_threshold)) {
            report.removed = std::move(final_report.removed);
            final_report = std::move(report);
            break;
        }
        final_report.removed.push_back(report.entries[worst]);
        keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    return {predictors.select(keep), std::move(final_report)};
}

/// Per-column (min, max) pairs captured by the forward scaling pass.
struct ScalerParams {
    std::vector<std::string> column_names;
    std::vector<double> mins;
    std::vector<double> maxs;
    std::vector<bool> degenerate;  // constant columns, mapped to 0
};

/// Min-max scaling onto [0,1]. Constant columns map to 0 and are flagged.
inline std::pair<Dataset, ScalerParams> minmax_scale(const Dataset& d) {
    ScalerParams params;
    params.column_names = d.column_names();
    std::vector<std::vector<double>> scaled(d.n_cols());
    for (std::size_t j = 0; j < d.n_cols(); ++j) {
        const auto& col = d.column(j);
        const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
        const double lo = *lo_it, hi = *hi_it;
        params.mins.push_back(lo);
        params.maxs.push_back(hi);
        params.degenerate.push_back(hi == lo);
        scaled[j].resize(col.size());
        if (hi == lo) {
            std::fill(scaled[j].begin(), scaled[j].end(), 0.0);
        } else {
            for (std::size_t i = 0; i < col.size(); ++i)
                scaled[j][i] = (col[i] - lo) / (hi - lo);
        }
    }
    Dataset out(d.column_names(), std::move(scaled));
    if (d.response()) out.set_response(*d.response());
    return {std::move(out), std::move(params)};
}

inline Dataset inverse_scale(const Dataset& d, const ScalerParams& params) {
    if (d.n_cols() != params.mins.size())
        throw DimensionError("inverse_scale: column count differs from scaler");
    std::vector<std::vector<double>> raw(d.n_cols());
    for (std::size_t j = 0; j < d.n_cols(); ++j) {
        const auto& col = d.column(j);
        raw[j].resize(col.size());
        for (std::size_t i = 0; i < col.size(); ++i)
            raw[j][i] = params.mins[j] + col[i] * (params.maxs[j] - params.mins[j]);
    }
    Dataset out(d.column_names(), std::move(raw));
    if (d.response()) out.set_response(*d.response());
    return out;
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
    double test_fraction = 0.0;
};

/**
 * Seeded train/test split: Fisher-Yates shuffle of 0..n-1, the first
 * round(test_fraction * n) indices become the test set. Both sets are
 * returned sorted; they are disjoint and exhaustive by construction.
 */
inline SplitIndices train_test_split(std::size_t n, double test_fraction, Rng& rng) {
    if (n < 2) throw InsufficientDataError("train_test_split: need n >= 2");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw DomainError("train_test_split: test_fraction must be in (0, 1)");
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(n)));
    if (n_test == 0 || n_test == n)
        throw DegenerateDataError("train_test_split: split leaves an empty set");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.integer(i + 1)]);

    SplitIndices split;
    split.seed = rng.seed();
    split.test_fraction = test_fraction;
    split.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

/// One point of chi-squared Q-Q plot data.
struct QqPoint {
    double theoretical = 0.0;  // chi^2_p quantile at (i - 0.5)/n
    double observed = 0.0;     // sorted squared Mahalanobis distance
};

/**
 * Data for the multivariate-normality Q-Q diagnostic: sorted squared
 * Mahalanobis distances against chi-squared quantiles with p degrees of
 * freedom. Normal data tracks the 45-degree line.
 */
inline std::vector<QqPoint> chisq_qq(const Dataset& d) {
    const std::size_t n = d.n_rows();
    const std::size_t p = d.n_cols();
    if (n <= p) throw InsufficientDataError("chisq_qq: need more rows than columns");

    std::vector<double> means(p);
    for (std::size_t j = 0; j < p; ++j) means[j] = mean(d.column(j));

    Matrix cov(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += (d.column(a)[i] - means[a]) * (d.column(b)[i] - means[b]);
            cov(a, b) = cov(b, a) = s / static_cast<double>(n - 1);
        }
    }

    Matrix inv;
    try {
        inv = Cholesky(cov).inverse();
    } catch (const NumericalError&) {
        throw DegenerateDataError(
            "chisq_qq: sample covariance is singular (a column is constant or "
            "linearly dependent on others)");
    }

    std::vector<double> d2(n, 0.0);
    std::vector<double> centered(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) centered[j] = d.column(j)[i] - means[j];
        const auto tmp = inv * centered;
        double q = 0.0;
        for (std::size_t j = 0; j < p; ++j) q += centered[j] * tmp[j];
        d2[i] = q;
    }
    std::sort(d2.begin(), d2.end());

    std::vector<QqPoint> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        out[i] = {chi_squared_quantile(static_cast<double>(p), prob), d2[i]};
    }
    return out;
}

}  // namespace anemo
