#pragma once

// Rank statistics, correlation coefficients and bootstrap resampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "anemo/error.hpp"
#include "anemo/rng.hpp"
#include "anemo/series.hpp"

namespace anemo {

/**
 * Ranks of a sequence, 1-based, ties resolved by averaging. The rank sum is
 * always n(n+1)/2 and the transform is order-preserving on distinct values.
 */
inline std::vector<double> ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) throw InsufficientDataError("ranks: empty input");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline std::vector<double> ranks(const Series& s) { return ranks(s.span()); }

namespace detail {

inline void require_paired(std::span<const double> x, std::span<const double> y,
                           std::size_t min_n, const char* who) {
    if (x.size() != y.size()) throw DimensionError(std::string(who) + ": length mismatch");
    if (x.size() < min_n)
        throw InsufficientDataError(std::string(who) + ": need at least "
                                    + std::to_string(min_n) + " pairs");
}

}  // namespace detail

/// Pearson product-moment correlation.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    detail::require_paired(x, y, 3, "pearson");
    const std::size_t n = x.size();
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw DegenerateDataError("pearson: zero variance input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double pearson(const Series& x, const Series& y) { return pearson(x.span(), y.span()); }

/// Spearman rank correlation: Pearson on the average-rank transforms.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    detail::require_paired(x, y, 3, "spearman");
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    try {
        return pearson(rx, ry);
    } catch (const DegenerateDataError&) {
        throw DegenerateDataError("spearman: all ranks tied");
    }
}

inline double spearman(const Series& x, const Series& y) { return spearman(x.span(), y.span()); }

namespace detail {

// Counts inversions in ys by merge sort; used by the O(n log n) tau path.
inline std::uint64_t merge_count_inversions(std::vector<double>& ys, std::vector<double>& buf,
                                            std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = merge_count_inversions(ys, buf, lo, mid)
                        + merge_count_inversions(ys, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (ys[j] < ys[i]) {
            count += mid - i;
            buf[k++] = ys[j++];
        } else {
            buf[k++] = ys[i++];
        }
    }
    while (i < mid) buf[k++] = ys[i++];
    while (j < hi) buf[k++] = ys[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
              buf.begin() + static_cast<std::ptrdiff_t>(hi),
              ys.begin() + static_cast<std::ptrdiff_t>(lo));
    return count;
}

template <typename Counter>
std::uint64_t tied_pair_count(std::vector<double> v, Counter&& key_of_group) {
    std::sort(v.begin(), v.end());
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const std::uint64_t g = j - i + 1;
        total += key_of_group(g);
        i = j + 1;
    }
    return total;
}

}  // namespace detail

/**
 * Kendall tau-b (tie-corrected) by Knight's O(n log n) merge-count method:
 *   tau_b = (n_c - n_d) / sqrt((n0 - n1)(n0 - n2)),
 * with n0 = n(n-1)/2 and n1, n2 the tied-pair counts in x and y.
 */
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
    detail::require_paired(x, y, 2, "kendall_tau");
    const std::size_t n = x.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    const auto pairs_in = [](std::uint64_t g) { return g * (g - 1) / 2; };
    const std::uint64_t n0 = pairs_in(n);
    const std::uint64_t n1 =
        detail::tied_pair_count(std::vector<double>(x.begin(), x.end()), pairs_in);
    const std::uint64_t n2 =
        detail::tied_pair_count(std::vector<double>(y.begin(), y.end()), pairs_in);

    // joint ties (pairs tied in both x and y)
    std::uint64_t n3 = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && x[order[j + 1]] == x[order[i]] && y[order[j + 1]] == y[order[i]])
                ++j;
            n3 += pairs_in(j - i + 1);
            i = j + 1;
        }
    }

    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    const std::uint64_t discordant = detail::merge_count_inversions(ys, buf, 0, n);

    // merge-count over x-sorted y counts swaps = discordant pairs; pairs tied
    // only in y among distinct x are neither concordant nor discordant
    const double denom_x = static_cast<double>(n0 - n1);
    const double denom_y = static_cast<double>(n0 - n2);
    if (denom_x <= 0.0 || denom_y <= 0.0)
        throw DegenerateDataError("kendall_tau: a margin is entirely tied");
    const double nc_minus_nd = static_cast<double>(n0) - static_cast<double>(n1)
        - static_cast<double>(n2) + static_cast<double>(n3)
        - 2.0 * static_cast<double>(discordant);
    return std::clamp(nc_minus_nd / std::sqrt(denom_x * denom_y), -1.0, 1.0);
}

inline double kendall_tau(const Series& x, const Series& y) {
    return kendall_tau(x.span(), y.span());
}

/// Pseudo-observations: per column, rank_i / (n+1), strictly inside (0,1).
inline std::vector<std::pair<double, double>>
pobs(std::span<const std::pair<double, double>> pairs) {
    const std::size_t n = pairs.size();
    if (n < 2) throw InsufficientDataError("pobs: need at least 2 pairs");
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = pairs[i].first;
        ys[i] = pairs[i].second;
    }
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    std::vector<std::pair<double, double>> out(n);
    const double denom = static_cast<double>(n) + 1.0;
    for (std::size_t i = 0; i < n; ++i) out[i] = {rx[i] / denom, ry[i] / denom};
    return out;
}

/**
 * Large-sample standard error of a correlation estimate:
 * sqrt((1 - r^2) / (n - 2)).
 */
inline double corr_std_error(double r, std::size_t n) {
    if (!(r >= -1.0 && r <= 1.0)) throw DomainError("corr_std_error: requires |r| <= 1");
    if (n < 3) throw InsufficientDataError("corr_std_error: need n >= 3");
    return std::sqrt((1.0 - r * r) / static_cast<double>(n - 2));
}

/**
 * With-replacement bootstrap: n_boot values of @p statistic evaluated on
 * resamples of @p s. Fully determined by the seed of @p rng.
 */
inline std::vector<double> bootstrap(const Series& s,
                                     const std::function<double(const Series&)>& statistic,
                                     std::size_t n_boot, Rng& rng) {
    if (n_boot == 0) throw DomainError("bootstrap: n_boot must be >= 1");
    const std::size_t n = s.size();
    std::vector<double> out;
    out.reserve(n_boot);
    std::vector<double> resample(n);
    for (std::size_t b = 0; b < n_boot; ++b) {
        for (std::size_t i = 0; i < n; ++i) resample[i] = s[rng.integer(n)];
        out.push_back(statistic(Series(resample)));
    }
    return out;
}

}  // namespace anemo
