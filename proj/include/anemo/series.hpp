#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anemo/error.hpp"

namespace anemo {

/**
 * An immutable sequence of finite real observations.
 *
 * Construction rejects NaN/inf and empty input outright; nothing is dropped
 * silently, so downstream code can assume clean data.
 */
class Series {
  public:
    explicit Series(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw InsufficientDataError("Series: empty input");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                throw DomainError("Series: non-finite value at index " + std::to_string(i));
        }
    }

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::span<const double> span() const { return values_; }

    [[nodiscard]] auto begin() const { return values_.begin(); }
    [[nodiscard]] auto end() const { return values_.end(); }

  private:
    std::vector<double> values_;
};

/// Summary statistics in the layout of a wind-speed data description table.
struct Descriptive {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;          // sample (n-1 divisor)
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double skewness = 0.0;         // standardized third central moment
    double excess_kurtosis = 0.0;  // standardized fourth central moment - 3
    double std_error_mean = 0.0;   // std_dev / sqrt(n)
    bool degenerate = false;       // zero variance: shape moments undefined
};

inline double median_of_sorted(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    return (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw InsufficientDataError("mean: empty input");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_std_dev(std::span<const double> xs) {
    if (xs.size() < 2) throw InsufficientDataError("sample_std_dev: need at least 2 values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/**
 * Descriptive summary of a series. Skewness and kurtosis are the moment
 * (population) estimators m3/m2^1.5 and m4/m2^2 - 3; a zero-variance series
 * is flagged degenerate and its shape moments are reported as 0.
 */
inline Descriptive describe(const Series& s) {
    if (s.size() < 2) throw InsufficientDataError("describe: need at least 2 observations");
    Descriptive d;
    d.n = s.size();
    const double n = static_cast<double>(d.n);
    d.mean = mean(s.span());

    double m2 = 0.0, m3 = 0.0, m4 = 0.0, ss = 0.0;
    for (double x : s) {
        const double dx = x - d.mean;
        m2 += dx * dx;
        m3 += dx * dx * dx;
        m4 += dx * dx * dx * dx;
    }
    ss = m2;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    d.std_dev = std::sqrt(ss / (n - 1.0));
    d.std_error_mean = d.std_dev / std::sqrt(n);

    std::vector<double> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    d.min = sorted.front();
    d.max = sorted.back();
    d.median = median_of_sorted(sorted);

    if (m2 <= 0.0) {
        d.degenerate = true;
    } else {
        d.skewness = m3 / std::pow(m2, 1.5);
        d.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return d;
}

}  // namespace anemo
