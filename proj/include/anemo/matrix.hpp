#pragma once

// Small dense matrix support for the regression / preprocessing code.
// Problem sizes here are tiny (p rarely above a few dozen columns), so the
// implementations favour robustness and testability over asymptotics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "anemo/error.hpp"

namespace anemo {

class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    [[nodiscard]] Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    [[nodiscard]] Matrix operator*(const Matrix& rhs) const {
        if (cols_ != rhs.rows_) throw DimensionError("Matrix multiply: inner dimensions differ");
        Matrix out(rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
            }
        }
        return out;
    }

    [[nodiscard]] std::vector<double> operator*(const std::vector<double>& v) const {
        if (cols_ != v.size()) throw DimensionError("Matrix-vector multiply: size mismatch");
        std::vector<double> out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Cholesky factorization A = L L^T of a symmetric positive-definite matrix.
/// Throws NumericalError when a pivot drops below the definiteness tolerance.
class Cholesky {
  public:
    explicit Cholesky(const Matrix& a, double tol = 1e-12) : n_(a.rows()), l_(a.rows(), a.rows()) {
        if (a.rows() != a.cols()) throw DimensionError("Cholesky: matrix not square");
        double max_diag = 0.0;
        for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::fabs(a(i, i)));
        for (std::size_t j = 0; j < n_; ++j) {
            double d = a(j, j);
            for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
            if (!(d > tol * std::max(max_diag, 1.0)))
                throw NumericalError("Cholesky: matrix not positive definite at pivot "
                                     + std::to_string(j));
            l_(j, j) = std::sqrt(d);
            for (std::size_t i = j + 1; i < n_; ++i) {
                double s = a(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / l_(j, j);
            }
        }
    }

    [[nodiscard]] std::vector<double> solve(std::vector<double> b) const {
        if (b.size() != n_) throw DimensionError("Cholesky::solve: size mismatch");
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t k = 0; k < i; ++k) b[i] -= l_(i, k) * b[k];
            b[i] /= l_(i, i);
        }
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t k = i + 1; k < n_; ++k) b[i] -= l_(k, i) * b[k];
            b[i] /= l_(i, i);
        }
        return b;
    }

    [[nodiscard]] Matrix inverse() const {
        Matrix inv(n_, n_);
        for (std::size_t j = 0; j < n_; ++j) {
            std::vector<double> e(n_, 0.0);
            e[j] = 1.0;
            const auto col = solve(std::move(e));
            for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
        }
        return inv;
    }

  private:
    std::size_t n_;
    Matrix l_;
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k]
};

/**
 * Cyclic Jacobi eigendecomposition of a symmetric matrix. Converges to
 * machine precision for the small matrices used here; eigenvalues are
 * returned ascending with matching eigenvector columns.
 */
inline EigenDecomposition jacobi_eigen(const Matrix& a_in, int max_sweeps = 100) {
    if (a_in.rows() != a_in.cols()) throw DimensionError("jacobi_eigen: matrix not square");
    const std::size_t n = a_in.rows();
    Matrix a = a_in;
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                    / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    EigenDecomposition out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    // sort ascending, permuting eigenvector columns alongside
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (out.values[order[j]] < out.values[order[i]]) std::swap(order[i], order[j]);
    EigenDecomposition sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted.values[k] = out.values[order[k]];
        for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, k) = v(i, order[k]);
    }
    return sorted;
}

/// Spectral condition number of a symmetric matrix (|lambda|_max / |lambda|_min).
inline double symmetric_condition_number(const Matrix& a) {
    const auto eig = jacobi_eigen(a);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double lambda : eig.values) {
        lo = std::min(lo, std::fabs(lambda));
        hi = std::max(hi, std::fabs(lambda));
    }
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace anemo
