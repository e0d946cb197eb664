#pragma once

// Linear-family regressors (least squares, ridge, lasso, Bayesian ridge,
// Huber, bagging) and the evaluation metrics used to score them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anemo/error.hpp"
#include "anemo/matrix.hpp"
#include "anemo/rng.hpp"
#include "anemo/series.hpp"

namespace anemo {

enum class RegressorKind { ols, ridge, lasso, bayes_ridge, huber, bagging };

inline const char* to_string(RegressorKind k) {
    switch (k) {
        case RegressorKind::ols: return "ols";
        case RegressorKind::ridge: return "ridge";
        case RegressorKind::lasso: return "lasso";
        case RegressorKind::bayes_ridge: return "bayes_ridge";
        case RegressorKind::huber: return "huber";
        case RegressorKind::bagging: return "bagging";
    }
    return "?";
}

inline RegressorKind regressor_kind_from_string(const std::string& s) {
    if (s == "ols") return RegressorKind::ols;
    if (s == "ridge") return RegressorKind::ridge;
    if (s == "lasso") return RegressorKind::lasso;
    if (s == "bayes_ridge" || s == "bayes-ridge") return RegressorKind::bayes_ridge;
    if (s == "huber") return RegressorKind::huber;
    if (s == "bagging") return RegressorKind::bagging;
    throw DomainError("unknown regressor kind '" + s + "'");
}

struct RegressionModel {
    RegressorKind kind = RegressorKind::ols;
    double intercept = 0.0;
    std::vector<double> coefficients;            // one per predictor column
    std::map<std::string, double> hyperparams;   // lambda, delta, b, seed, ...
    std::size_t iterations = 0;
    bool converged = true;
    double condition_number = 0.0;               // of the normal-equations matrix
    bool ill_conditioned = false;                // condition number above 1e10
};

/// yhat_i = intercept + sum_j coefficients_j * X(i, j)
inline std::vector<double> predict(const RegressionModel& m, const Matrix& X) {
    if (X.cols() != m.coefficients.size())
        throw DimensionError("predict: model has " + std::to_string(m.coefficients.size())
                             + " coefficients, input has " + std::to_string(X.cols())
                             + " columns");
    std::vector<double> yhat(X.rows(), m.intercept);
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j)
            yhat[i] += m.coefficients[j] * X(i, j);
    return yhat;
}

inline std::vector<double> residuals(const RegressionModel& m, const Matrix& X,
                                     std::span<const double> y) {
    if (y.size() != X.rows()) throw DimensionError("residuals: row count mismatch");
    auto r = predict(m, X);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
    return r;
}

namespace detail {

inline Matrix augment_intercept(const Matrix& X) {
    Matrix a(X.rows(), X.cols() + 1);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        a(i, 0) = 1.0;
        for (std::size_t j = 0; j < X.cols(); ++j) a(i, j + 1) = X(i, j);
    }
    return a;
}

// Solves (D^T D + penalty * I_mask) beta = D^T y by Cholesky; the mask
// excludes the intercept slot from the penalty.
inline std::vector<double> penalized_normal_equations(const Matrix& D, std::span<const double> y,
                                                      double penalty, bool skip_first,
                                                      double* condition_out) {
    const std::size_t q = D.cols();
    Matrix dtd = D.transposed() * D;
    std::vector<double> dty(q, 0.0);
    for (std::size_t i = 0; i < D.rows(); ++i)
        for (std::size_t j = 0; j < q; ++j) dty[j] += D(i, j) * y[i];
    for (std::size_t j = skip_first ? 1 : 0; j < q; ++j) dtd(j, j) += penalty;
    if (condition_out) *condition_out = symmetric_condition_number(dtd);
    try {
        return Cholesky(dtd).solve(std::move(dty));
    } catch (const NumericalError&) {
        throw NumericalError("linear fit: singular design matrix (rank deficient)");
    }
}

}  // namespace detail

struct LinearOptions {
    bool intercept = true;
};

/// Ordinary least squares via the normal equations. Requires n > p and a
/// full-rank design; the condition number of D^T D is recorded and a value
/// above 1e10 sets the ill_conditioned flag.
inline RegressionModel fit_ols(const Matrix& X, std::span<const double> y,
                               const LinearOptions& opt = {}) {
    if (y.size() != X.rows()) throw DimensionError("fit_ols: row count mismatch");
    if (X.rows() < X.cols() + (opt.intercept ? 1u : 0u))
        throw InsufficientDataError("fit_ols: need more rows than fitted parameters");
    const Matrix D = opt.intercept ? detail::augment_intercept(X) : X;
    RegressionModel m;
    m.kind = RegressorKind::ols;
    auto beta = detail::penalized_normal_equations(D, y, 0.0, false, &m.condition_number);
    m.ill_conditioned = m.condition_number > 1e10;
    if (opt.intercept) {
        m.intercept = beta.front();
        m.coefficients.assign(beta.begin() + 1, beta.end());
    } else {
        m.coefficients = std::move(beta);
    }
    return m;
}

/// Ridge regression: (D^T D + lambda I) beta = D^T y with the intercept
/// slot unpenalized. lambda = 0 reproduces least squares.
inline RegressionModel fit_ridge(const Matrix& X, std::span<const double> y, double lambda,
                                 const LinearOptions& opt = {}) {
    if (lambda < 0.0) throw DomainError("fit_ridge: lambda must be >= 0");
    if (y.size() != X.rows()) throw DimensionError("fit_ridge: row count mismatch");
    const Matrix D = opt.intercept ? detail::augment_intercept(X) : X;
    RegressionModel m;
    m.kind = RegressorKind::ridge;
    m.hyperparams["lambda"] = lambda;
    auto beta = detail::penalized_normal_equations(D, y, lambda, opt.intercept,
                                                   &m.condition_number);
    m.ill_conditioned = m.condition_number > 1e10;
    if (opt.intercept) {
        m.intercept = beta.front();
        m.coefficients.assign(beta.begin() + 1, beta.end());
    } else {
        m.coefficients = std::move(beta);
    }
    return m;
}

struct LassoOptions {
    double tol = 1e-7;             // max coefficient change per sweep
    std::size_t max_iter = 100000;
};

/**
 * Lasso by cyclic coordinate descent with soft thresholding, minimizing
 *   (1/2n) ||y - Xb||^2 + lambda ||b_slopes||_1.
 * Predictors are standardized internally; coefficients are reported on the
 * original scale and the intercept is left unpenalized. Slopes are all
 * exactly zero once lambda >= max_j |X_c^T y_c| / n.
 */
inline RegressionModel fit_lasso(const Matrix& X, std::span<const double> y, double lambda,
                                 const LassoOptions& opt = {}) {
    if (lambda < 0.0) throw DomainError("fit_lasso: lambda must be >= 0");
    if (y.size() != X.rows()) throw DimensionError("fit_lasso: row count mismatch");
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    const double nd = static_cast<double>(n);

    std::vector<double> mu(p), sd(p);
    Matrix Z(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += X(i, j);
        mu[j] = s / nd;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (X(i, j) - mu[j]) * (X(i, j) - mu[j]);
        sd[j] = std::sqrt(ss / nd);
        if (sd[j] == 0.0) sd[j] = 1.0;  // constant column: slope stays 0
        for (std::size_t i = 0; i < n; ++i) Z(i, j) = (X(i, j) - mu[j]) / sd[j];
    }
    const double ybar = mean(y);
    std::vector<double> r(n);  // residual of the centered problem
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - ybar;

    std::vector<double> beta(p, 0.0);
    RegressionModel m;
    m.kind = RegressorKind::lasso;
    m.hyperparams["lambda"] = lambda;
    m.converged = false;
    const auto soft = [](double z, double g) {
        if (z > g) return z - g;
        if (z < -g) return z + g;
        return 0.0;
    };
    for (std::size_t iter = 0; iter < opt.max_iter; ++iter) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += Z(i, j) * r[i];
            rho = rho / nd + beta[j];  // since (1/n) Z_j^T Z_j = 1
            const double bj = soft(rho, lambda);
            const double delta = bj - beta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) r[i] -= delta * Z(i, j);
                beta[j] = bj;
                max_change = std::max(max_change, std::fabs(delta));
            }
        }
        m.iterations = iter + 1;
        if (max_change < opt.tol) {
            m.converged = true;
            break;
        }
    }

    m.coefficients.resize(p);
    double icept = ybar;
    for (std::size_t j = 0; j < p; ++j) {
        m.coefficients[j] = beta[j] / sd[j];
        icept -= m.coefficients[j] * mu[j];
    }
    m.intercept = icept;
    return m;
}

struct BayesRidgeOptions {
    bool evidence_iteration = false;  // update (lambda, sigma2) by fixed point
    double rel_tol = 1e-6;
    std::size_t max_iter = 300;
};

/**
 * Bayesian ridge: with slope prior N(0, sigma2/lambda) the posterior mean
 * equals the ridge solution with penalty lambda, so the fixed-parameter
 * mode simply delegates. With evidence iteration enabled, lambda and the
 * noise variance are re-estimated by the standard fixed-point updates
 * until their relative change drops below rel_tol.
 */
inline RegressionModel fit_bayes_ridge(const Matrix& X, std::span<const double> y,
                                       double prior_precision, double noise_variance,
                                       const BayesRidgeOptions& opt = {}) {
    if (!(prior_precision >= 0.0)) throw DomainError("fit_bayes_ridge: prior_precision must be >= 0");
    if (!(noise_variance > 0.0)) throw DomainError("fit_bayes_ridge: noise_variance must be > 0");

    double lambda = prior_precision;
    double sigma2 = noise_variance;
    RegressionModel m = fit_ridge(X, y, lambda);
    m.kind = RegressorKind::bayes_ridge;

    if (opt.evidence_iteration) {
        const std::size_t n = X.rows();
        const std::size_t p = X.cols();
        const Matrix D = detail::augment_intercept(X);
        const Matrix dtd = D.transposed() * D;
        for (std::size_t iter = 0; iter < opt.max_iter; ++iter) {
            // posterior covariance (up to sigma2) with unpenalized intercept
            Matrix a = dtd;
            for (std::size_t j = 1; j <= p; ++j) a(j, j) += lambda;
            const Matrix sinv = Cholesky(a).inverse();

            const auto res = residuals(m, X, y);
            double rss = 0.0;
            for (double rv : res) rss += rv * rv;
            double m2 = 0.0;
            for (double c : m.coefficients) m2 += c * c;
            double trace_slopes = 0.0;
            for (std::size_t j = 1; j <= p; ++j) trace_slopes += sinv(j, j);
            double trace_dtd_sigma = 0.0;
            for (std::size_t i = 0; i <= p; ++i)
                for (std::size_t j = 0; j <= p; ++j) trace_dtd_sigma += dtd(i, j) * sinv(j, i);

            const double sigma2_new =
                (rss + sigma2 * trace_dtd_sigma) / static_cast<double>(n);
            const double alpha = static_cast<double>(p) / (m2 + sigma2 * trace_slopes);
            const double lambda_new = alpha * sigma2_new;

            // floor keeps the criterion meaningful when both shrink to ~0
            const double change =
                std::fabs(lambda_new - lambda) / std::max(lambda, 1e-12)
                + std::fabs(sigma2_new - sigma2) / std::max(sigma2, 1e-12);
            lambda = lambda_new;
            sigma2 = sigma2_new;
            m = fit_ridge(X, y, lambda);
            m.kind = RegressorKind::bayes_ridge;
            m.iterations = iter + 1;
            if (change < opt.rel_tol) break;
        }
    }
    m.hyperparams["lambda"] = lambda;
    m.hyperparams["sigma2"] = sigma2;
    return m;
}

/// Huber loss at residual r: quadratic inside |r| <= delta, linear outside.
inline double huber_loss(double r, double delta) {
    if (!(delta > 0.0)) throw DomainError("huber_loss: delta must be > 0");
    const double a = std::fabs(r);
    if (a <= delta) return 0.5 * r * r;
    return delta * a - 0.5 * delta * delta;
}

struct HuberOptions {
    double delta = 1.35;      // on residuals standardized by the initial MAD scale
    double tol = 1e-8;        // max coefficient change
    std::size_t max_iter = 200;
};

/**
 * Huber regression by iteratively reweighted least squares. The threshold
 * is delta times a robust scale (MAD/0.6745 of the initial least-squares
 * residuals), held fixed across iterations so the IRLS objective decreases
 * monotonically.
 */
inline RegressionModel fit_huber(const Matrix& X, std::span<const double> y,
                                 const HuberOptions& opt = {}) {
    if (!(opt.delta > 0.0)) throw DomainError("fit_huber: delta must be > 0");
    const std::size_t n = X.rows();
    RegressionModel m = fit_ols(X, y);
    m.kind = RegressorKind::huber;
    m.hyperparams["delta"] = opt.delta;

    auto res = residuals(m, X, y);
    std::vector<double> abs_res(n);
    for (std::size_t i = 0; i < n; ++i) abs_res[i] = std::fabs(res[i]);
    std::sort(abs_res.begin(), abs_res.end());
    const double mad = median_of_sorted(abs_res);
    const double scale = mad / 0.6745;
    if (scale <= 0.0) return m;  // exact fit already
    const double threshold = opt.delta * scale;
    m.hyperparams["threshold"] = threshold;

    const Matrix D = detail::augment_intercept(X);
    const std::size_t q = D.cols();
    m.converged = false;
    for (std::size_t iter = 0; iter < opt.max_iter; ++iter) {
        res = residuals(m, X, y);
        // weighted normal equations: w = 1 inside the threshold, t/|r| outside
        Matrix a(q, q);
        std::vector<double> b(q, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double ar = std::fabs(res[i]);
            const double w = (ar <= threshold) ? 1.0 : threshold / ar;
            for (std::size_t r1 = 0; r1 < q; ++r1) {
                b[r1] += w * D(i, r1) * y[i];
                for (std::size_t r2 = r1; r2 < q; ++r2) a(r1, r2) += w * D(i, r1) * D(i, r2);
            }
        }
        for (std::size_t r1 = 0; r1 < q; ++r1)
            for (std::size_t r2 = 0; r2 < r1; ++r2) a(r1, r2) = a(r2, r1);
        const auto beta = Cholesky(a).solve(std::move(b));

        double change = std::fabs(beta[0] - m.intercept);
        for (std::size_t j = 0; j < X.cols(); ++j)
            change = std::max(change, std::fabs(beta[j + 1] - m.coefficients[j]));
        m.intercept = beta[0];
        m.coefficients.assign(beta.begin() + 1, beta.end());
        m.iterations = iter + 1;
        if (change < opt.tol) {
            m.converged = true;
            break;
        }
    }
    return m;
}

/// Total Huber objective at the model's fixed threshold (test/diagnostic aid).
inline double huber_objective(const RegressionModel& m, const Matrix& X,
                              std::span<const double> y) {
    const auto it = m.hyperparams.find("threshold");
    const double t = (it != m.hyperparams.end()) ? it->second : m.hyperparams.at("delta");
    double total = 0.0;
    for (double r : residuals(m, X, y)) total += huber_loss(r, t);
    return total;
}

struct BaggingOptions {
    RegressorKind base = RegressorKind::ols;
    double lambda = 0.0;   // for ridge/lasso/bayes_ridge bases
    double delta = 1.35;   // for huber base
    std::size_t members = 10;
};

struct BaggingModel {
    RegressionModel aggregate;                 // mean of the member models
    std::vector<RegressionModel> members;
};

/**
 * Bootstrap-aggregated regression: fits the base learner on b seeded
 * with-replacement resamples and averages the predictions. Since every
 * base learner here is linear, averaging predictions is exactly averaging
 * coefficients, which is what the aggregate model stores. Member seeds are
 * derived from (seed, member index), so results are reproducible and the
 * members could be fitted concurrently.
 */
inline BaggingModel fit_bagging(const Matrix& X, std::span<const double> y,
                                const BaggingOptions& opt, const Rng& rng) {
    if (opt.members == 0) throw DomainError("fit_bagging: need at least 1 member");
    if (opt.base == RegressorKind::bagging) throw DomainError("fit_bagging: cannot nest bagging");
    const std::size_t n = X.rows();
    if (y.size() != n) throw DimensionError("fit_bagging: row count mismatch");

    BaggingModel model;
    model.members.reserve(opt.members);
    for (std::size_t b = 0; b < opt.members; ++b) {
        Rng member_rng = rng.split(b);
        Matrix Xb(n, X.cols());
        std::vector<double> yb(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pick = member_rng.integer(n);
            yb[i] = y[pick];
            for (std::size_t j = 0; j < X.cols(); ++j) Xb(i, j) = X(pick, j);
        }
        try {
            switch (opt.base) {
                case RegressorKind::ols: model.members.push_back(fit_ols(Xb, yb)); break;
                case RegressorKind::ridge:
                    model.members.push_back(fit_ridge(Xb, yb, opt.lambda));
                    break;
                case RegressorKind::lasso:
                    model.members.push_back(fit_lasso(Xb, yb, opt.lambda));
                    break;
                case RegressorKind::bayes_ridge:
                    model.members.push_back(fit_bayes_ridge(Xb, yb, opt.lambda, 1.0));
                    break;
                case RegressorKind::huber: {
                    HuberOptions h;
                    h.delta = opt.delta;
                    model.members.push_back(fit_huber(Xb, yb, h));
                    break;
                }
                case RegressorKind::bagging: break;  // unreachable
            }
        } catch (const Error& e) {
            throw NumericalError("fit_bagging: member " + std::to_string(b) + " failed: "
                                 + e.what());
        }
    }

    RegressionModel& agg = model.aggregate;
    agg.kind = RegressorKind::bagging;
    agg.coefficients.assign(X.cols(), 0.0);
    const double bd = static_cast<double>(opt.members);
    for (const auto& member : model.members) {
        agg.intercept += member.intercept / bd;
        for (std::size_t j = 0; j < X.cols(); ++j)
            agg.coefficients[j] += member.coefficients[j] / bd;
    }
    agg.hyperparams["members"] = bd;
    agg.hyperparams["base"] = static_cast<double>(static_cast<int>(opt.base));
    agg.hyperparams["seed"] = static_cast<double>(rng.seed());
    return model;
}

struct RegressionMetrics {
    double mae = 0.0;
    double mse = 0.0;
    double med_ae = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

enum class R2Denominator { true_mean, prediction_mean };

/**
 * MAE, MSE, median absolute error and the R2 score. R2 conventionally uses
 * the mean of the true responses in its denominator; prediction_mean
 * reproduces the alternative reading where the denominator centers on the
 * mean prediction instead.
 */
inline RegressionMetrics metrics(std::span<const double> y, std::span<const double> yhat,
                                 R2Denominator denom = R2Denominator::true_mean) {
    if (y.size() != yhat.size()) throw DimensionError("metrics: length mismatch");
    if (y.size() < 2) throw InsufficientDataError("metrics: need at least 2 observations");
    const std::size_t n = y.size();
    RegressionMetrics out;
    out.n = n;

    std::vector<double> abs_err(n);
    double sse = 0.0, sae = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - yhat[i];
        abs_err[i] = std::fabs(e);
        sae += abs_err[i];
        sse += e * e;
    }
    out.mae = sae / static_cast<double>(n);
    out.mse = sse / static_cast<double>(n);
    std::sort(abs_err.begin(), abs_err.end());
    out.med_ae = median_of_sorted(abs_err);

    const double center = (denom == R2Denominator::true_mean) ? mean(y) : mean(yhat);
    double sst = 0.0;
    for (std::size_t i = 0; i < n; ++i) sst += (y[i] - center) * (y[i] - center);
    if (sst <= 0.0)
        throw DegenerateDataError("metrics: R2 undefined for constant true responses");
    out.r2 = 1.0 - sse / sst;
    return out;
}

}  // namespace anemo
