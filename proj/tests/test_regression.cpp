#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "anemo/regression.hpp"
#include "anemo/rng.hpp"

using namespace anemo;
using Catch::Approx;

namespace {

Matrix column_matrix(const std::vector<double>& x) {
    Matrix m(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) m(i, 0) = x[i];
    return m;
}

// well-conditioned random instance with known coefficients
struct Instance {
    Matrix X;
    std::vector<double> y;
    std::vector<double> beta;
    double intercept;
};

Instance random_instance(std::size_t n, std::size_t p, double noise, std::uint64_t seed) {
    Rng rng(seed);
    Instance inst{Matrix(n, p), std::vector<double>(n), std::vector<double>(p), 0.7};
    for (std::size_t j = 0; j < p; ++j) inst.beta[j] = -1.0 + 2.0 * rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
        double yi = inst.intercept;
        for (std::size_t j = 0; j < p; ++j) {
            inst.X(i, j) = rng.uniform() * 4.0 - 2.0;
            yi += inst.beta[j] * inst.X(i, j);
        }
        inst.y[i] = yi + noise * (rng.uniform() - 0.5);
    }
    return inst;
}

}  // namespace

TEST_CASE("ordinary least squares") {
    SECTION("exact linear data") {
        const auto m = fit_ols(column_matrix({0, 1, 2}), std::vector<double>{1, 3, 5});
        CHECK(m.intercept == Approx(1.0).margin(1e-12));
        CHECK(m.coefficients[0] == Approx(2.0).margin(1e-12));
        CHECK(m.converged);
    }
    SECTION("constant response gives zero slopes") {
        const auto m = fit_ols(column_matrix({1, 2, 3, 4}), std::vector<double>{7, 7, 7, 7});
        CHECK(m.intercept == Approx(7.0).margin(1e-12));
        CHECK(m.coefficients[0] == Approx(0.0).margin(1e-12));
    }
    SECTION("residuals are orthogonal to every design column") {
        const auto inst = random_instance(200, 4, 0.8, 3);
        const auto m = fit_ols(inst.X, inst.y);
        const auto r = residuals(m, inst.X, inst.y);
        double sum = 0.0;
        for (double v : r) sum += v;
        CHECK(sum == Approx(0.0).margin(1e-8));  // intercept column
        for (std::size_t j = 0; j < 4; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < 200; ++i) dot += r[i] * inst.X(i, j);
            CHECK(dot == Approx(0.0).margin(1e-8));
        }
    }
    SECTION("rank-deficient design fails loudly") {
        Matrix X(5, 2);
        for (std::size_t i = 0; i < 5; ++i) {
            X(i, 0) = static_cast<double>(i);
            X(i, 1) = 2.0 * static_cast<double>(i);
        }
        CHECK_THROWS_AS(fit_ols(X, std::vector<double>{1, 2, 3, 4, 5}), NumericalError);
    }
}

TEST_CASE("ridge regression") {
    SECTION("lambda 0 reproduces least squares") {
        const auto inst = random_instance(120, 3, 0.5, 11);
        const auto ols = fit_ols(inst.X, inst.y);
        const auto ridge = fit_ridge(inst.X, inst.y, 0.0);
        CHECK(ridge.intercept == Approx(ols.intercept).margin(1e-8));
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(ridge.coefficients[j] == Approx(ols.coefficients[j]).margin(1e-8));
    }
    SECTION("no-intercept scalar closed form: 5/6") {
        LinearOptions opt;
        opt.intercept = false;
        const auto m = fit_ridge(column_matrix({1, 2}), std::vector<double>{1, 2}, 1.0, opt);
        CHECK(m.coefficients[0] == Approx(5.0 / 6.0).epsilon(1e-12));
    }
    SECTION("enormous lambda kills the slopes") {
        const auto inst = random_instance(50, 2, 0.1, 5);
        const auto m = fit_ridge(inst.X, inst.y, 1e9);
        for (double c : m.coefficients) CHECK(std::fabs(c) < 1e-6);
    }
    SECTION("coefficient norm is non-increasing in lambda") {
        const auto inst = random_instance(80, 3, 1.0, 9);
        double last = 1e18;
        for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0, 1e4}) {
            const auto m = fit_ridge(inst.X, inst.y, lambda);
            double norm = 0.0;
            for (double c : m.coefficients) norm += c * c;
            CHECK(norm <= last + 1e-12);
            last = norm;
        }
    }
    CHECK_THROWS_AS(fit_ridge(column_matrix({1, 2}), std::vector<double>{1, 2}, -0.5),
                    DomainError);
}

TEST_CASE("lasso by coordinate descent") {
    SECTION("lambda above max |X^T y| / n zeroes every slope") {
        const auto inst = random_instance(100, 3, 0.4, 21);
        // compute lambda_max on the standardized problem
        const std::size_t n = 100;
        double lambda_max = 0.0;
        const double ybar = mean(inst.y);
        for (std::size_t j = 0; j < 3; ++j) {
            double mu = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) mu += inst.X(i, j);
            mu /= n;
            for (std::size_t i = 0; i < n; ++i)
                ss += (inst.X(i, j) - mu) * (inst.X(i, j) - mu);
            const double sd = std::sqrt(ss / n);
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                dot += (inst.X(i, j) - mu) / sd * (inst.y[i] - ybar);
            lambda_max = std::max(lambda_max, std::fabs(dot) / n);
        }
        const auto m = fit_lasso(inst.X, inst.y, lambda_max * 1.0001);
        for (double c : m.coefficients) CHECK(c == 0.0);
        const auto m2 = fit_lasso(inst.X, inst.y, lambda_max * 0.8);
        bool any_nonzero = false;
        for (double c : m2.coefficients) any_nonzero = any_nonzero || c != 0.0;
        CHECK(any_nonzero);
    }
    SECTION("lambda 0 matches least squares on well-conditioned data") {
        const auto inst = random_instance(150, 3, 0.3, 33);
        const auto ols = fit_ols(inst.X, inst.y);
        const auto m = fit_lasso(inst.X, inst.y, 0.0);
        CHECK(m.converged);
        CHECK(m.intercept == Approx(ols.intercept).margin(1e-4));
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(m.coefficients[j] == Approx(ols.coefficients[j]).margin(1e-4));
    }
    SECTION("1-D standardized soft threshold reproduced exactly") {
        // x standardized, y centered: slope = S(x.y/n, lambda)
        const std::vector<double> x{-1.5, -0.5, 0.5, 1.5};
        const std::vector<double> y{-3.1, -0.9, 1.1, 2.9};
        const double sd = std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 4.0);
        double rho = 0.0;
        for (std::size_t i = 0; i < 4; ++i) rho += (x[i] / sd) * y[i];
        rho /= 4.0;
        const double lambda = 0.7;
        const double expected_std = rho - lambda;  // rho > lambda here
        const auto m = fit_lasso(column_matrix(x), y, lambda);
        CHECK(m.coefficients[0] == Approx(expected_std / sd).margin(1e-9));
    }
    SECTION("active-set size is non-increasing in lambda") {
        const auto inst = random_instance(120, 6, 1.5, 44);
        std::size_t last = 7;
        for (double lambda : {0.001, 0.01, 0.05, 0.2, 0.5, 1.0}) {
            const auto m = fit_lasso(inst.X, inst.y, lambda);
            std::size_t nz = 0;
            for (double c : m.coefficients) nz += (c != 0.0);
            CHECK(nz <= last);
            last = nz;
        }
    }
}

TEST_CASE("Bayesian ridge") {
    const auto inst = random_instance(100, 3, 0.5, 55);
    SECTION("tiny prior precision approaches least squares") {
        const auto ols = fit_ols(inst.X, inst.y);
        const auto m = fit_bayes_ridge(inst.X, inst.y, 1e-12, 1.0);
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(m.coefficients[j] == Approx(ols.coefficients[j]).margin(1e-6));
    }
    SECTION("fixed hyperparameters equal ridge with the same penalty") {
        const auto ridge = fit_ridge(inst.X, inst.y, 2.5);
        const auto m = fit_bayes_ridge(inst.X, inst.y, 2.5, 0.7);
        CHECK(m.intercept == Approx(ridge.intercept).margin(1e-12));
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(m.coefficients[j] == Approx(ridge.coefficients[j]).margin(1e-12));
    }
    SECTION("evidence iteration drives sigma^2 to zero on noiseless data") {
        const auto clean = random_instance(80, 3, 0.0, 66);
        BayesRidgeOptions opt;
        opt.evidence_iteration = true;
        const auto m = fit_bayes_ridge(clean.X, clean.y, 1.0, 1.0, opt);
        CHECK(m.hyperparams.at("sigma2") < 1e-6);
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(m.coefficients[j] == Approx(clean.beta[j]).margin(1e-5));
    }
}

TEST_CASE("Huber regression") {
    SECTION("loss values at delta 1") {
        CHECK(huber_loss(0.5, 1.0) == Approx(0.125).epsilon(1e-15));
        CHECK(huber_loss(2.0, 1.0) == Approx(1.5).epsilon(1e-15));
        CHECK(huber_loss(-2.0, 1.0) == Approx(1.5).epsilon(1e-15));
    }
    SECTION("branches agree at |r| = delta") {
        for (double delta : {0.4, 1.0, 1.35, 3.0}) {
            CHECK(0.5 * delta * delta
                  == Approx(delta * delta - 0.5 * delta * delta).epsilon(1e-15));
            CHECK(huber_loss(delta, delta) == Approx(0.5 * delta * delta).epsilon(1e-14));
        }
    }
    SECTION("one gross outlier: slope beats least squares") {
        auto inst = random_instance(60, 1, 0.05, 77);
        inst.y[10] += 80.0;  // corrupt one observation
        const auto ols = fit_ols(inst.X, inst.y);
        const auto hub = fit_huber(inst.X, inst.y);
        CHECK(std::fabs(hub.coefficients[0] - inst.beta[0])
              < std::fabs(ols.coefficients[0] - inst.beta[0]));
        CHECK(hub.converged);
    }
    SECTION("IRLS objective is non-increasing across iterations") {
        auto inst = random_instance(80, 2, 2.0, 88);
        inst.y[3] += 25.0;
        inst.y[40] -= 25.0;
        double last = std::numeric_limits<double>::infinity();
        for (std::size_t iters = 1; iters <= 12; ++iters) {
            HuberOptions opt;
            opt.max_iter = iters;
            opt.tol = 0.0;  // force exactly `iters` sweeps
            const auto m = fit_huber(inst.X, inst.y, opt);
            const double obj = huber_objective(m, inst.X, inst.y);
            CHECK(obj <= last + 1e-9);
            last = obj;
        }
    }
}

TEST_CASE("bagging") {
    const auto inst = random_instance(90, 2, 0.5, 99);
    SECTION("aggregate prediction equals the mean of member predictions") {
        Rng rng(100);
        BaggingOptions opt;
        opt.members = 7;
        const auto model = fit_bagging(inst.X, inst.y, opt, rng);
        const auto agg = predict(model.aggregate, inst.X);
        for (std::size_t i = 0; i < inst.X.rows(); ++i) {
            double meanp = 0.0;
            for (const auto& member : model.members)
                meanp += predict(member, inst.X)[i] / 7.0;
            CHECK(agg[i] == Approx(meanp).margin(1e-12));
        }
    }
    SECTION("noiseless data: every resample recovers the truth") {
        const auto clean = random_instance(60, 2, 0.0, 13);
        Rng rng(5);
        BaggingOptions opt;
        opt.members = 5;
        const auto model = fit_bagging(clean.X, clean.y, opt, rng);
        const auto yhat = predict(model.aggregate, clean.X);
        for (std::size_t i = 0; i < 60; ++i)
            CHECK(yhat[i] == Approx(clean.y[i]).margin(1e-9));
    }
    SECTION("b=1 equals the base learner on that bootstrap sample") {
        Rng rng(7);
        BaggingOptions opt;
        opt.members = 1;
        const auto model = fit_bagging(inst.X, inst.y, opt, rng);
        // rebuild the same resample via the identical split stream
        Rng member = rng.split(0);
        Matrix Xb(90, 2);
        std::vector<double> yb(90);
        for (std::size_t i = 0; i < 90; ++i) {
            const auto pick = member.integer(90);
            yb[i] = inst.y[pick];
            for (std::size_t j = 0; j < 2; ++j) Xb(i, j) = inst.X(pick, j);
        }
        const auto base = fit_ols(Xb, yb);
        CHECK(model.aggregate.intercept == Approx(base.intercept).margin(1e-12));
        CHECK(model.aggregate.coefficients[0] == Approx(base.coefficients[0]).margin(1e-12));
    }
    SECTION("fixed seed is bit-reproducible") {
        Rng r1(123), r2(123);
        BaggingOptions opt;
        opt.members = 4;
        const auto a = fit_bagging(inst.X, inst.y, opt, r1);
        const auto b = fit_bagging(inst.X, inst.y, opt, r2);
        CHECK(a.aggregate.intercept == b.aggregate.intercept);
        CHECK(a.aggregate.coefficients == b.aggregate.coefficients);
    }
}

TEST_CASE("predict") {
    RegressionModel m;
    m.intercept = 3.5;
    m.coefficients = {0.0, 0.0};
    Matrix X(4, 2);
    SECTION("zero coefficients give the constant intercept") {
        for (double v : predict(m, X)) CHECK(v == 3.5);
    }
    SECTION("dimension mismatch is rejected") {
        Matrix bad(4, 3);
        CHECK_THROWS_AS(predict(m, bad), DimensionError);
    }
    SECTION("exact-fit model reproduces the training response") {
        const auto inst = random_instance(50, 2, 0.0, 31);
        const auto fit = fit_ols(inst.X, inst.y);
        const auto yhat = predict(fit, inst.X);
        for (std::size_t i = 0; i < 50; ++i)
            CHECK(yhat[i] == Approx(inst.y[i]).margin(1e-10));
    }
}

TEST_CASE("metrics") {
    SECTION("perfect prediction") {
        const std::vector<double> y{1, 2, 3, 4};
        const auto m = metrics(y, y);
        CHECK(m.mae == 0.0);
        CHECK(m.mse == 0.0);
        CHECK(m.med_ae == 0.0);
        CHECK(m.r2 == 1.0);
    }
    SECTION("worked example") {
        const auto m = metrics(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4});
        CHECK(m.mae == Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(m.mse == Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(m.med_ae == 0.0);
        CHECK(m.r2 == Approx(0.5).epsilon(1e-12));
    }
    SECTION("mean predictor scores exactly zero") {
        const std::vector<double> y{2, 4, 9, 1};
        const std::vector<double> yhat(4, 4.0);  // mean of y
        CHECK(metrics(y, yhat).r2 == 0.0);
    }
    SECTION("constant truth is rejected") {
        CHECK_THROWS_AS(metrics(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}),
                        DegenerateDataError);
    }
    SECTION("prediction-mean denominator variant") {
        const std::vector<double> y{1, 2, 3};
        const std::vector<double> yhat{2, 3, 4};
        const auto conventional = metrics(y, yhat);
        const auto variant = metrics(y, yhat, R2Denominator::prediction_mean);
        CHECK(conventional.r2 != variant.r2);
        // denominator centers on mean(yhat) = 3: sst = 4+1+0 = 5, sse = 3
        CHECK(variant.r2 == Approx(1.0 - 3.0 / 5.0).epsilon(1e-12));
    }
}

TEST_CASE("residuals") {
    const auto inst = random_instance(40, 2, 0.7, 17);
    const auto m = fit_ols(inst.X, inst.y);
    const auto r = residuals(m, inst.X, inst.y);
    const auto yhat = predict(m, inst.X);
    double sum = 0.0;
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(r[i] == Approx(inst.y[i] - yhat[i]).margin(1e-15));
        sum += r[i];
    }
    CHECK(sum == Approx(0.0).margin(1e-9));  // normal equations with intercept
}
