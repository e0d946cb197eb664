#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "anemo/matrix.hpp"
#include "anemo/optimize.hpp"
#include "anemo/quadrature.hpp"
#include "anemo/rng.hpp"
#include "anemo/special_functions.hpp"

using namespace anemo;
using Catch::Approx;

// Reference values computed with 25-digit arbitrary-precision arithmetic.

TEST_CASE("digamma and trigamma match high-precision references") {
    CHECK(digamma(1.0) == Approx(-0.57721566490153286).epsilon(1e-13));
    CHECK(digamma(0.5) == Approx(-1.9635100260214235).epsilon(1e-13));
    CHECK(digamma(3.7) == Approx(1.1671535393615114).epsilon(1e-13));
    CHECK(digamma(12.3) == Approx(2.4683984003011382).epsilon(1e-13));
    CHECK(trigamma(1.0) == Approx(1.6449340668482264).epsilon(1e-12));
    CHECK(trigamma(0.5) == Approx(4.9348022005446793).epsilon(1e-12));
    CHECK(trigamma(4.2) == Approx(0.26866494073140079).epsilon(1e-12));
    CHECK_THROWS_AS(digamma(0.0), DomainError);
    CHECK_THROWS_AS(trigamma(-1.0), DomainError);
}

TEST_CASE("regularized incomplete gamma") {
    CHECK(gamma_p(0.5, 1.0) == Approx(0.84270079294971487).epsilon(1e-13));
    CHECK(gamma_p(3.0, 2.5) == Approx(0.45618688411667048).epsilon(1e-13));
    CHECK(gamma_p(10.0, 3.0) == Approx(0.0011024881301154797).epsilon(1e-12));
    CHECK(gamma_p(2.0, 8.0) == Approx(0.99698083634887739).epsilon(1e-13));
    CHECK(gamma_p(4.0, 0.0) == 0.0);
    CHECK(gamma_q(3.0, 2.5) == Approx(1.0 - 0.45618688411667048).epsilon(1e-12));

    SECTION("inverse round-trips through gamma_p") {
        for (double a : {0.3, 1.0, 2.5, 17.0}) {
            for (double p : {0.01, 0.2, 0.5, 0.9, 0.999}) {
                const double x = gamma_p_inverse(a, p);
                CHECK(gamma_p(a, x) == Approx(p).margin(1e-9));
            }
        }
    }
}

TEST_CASE("chi-squared quantiles") {
    CHECK(chi_squared_quantile(1, 0.95) == Approx(3.841458820694126).epsilon(1e-9));
    CHECK(chi_squared_quantile(2, 0.5) == Approx(1.3862943611198906).epsilon(1e-9));
    CHECK(chi_squared_quantile(10, 0.975) == Approx(20.483177350807397).epsilon(1e-9));
    CHECK(chi_squared_quantile(3, 0.01) == Approx(0.11483180189911704).epsilon(1e-9));
}

TEST_CASE("normal quantile is accurate and inverts the CDF") {
    CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-15));
    CHECK(normal_quantile(0.975) == Approx(1.9599639845400542).epsilon(1e-12));
    CHECK(normal_quantile(1e-10) == Approx(-6.3613409024040562).epsilon(1e-12));
    CHECK(normal_quantile(0.3) == Approx(-0.52440051270804078).epsilon(1e-12));
    CHECK(normal_cdf(1.2) == Approx(0.88493032977829173).epsilon(1e-14));
    for (double p : {1e-12, 1e-6, 0.02, 0.4, 0.77, 1.0 - 1e-9}) {
        CHECK(normal_cdf(normal_quantile(p)) == Approx(p).epsilon(1e-11));
    }
}

TEST_CASE("bivariate normal CDF against quadrature references") {
    CHECK(bivariate_normal_cdf(0.0, 0.0, 0.5) == Approx(1.0 / 3.0).margin(1e-9));
    CHECK(bivariate_normal_cdf(0.5, -0.5, 0.3) == Approx(0.249368293252311).margin(1e-9));
    CHECK(bivariate_normal_cdf(1.0, 1.0, 0.9) == Approx(0.7981798295654442).margin(1e-9));
    CHECK(bivariate_normal_cdf(1.0, 1.0, 0.99) == Approx(0.8276930269850802).margin(1e-8));
    CHECK(bivariate_normal_cdf(-1.0, 2.0, -0.7) == Approx(0.1402198541940397).margin(1e-9));
    CHECK(bivariate_normal_cdf(2.0, 2.0, 0.999) == Approx(0.9762868430442767).margin(1e-8));
    CHECK(bivariate_normal_cdf(0.3, 0.3, -0.95) == Approx(0.2372408048134409).margin(1e-8));

    SECTION("identity Phi2(0,0,rho) = 1/4 + asin(rho)/(2 pi)") {
        for (double rho : {-0.99, -0.6, -0.1, 0.2, 0.85, 0.97}) {
            const double expected = 0.25 + std::asin(rho) / (2.0 * M_PI);
            CHECK(bivariate_normal_cdf(0.0, 0.0, rho) == Approx(expected).margin(1e-8));
        }
    }
    SECTION("independence factorizes") {
        CHECK(bivariate_normal_cdf(0.7, -0.3, 0.0)
              == Approx(normal_cdf(0.7) * normal_cdf(-0.3)).margin(1e-14));
    }
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    // n-point rule is exact through degree 2n-1
    const auto& rule = gauss_legendre_rule(8);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == Approx(2.0).epsilon(1e-14));

    const double i15 = gauss_legendre_integrate([](double x) { return std::pow(x, 15); }, 0.0, 1.0, 8);
    CHECK(i15 == Approx(1.0 / 16.0).epsilon(1e-13));
    const double ism = gauss_legendre_integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 32);
    CHECK(ism == Approx(2.0).epsilon(1e-13));
    const double i2d = gauss_legendre_integrate_2d(
        [](double x, double y) { return x * x * y + y * y; }, 0.0, 1.0, 0.0, 2.0, 16);
    CHECK(i2d == Approx(10.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("adaptive Simpson handles smooth and peaked integrands") {
    CHECK(adaptive_simpson([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12, 50)
          == Approx(std::sqrt(M_PI)).epsilon(1e-10));
    CHECK(adaptive_simpson([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-12, 60)
          == Approx(2.0 * std::atan(100.0) / 1e-2).epsilon(1e-9));
}

TEST_CASE("rng streams are deterministic and splittable") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c(12345);
    Rng child0 = c.split(0);
    Rng child1 = c.split(1);
    CHECK(child0.next_u64() != child1.next_u64());
    Rng child0_again = c.split(0);
    child0_again.next_u64();  // align with child0, which has already drawn once
    CHECK(child0.next_u64() == child0_again.next_u64());

    SECTION("uniform stays in the open interval") {
        Rng r(7);
        for (int i = 0; i < 10000; ++i) {
            const double u = r.uniform();
            CHECK(u > 0.0);
            CHECK(u < 1.0);
        }
    }
    SECTION("integer bound is respected") {
        Rng r(9);
        for (int i = 0; i < 1000; ++i) CHECK(r.integer(7) < 7);
    }
}

TEST_CASE("Cholesky solves and inverts SPD systems") {
    Matrix a(3, 3);
    a(0, 0) = 4; a(0, 1) = 2; a(0, 2) = 0.6;
    a(1, 0) = 2; a(1, 1) = 5; a(1, 2) = 1.4;
    a(2, 0) = 0.6; a(2, 1) = 1.4; a(2, 2) = 3;
    const Cholesky chol(a);
    const std::vector<double> x = chol.solve({1.0, 2.0, 3.0});
    const auto back = a * x;
    CHECK(back[0] == Approx(1.0).margin(1e-12));
    CHECK(back[1] == Approx(2.0).margin(1e-12));
    CHECK(back[2] == Approx(3.0).margin(1e-12));

    const Matrix inv = chol.inverse();
    const Matrix prod = a * inv;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(prod(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-12));

    Matrix sing(2, 2);
    sing(0, 0) = 1; sing(0, 1) = 1; sing(1, 0) = 1; sing(1, 1) = 1;
    CHECK_THROWS_AS(Cholesky(sing), NumericalError);
}

TEST_CASE("Jacobi eigendecomposition reconstructs symmetric matrices") {
    Matrix a(4, 4);
    Rng rng(42);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j) a(i, j) = a(j, i) = rng.uniform() - 0.5;
    const auto eig = jacobi_eigen(a);
    for (std::size_t i = 0; i < 3; ++i) CHECK(eig.values[i] <= eig.values[i + 1]);
    // A v_k = lambda_k v_k
    for (std::size_t k = 0; k < 4; ++k) {
        std::vector<double> v(4);
        for (std::size_t i = 0; i < 4; ++i) v[i] = eig.vectors(i, k);
        const auto av = a * v;
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(av[i] == Approx(eig.values[k] * v[i]).margin(1e-10));
    }
}

TEST_CASE("Nelder-Mead minimizes a shifted quadratic and Rosenbrock") {
    const auto quad = [](const std::vector<double>& x) {
        return (x[0] - 3.0) * (x[0] - 3.0) + 2.0 * (x[1] + 1.0) * (x[1] + 1.0);
    };
    const auto r1 = nelder_mead(quad, {0.0, 0.0});
    CHECK(r1.converged);
    CHECK(r1.x[0] == Approx(3.0).margin(1e-4));
    CHECK(r1.x[1] == Approx(-1.0).margin(1e-4));

    const auto rosen = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    NelderMeadOptions opt;
    opt.max_evaluations = 20000;
    const auto r2 = nelder_mead(rosen, {-1.2, 1.0}, opt);
    CHECK(r2.fmin < 1e-8);
}

TEST_CASE("find_root brackets and converges") {
    const double r = find_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-13);
    CHECK(r == Approx(std::cbrt(2.0)).epsilon(1e-11));
    CHECK_THROWS_AS(find_root([](double x) { return x + 10.0; }, 0.0, 1.0), NumericalError);
}
