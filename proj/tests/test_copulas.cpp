#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "anemo/copulas.hpp"
#include "anemo/stats.hpp"

#include "oracles.hpp"

using namespace anemo;
using Catch::Approx;

namespace {

CopulaSpec spec_of(CopulaFamily f, double theta, double delta = 0.0,
                   CopulaRotation rot = CopulaRotation::none) {
    return CopulaSpec{f, rot, theta, delta};
}

// Representative parameter grid per family for the axiom/property suites.
std::vector<CopulaSpec> test_grid() {
    std::vector<CopulaSpec> g;
    g.push_back(spec_of(CopulaFamily::independence, 0.0));
    for (double r : {-0.9, -0.17, 0.17, 0.6, 0.95}) g.push_back(spec_of(CopulaFamily::gaussian, r));
    for (double t : {-66.66, -10.0, -1.0, 1.0, 5.0, 25.0, 66.66})
        g.push_back(spec_of(CopulaFamily::frank, t));
    for (double t : {1.0, 1.5, 2.0, 5.0}) g.push_back(spec_of(CopulaFamily::joe, t));
    for (double t : {1.0, 1.33, 2.0, 5.0}) g.push_back(spec_of(CopulaFamily::gumbel, t));
    for (double t : {0.5, 2.0, 8.0}) g.push_back(spec_of(CopulaFamily::clayton, t));
    g.push_back(spec_of(CopulaFamily::bb1, 0.07, 1.02));
    g.push_back(spec_of(CopulaFamily::bb1, 1.2, 1.5));
    g.push_back(spec_of(CopulaFamily::bb1, 2.0, 2.0));
    g.push_back(spec_of(CopulaFamily::bb6, 1.17, 1.35));
    g.push_back(spec_of(CopulaFamily::bb6, 2.0, 2.0));
    g.push_back(spec_of(CopulaFamily::bb7, 1.5, 0.8));
    g.push_back(spec_of(CopulaFamily::bb7, 2.0, 1.5));
    g.push_back(spec_of(CopulaFamily::bb8, 2.27, 0.9));
    g.push_back(spec_of(CopulaFamily::bb8, 6.0, 0.79));
    g.push_back(spec_of(CopulaFamily::bb8, 3.0, 0.5));
    // survival variants of the tail-asymmetric families
    g.push_back(spec_of(CopulaFamily::clayton, 2.0, 0.0, CopulaRotation::survival));
    g.push_back(spec_of(CopulaFamily::gumbel, 2.0, 0.0, CopulaRotation::survival));
    g.push_back(spec_of(CopulaFamily::joe, 2.0, 0.0, CopulaRotation::survival));
    g.push_back(spec_of(CopulaFamily::bb1, 1.2, 1.5, CopulaRotation::survival));
    g.push_back(spec_of(CopulaFamily::bb8, 2.27, 0.9, CopulaRotation::survival));
    return g;
}

}  // namespace

TEST_CASE("copula CDF reference values") {
    // frozen from 30-digit evaluations of the closed forms
    CHECK(copula_cdf(spec_of(CopulaFamily::gumbel, 2.0), 0.5, 0.5)
          == Approx(0.37521422724648177).epsilon(1e-12));
    CHECK(copula_cdf(spec_of(CopulaFamily::frank, 1.0), 0.5, 0.5)
          == Approx(0.28092980362016137).epsilon(1e-12));
    CHECK(copula_cdf(spec_of(CopulaFamily::clayton, 2.0), 0.5, 0.5)
          == Approx(0.37796447300922723).epsilon(1e-12));
    CHECK(copula_cdf(spec_of(CopulaFamily::gaussian, 0.17), 0.5, 0.5)
          == Approx(0.2771883862686499).margin(1e-9));
    CHECK(copula_cdf(spec_of(CopulaFamily::gaussian, 0.5), 0.3, 0.7)
          == Approx(0.2669038488673631).margin(1e-9));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb1, 1.2, 1.5), 0.3, 0.7)
          == Approx(0.2918213875924129).epsilon(1e-12));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb1, 1.2, 1.5), 0.5, 0.5)
          == Approx(0.3938153121350332).epsilon(1e-12));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb6, 1.17, 1.35), 0.3, 0.7)
          == Approx(0.26316774716396).epsilon(1e-11));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb6, 1.17, 1.35), 0.5, 0.5)
          == Approx(0.3303768062031731).epsilon(1e-11));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb7, 1.5, 0.8), 0.3, 0.7)
          == Approx(0.271295088090317).epsilon(1e-11));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb7, 1.5, 0.8), 0.5, 0.5)
          == Approx(0.343538387450822).epsilon(1e-11));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb8, 2.27, 0.9), 0.3, 0.7)
          == Approx(0.2638238683140168).epsilon(1e-12));
    CHECK(copula_cdf(spec_of(CopulaFamily::bb8, 2.27, 0.9), 0.5, 0.5)
          == Approx(0.3328961796683271).epsilon(1e-12));
}

TEST_CASE("h-function and density reference values (BB families)") {
    struct Row {
        CopulaSpec s;
        double u, v, h, c;
    };
    const std::vector<Row> rows{
        {spec_of(CopulaFamily::bb1, 1.2, 1.5), 0.3, 0.7, 0.057967751496441844, 0.5446367202675604},
        {spec_of(CopulaFamily::bb1, 1.2, 1.5), 0.5, 0.5, 0.46942517248068505, 1.729761155238935},
        {spec_of(CopulaFamily::bb1, 1.2, 1.5), 0.9, 0.2, 0.9952584422386548, 0.07953001204957802},
        {spec_of(CopulaFamily::bb6, 1.17, 1.35), 0.3, 0.7, 0.20503897063331879, 0.86131339786815292},
        {spec_of(CopulaFamily::bb6, 1.17, 1.35), 0.5, 0.5, 0.53592571469387917, 1.20976179583199252},
        {spec_of(CopulaFamily::bb6, 1.17, 1.35), 0.9, 0.2, 0.97745291013759886, 0.36339194965408562},
        {spec_of(CopulaFamily::bb7, 1.5, 0.8), 0.3, 0.7, 0.15381011621172144, 0.8667810804345332},
        {spec_of(CopulaFamily::bb7, 1.5, 0.8), 0.5, 0.5, 0.48816180430998896, 1.2951304862975084},
        {spec_of(CopulaFamily::bb7, 1.5, 0.8), 0.9, 0.2, 0.9773730879200471, 0.3435608467127251},
        {spec_of(CopulaFamily::bb8, 2.27, 0.9), 0.3, 0.7, 0.20486746143881285, 0.8112564731708914},
        {spec_of(CopulaFamily::bb8, 2.27, 0.9), 0.5, 0.5, 0.5492430886692603, 1.1995064464283591},
        {spec_of(CopulaFamily::bb8, 2.27, 0.9), 0.9, 0.2, 0.9767027603262332, 0.32457248958490814},
    };
    for (const auto& r : rows) {
        CAPTURE(to_string(r.s.family), r.u, r.v);
        CHECK(copula_h(r.s, r.u, r.v) == Approx(r.h).epsilon(1e-10));
        CHECK(copula_pdf(r.s, r.u, r.v) == Approx(r.c).epsilon(1e-10));
    }
}

TEST_CASE("copula axioms on the parameter grid") {
    for (const auto& s : test_grid()) {
        CAPTURE(to_string(s.family), s.theta, s.delta, static_cast<int>(s.rotation));

        // uniform margins and groundedness (exact at the boundary)
        for (int i = 0; i <= 20; ++i) {
            const double u = static_cast<double>(i) / 20.0;
            CHECK(copula_cdf(s, u, 1.0) == Approx(u).margin(1e-9));
            CHECK(copula_cdf(s, 1.0, u) == Approx(u).margin(1e-9));
            CHECK(copula_cdf(s, u, 0.0) == 0.0);
            CHECK(copula_cdf(s, 0.0, u) == 0.0);
        }

        // Frechet bounds, exchangeability, and the rectangle inequality
        std::vector<double> grid;
        for (int i = 0; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 20.0);
        std::vector<std::vector<double>> c(21, std::vector<double>(21));
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) c[i][j] = copula_cdf(s, grid[i], grid[j]);
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const double lower = std::max(grid[i] + grid[j] - 1.0, 0.0);
                const double upper = std::min(grid[i], grid[j]);
                CHECK(c[i][j] >= lower - 1e-9);
                CHECK(c[i][j] <= upper + 1e-9);
                CHECK(c[i][j] == Approx(c[j][i]).margin(1e-9));
            }
        }
        for (int i = 0; i + 1 <= 20; ++i)
            for (int j = 0; j + 1 <= 20; ++j)
                CHECK(c[i + 1][j + 1] - c[i][j + 1] - c[i + 1][j] + c[i][j] >= -1e-9);
    }
}

TEST_CASE("density integrates to one and matches the mixed partial") {
    for (const auto& s : test_grid()) {
        CAPTURE(to_string(s.family), s.theta, s.delta, static_cast<int>(s.rotation));

        // corner-refined composite quadrature handles the tail singularities
        CHECK(test_oracles::copula_mass(s) == Approx(1.0).margin(1e-3));

        // Richardson-extrapolated central mixed partial of the CDF; the
        // absolute floor covers points where the density itself is ~1e-9
        // (finite differences of an O(1) CDF cannot resolve those)
        const auto mixed = [&](double u, double v) {
            const auto d2 = [&](double h) {
                return (copula_cdf(s, u + h, v + h) - copula_cdf(s, u + h, v - h)
                        - copula_cdf(s, u - h, v + h) + copula_cdf(s, u - h, v - h))
                       / (4.0 * h * h);
            };
            const double h = 1e-4;
            return (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
        };
        for (double u : {0.25, 0.5, 0.75}) {
            for (double v : {0.3, 0.6, u}) {
                const double analytic = copula_pdf(s, u, v);
                CHECK(mixed(u, v) == Approx(analytic).epsilon(1e-4).margin(1e-6));
            }
        }

        // h is the partial dC/dv: central difference in v
        for (double u : {0.2, 0.55, 0.9}) {
            const double v = 0.4, h = 1e-6;
            const double fd = (copula_cdf(s, u, v + h) - copula_cdf(s, u, v - h)) / (2.0 * h);
            CHECK(copula_h(s, u, v) == Approx(fd).margin(2e-7));
        }
    }

    SECTION("plain 64x64 Gauss-Legendre suffices at the representative parameters") {
        for (const auto& s : {spec_of(CopulaFamily::gaussian, 0.17),
                              spec_of(CopulaFamily::frank, 10.0),
                              spec_of(CopulaFamily::joe, 2.0),
                              spec_of(CopulaFamily::gumbel, 1.33),
                              spec_of(CopulaFamily::clayton, 2.0),
                              spec_of(CopulaFamily::bb1, 0.07, 1.02),
                              spec_of(CopulaFamily::bb6, 1.17, 1.35),
                              spec_of(CopulaFamily::bb7, 1.5, 0.8),
                              spec_of(CopulaFamily::bb8, 2.27, 0.9)}) {
            CAPTURE(to_string(s.family));
            CHECK(test_oracles::copula_mass_gl64(s) == Approx(1.0).margin(1e-3));
        }
    }
}

TEST_CASE("independence and gaussian rho=0 densities are flat") {
    CHECK(copula_pdf(spec_of(CopulaFamily::independence, 0.0), 0.3, 0.8) == Approx(1.0));
    CHECK(copula_pdf(spec_of(CopulaFamily::gaussian, 0.0), 0.3, 0.8) == Approx(1.0));
    bool clamped = false;
    copula_pdf(spec_of(CopulaFamily::gumbel, 2.0), 0.0, 0.5, &clamped);
    CHECK(clamped);
    clamped = false;
    copula_pdf(spec_of(CopulaFamily::gumbel, 2.0), 0.5, 0.5, &clamped);
    CHECK_FALSE(clamped);
}

TEST_CASE("Kendall tau closed forms and paper anchors") {
    // Table-style anchors
    CHECK(copula_tau(spec_of(CopulaFamily::frank, 66.66)) == Approx(0.94).margin(0.01));
    CHECK(copula_tau(spec_of(CopulaFamily::frank, 23.9)) == Approx(0.84).margin(0.01));
    CHECK(copula_tau(spec_of(CopulaFamily::frank, 18.41)) == Approx(0.80).margin(0.01));
    CHECK(copula_tau(spec_of(CopulaFamily::gumbel, 1.33)) == Approx(0.248).margin(1e-3));
    CHECK(copula_tau(spec_of(CopulaFamily::gaussian, 0.17)) == Approx(0.1088).margin(1e-3));
    CHECK(copula_tau(spec_of(CopulaFamily::bb1, 0.07, 1.02)) == Approx(0.0527612011).epsilon(1e-9));
    CHECK(copula_tau(spec_of(CopulaFamily::clayton, 2.0)) == Approx(0.5).epsilon(1e-12));

    // frozen high-precision values (Debye / generic-integral oracles)
    CHECK(copula_tau(spec_of(CopulaFamily::frank, 10.0)) == Approx(0.665777386272).epsilon(1e-9));
    CHECK(copula_tau(spec_of(CopulaFamily::frank, -10.0)) == Approx(-0.665777386272).epsilon(1e-9));
    CHECK(copula_tau(spec_of(CopulaFamily::bb6, 1.17, 1.35)) == Approx(0.3249536661).margin(2e-5));
    CHECK(copula_tau(spec_of(CopulaFamily::bb8, 2.27, 0.9)) == Approx(0.313476997).margin(2e-5));
    CHECK(copula_tau(spec_of(CopulaFamily::bb8, 6.0, 0.79)) == Approx(0.5907698702).margin(2e-5));

    // Joe tau: generic integral against the exact series
    CHECK(copula_tau(spec_of(CopulaFamily::joe, 1.5)) == Approx(0.219272460483).margin(1e-4));
    CHECK(copula_tau(spec_of(CopulaFamily::joe, 2.0)) == Approx(0.355065933155).margin(1e-4));
    CHECK(copula_tau(spec_of(CopulaFamily::joe, 5.0)) == Approx(0.677220746878).margin(1e-4));

    SECTION("generic double-integral route agrees with closed forms to 1e-4") {
        // evaluated by forcing the generic path through a one-off integrand
        for (const auto& s : {spec_of(CopulaFamily::gumbel, 2.0),
                              spec_of(CopulaFamily::clayton, 2.0),
                              spec_of(CopulaFamily::frank, 5.0),
                              spec_of(CopulaFamily::gaussian, 0.6),
                              spec_of(CopulaFamily::bb1, 1.2, 1.5)}) {
            const auto integrand = [&](double u, double v) {
                return copula_h(s, v, u) * copula_h(s, u, v);
            };
            const double generic =
                1.0 - 4.0 * gauss_legendre_integrate_2d(integrand, 0.0, 1.0, 0.0, 1.0, 64);
            CHECK(generic == Approx(copula_tau(s)).margin(1e-4));
        }
    }

    SECTION("survival rotation leaves tau unchanged") {
        CHECK(copula_tau(spec_of(CopulaFamily::gumbel, 2.0, 0.0, CopulaRotation::survival))
              == Approx(copula_tau(spec_of(CopulaFamily::gumbel, 2.0))).margin(1e-12));
        CHECK(copula_tau(spec_of(CopulaFamily::bb8, 2.27, 0.9, CopulaRotation::survival))
              == Approx(copula_tau(spec_of(CopulaFamily::bb8, 2.27, 0.9))).margin(1e-12));
    }

    SECTION("tau is nondecreasing in theta") {
        for (CopulaFamily f : {CopulaFamily::frank, CopulaFamily::gumbel, CopulaFamily::clayton,
                               CopulaFamily::joe}) {
            double last = -1.0;
            for (double t : {1.05, 1.5, 2.0, 3.0, 5.0, 10.0}) {
                const double theta = (f == CopulaFamily::clayton || f == CopulaFamily::frank)
                                         ? t : t;
                const double tau = copula_tau(spec_of(f, theta));
                CHECK(tau >= last - 1e-9);
                last = tau;
            }
        }
    }
}

TEST_CASE("survival rotation identities") {
    const auto base = spec_of(CopulaFamily::clayton, 2.0);
    const auto rot = spec_of(CopulaFamily::clayton, 2.0, 0.0, CopulaRotation::survival);
    for (double u : {0.2, 0.5, 0.8}) {
        for (double v : {0.3, 0.6, 0.9}) {
            CHECK(copula_cdf(rot, u, v)
                  == Approx(u + v - 1.0 + copula_cdf(base, 1.0 - u, 1.0 - v)).margin(1e-12));
            CHECK(copula_pdf(rot, u, v)
                  == Approx(copula_pdf(base, 1.0 - u, 1.0 - v)).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(copula_cdf(spec_of(CopulaFamily::independence, 0.0, 0.0,
                                       CopulaRotation::survival), 0.5, 0.5),
                    DomainError);
}

TEST_CASE("parameter domain validation") {
    CHECK_THROWS_AS(copula_cdf(spec_of(CopulaFamily::gaussian, 1.0), 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(copula_cdf(spec_of(CopulaFamily::gumbel, 0.8), 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(copula_cdf(spec_of(CopulaFamily::clayton, 0.0), 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(copula_cdf(spec_of(CopulaFamily::bb8, 2.0, 1.2), 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(copula_cdf(spec_of(CopulaFamily::bb1, -0.1, 1.5), 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(copula_cdf(spec_of(CopulaFamily::frank, 1.0), 1.2, 0.5), DomainError);
}

TEST_CASE("frank reflection symmetry across the sign of theta") {
    // C_{-t}(u,v) = v - C_t(1-u, v): the negative-dependence evaluation is
    // a reflection of the positive one
    for (double t : {2.0, 15.0, 66.66}) {
        for (double u : {0.15, 0.5, 0.85}) {
            for (double v : {0.25, 0.7}) {
                CHECK(copula_cdf(spec_of(CopulaFamily::frank, -t), u, v)
                      == Approx(v - copula_cdf(spec_of(CopulaFamily::frank, t), 1.0 - u, v))
                             .margin(1e-12));
            }
        }
    }
}

TEST_CASE("closed-form conditional inverses round-trip through h") {
    for (double theta : {-50.0, -8.0, -1.0, 1.0, 5.0, 20.0, 50.0}) {
        const auto s = spec_of(CopulaFamily::frank, theta);
        for (double v : {0.1, 0.5, 0.9}) {
            for (double w : {0.05, 0.4, 0.95}) {
                const double u = copula_detail::frank_h_inverse(theta, w, v);
                CHECK(copula_h(s, u, v) == Approx(w).margin(1e-9));
            }
        }
    }
    for (double theta : {0.5, 2.0, 8.0}) {
        const auto s = spec_of(CopulaFamily::clayton, theta);
        for (double v : {0.1, 0.5, 0.9}) {
            for (double w : {0.05, 0.4, 0.95}) {
                const double u = copula_detail::clayton_h_inverse(theta, w, v);
                CHECK(copula_h(s, u, v) == Approx(w).margin(1e-9));
            }
        }
    }
}

TEST_CASE("sampling consistency") {
    SECTION("independence: empirical tau near zero") {
        Rng rng(100);
        const auto uv = copula_sample(spec_of(CopulaFamily::independence, 0.0), 10000, rng);
        std::vector<double> us, vs;
        for (const auto& [u, v] : uv) {
            us.push_back(u);
            vs.push_back(v);
        }
        CHECK(kendall_tau(us, vs) == Approx(0.0).margin(0.02));
    }
    SECTION("gaussian rho=0.5: tau near 1/3") {
        Rng rng(100);
        const auto uv = copula_sample(spec_of(CopulaFamily::gaussian, 0.5), 20000, rng);
        std::vector<double> us, vs;
        for (const auto& [u, v] : uv) {
            us.push_back(u);
            vs.push_back(v);
        }
        CHECK(kendall_tau(us, vs) == Approx(1.0 / 3.0).margin(0.02));
    }
    SECTION("numeric-inversion families hit their model tau") {
        for (const auto& s : {spec_of(CopulaFamily::gumbel, 2.0),
                              spec_of(CopulaFamily::bb8, 2.27, 0.9),
                              spec_of(CopulaFamily::joe, 2.0, 0.0, CopulaRotation::survival)}) {
            Rng rng(100);
            const auto uv = copula_sample(s, 20000, rng);
            std::vector<double> us, vs;
            for (const auto& [u, v] : uv) {
                us.push_back(u);
                vs.push_back(v);
            }
            CAPTURE(to_string(s.family));
            CHECK(kendall_tau(us, vs) == Approx(copula_tau(s)).margin(0.025));
        }
    }
    SECTION("fixed seed reproduces the draw") {
        Rng r1(42), r2(42);
        const auto a = copula_sample(spec_of(CopulaFamily::frank, 5.0), 500, r1);
        const auto b = copula_sample(spec_of(CopulaFamily::frank, 5.0), 500, r2);
        CHECK(a == b);
    }
    SECTION("empirical copula tracks the model CDF") {
        const auto s = spec_of(CopulaFamily::gumbel, 2.0);
        Rng rng(7);
        const std::size_t n = 100000;
        const auto uv = copula_sample(s, n, rng);
        double sup = 0.0;
        for (int i = 1; i < 10; ++i) {
            for (int j = 1; j < 10; ++j) {
                const double u = i / 10.0, v = j / 10.0;
                std::size_t count = 0;
                for (const auto& [a, b] : uv) count += (a <= u && b <= v);
                sup = std::max(sup, std::fabs(static_cast<double>(count) / n
                                              - copula_cdf(s, u, v)));
            }
        }
        CHECK(sup < 2.0 * 1.5 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("copula fitting") {
    SECTION("gumbel theta=2 recovery from 5000 samples") {
        Rng rng(100);
        const auto uv = copula_sample(spec_of(CopulaFamily::gumbel, 2.0), 5000, rng);
        const auto fit = copula_fit(CopulaFamily::gumbel, uv);
        CHECK(fit.spec.theta > 1.9);
        CHECK(fit.spec.theta < 2.1);
        CHECK(fit.n == 5000);
        CHECK(fit.aic == Approx(-2.0 * fit.loglik + 2.0));
        CHECK(fit.bic == Approx(-2.0 * fit.loglik + std::log(5000.0)));
        CHECK(fit.se_theta > 0.0);

        // optimality: at least as good as the generating parameters
        double ll_true = 0.0;
        for (const auto& [u, v] : uv)
            ll_true += copula_log_pdf(spec_of(CopulaFamily::gumbel, 2.0), u, v);
        CHECK(fit.loglik >= ll_true - 1e-6);
    }
    SECTION("independent data fit as frank lands near tau 0") {
        Rng rng(100);
        const auto uv = copula_sample(spec_of(CopulaFamily::independence, 0.0), 5000, rng);
        const auto fit = copula_fit(CopulaFamily::frank, uv);
        CHECK(std::fabs(fit.tau) < 0.03);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(copula_fit(CopulaFamily::frank,
                                   std::vector<std::pair<double, double>>(10, {0.5, 0.5})),
                        InsufficientDataError);
        std::vector<std::pair<double, double>> bad(50, {0.5, 0.5});
        bad[0] = {0.0, 0.5};
        CHECK_THROWS_AS(copula_fit(CopulaFamily::frank, bad), DomainError);
    }
}

TEST_CASE("copula selection") {
    SECTION("frank data selects frank under BIC") {
        Rng rng(2024);
        const auto uv = copula_sample(spec_of(CopulaFamily::frank, 10.0), 3000, rng);
        const auto sel = copula_select(uv, SelectionCriterion::bic);
        CHECK(sel.best.spec.family == CopulaFamily::frank);
        CHECK(sel.best.spec.theta == Approx(10.0).epsilon(0.05));
        CHECK(sel.ranked.size() >= 16);
        for (std::size_t i = 1; i < sel.ranked.size(); ++i)
            CHECK(sel.ranked[i - 1].bic <= sel.ranked[i].bic + 1e-9);
    }
    SECTION("independent uniforms select independence under BIC (k=0 advantage)") {
        Rng rng(5);
        const auto uv = copula_sample(spec_of(CopulaFamily::independence, 0.0), 2000, rng);
        const auto sel = copula_select(uv, SelectionCriterion::bic);
        CHECK(sel.best.spec.family == CopulaFamily::independence);
    }
}

TEST_CASE("numeric family codes") {
    CHECK(copula_family_from_code(5).first == CopulaFamily::frank);
    CHECK(copula_family_from_code(10).first == CopulaFamily::bb8);
    CHECK(copula_family_from_code(14).second == CopulaRotation::survival);
    CHECK(copula_family_from_code(14).first == CopulaFamily::gumbel);
    CHECK_THROWS_AS(copula_family_from_code(2), DomainError);   // t-copula unsupported
    CHECK_THROWS_AS(copula_family_from_code(23), DomainError);  // 90-degree rotations unsupported
}
