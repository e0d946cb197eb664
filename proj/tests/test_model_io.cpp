#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "anemo/model_io.hpp"

using namespace anemo;
using Catch::Approx;

TEST_CASE("regression document round trip") {
    PersistedRegression p;
    p.model.kind = RegressorKind::ridge;
    p.model.intercept = 1.25;
    p.model.coefficients = {0.5, -2.0, 3.75};
    p.model.hyperparams = {{"lambda", 0.01}};
    p.column_names = {"temp", "pressure", "shear"};
    p.response = "speed80";
    ScalerParams s;
    s.column_names = p.column_names;
    s.mins = {0, 900, -1};
    s.maxs = {40, 1100, 1};
    s.degenerate = {false, false, false};
    p.scaler = s;

    const auto j = to_json(p);
    const auto back = regression_from_json(j);
    CHECK(back.model.kind == RegressorKind::ridge);
    CHECK(back.model.intercept == 1.25);
    CHECK(back.model.coefficients == p.model.coefficients);
    CHECK(back.model.hyperparams.at("lambda") == 0.01);
    CHECK(back.column_names == p.column_names);
    CHECK(back.response == "speed80");
    REQUIRE(back.scaler.has_value());
    CHECK(back.scaler->mins == s.mins);

    SECTION("design_for validates column names") {
        const Dataset ok({"shear", "temp", "pressure"},
                         {{0.1, 0.2}, {10, 20}, {1000, 1010}});
        const Matrix X = design_for(back, ok);
        CHECK(X(0, 0) == 10.0);    // temp is the first trained column
        CHECK(X(0, 2) == 0.1);     // shear mapped into training order
        const Dataset missing({"temp", "pressure"}, {{10, 20}, {1000, 1010}});
        CHECK_THROWS_AS(design_for(back, missing), DomainError);
    }
}

TEST_CASE("marginal and copula documents round trip") {
    MarginalFit m;
    m.dist = {DistributionKind::weibull, 2.254787, 6.922302};
    m.loglik = -21011.08;
    m.aic = 42026.16;
    m.bic = 42040.27;
    m.se1 = 0.0193;
    m.se2 = 0.0349;
    m.n = 8570;
    const auto back = marginal_from_json(to_json(m));
    CHECK(back.dist.kind == DistributionKind::weibull);
    CHECK(back.dist.p1 == 2.254787);
    CHECK(back.bic == Approx(42040.27));
    CHECK(back.n == 8570);

    CopulaFit c;
    c.spec = {CopulaFamily::bb8, CopulaRotation::none, 2.27, 0.9};
    c.loglik = -100.0;
    c.tau = 0.3135;
    c.n = 8570;
    const auto cback = copula_from_json(to_json(c));
    CHECK(cback.spec.family == CopulaFamily::bb8);
    CHECK(cback.spec.theta == 2.27);
    CHECK(cback.spec.delta == 0.9);
    CHECK(cback.tau == Approx(0.3135));

    SECTION("single-parameter families omit delta") {
        CopulaFit g;
        g.spec = {CopulaFamily::gumbel, CopulaRotation::survival, 1.33, 0.0};
        const auto jj = to_json(g);
        CHECK_FALSE(jj["fit"].contains("delta"));
        const auto gback = copula_from_json(jj);
        CHECK(gback.spec.rotation == CopulaRotation::survival);
    }
}

TEST_CASE("joint document round trip") {
    JointModel j;
    j.marginal_1.dist = {DistributionKind::weibull, 2.254787, 6.922302};
    j.marginal_2.dist = {DistributionKind::weibull, 2.43, 7.79};
    j.copula.spec = {CopulaFamily::bb8, CopulaRotation::none, 2.27, 0.9};
    j.label_1 = "p";
    j.label_2 = "q";
    const auto back = joint_from_json(to_json(j));
    CHECK(back.label_1 == "p");
    CHECK(back.marginal_2.dist.p2 == 7.79);
    CHECK(back.copula.spec.family == CopulaFamily::bb8);
}

TEST_CASE("document validation") {
    SECTION("wrong kind") {
        MarginalFit m;
        m.dist = {DistributionKind::gamma, 2.0, 1.0};
        const auto j = to_json(m);
        CHECK_THROWS_AS(copula_from_json(j), Error);
    }
    SECTION("unsupported format version") {
        MarginalFit m;
        m.dist = {DistributionKind::gamma, 2.0, 1.0};
        auto j = to_json(m);
        j["format_version"] = 999;
        CHECK_THROWS_AS(marginal_from_json(j), Error);
    }
    SECTION("invalid parameters are rejected on load") {
        MarginalFit m;
        m.dist = {DistributionKind::weibull, 2.0, 1.0};
        auto j = to_json(m);
        j["fit"]["params"][0] = -1.0;
        CHECK_THROWS_AS(marginal_from_json(j), DomainError);
    }
}
