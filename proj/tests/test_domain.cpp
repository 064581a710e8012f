#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nmg/domain.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace nmg;

TEST_CASE("signed distance") {
    Domain1D om(-1.0, 1.0, 10.0);
    CHECK(signed_distance(om, 0.0) == doctest::Approx(-1.0));
    CHECK(signed_distance(om, 1.0) == 0.0);
    CHECK(signed_distance(om, 2.5) == doctest::Approx(1.5));
    CHECK(signed_distance(om, -3.0) == doctest::Approx(2.0));
    CHECK(signed_distance(om, 0.9) == doctest::Approx(-0.1));
}

TEST_CASE("signed distance is 1-Lipschitz on sampled pairs") {
    Domain1D om(-0.3, 2.0, 5.0);
    auto gen = oracle::rng(7);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        double x = U(gen), y = U(gen);
        CHECK(std::abs(signed_distance(om, x) - signed_distance(om, y)) <=
              std::abs(x - y) + 1e-14);
    }
}

TEST_CASE("delta neighborhood dilates, keeps, erodes and rejects") {
    Domain1D om(-1.0, 1.0, 10.0);
    auto d1 = delta_neighborhood(om, 0.5);
    CHECK(d1.a == doctest::Approx(-1.5));
    CHECK(d1.b == doctest::Approx(1.5));
    auto d2 = delta_neighborhood(om, 0.0);
    CHECK(d2.a == -1.0);
    CHECK(d2.b == 1.0);
    auto d3 = delta_neighborhood(om, -0.25);
    CHECK(d3.a == doctest::Approx(-0.75));
    CHECK(d3.b == doctest::Approx(0.75));
    CHECK_THROWS(delta_neighborhood(om, -1.0));
    // nesting under delta ordering
    for (double da : {-0.4, 0.0, 0.3}) {
        for (double db : {-0.4, 0.0, 0.3}) {
            if (da > db) continue;
            auto A = delta_neighborhood(om, da), B = delta_neighborhood(om, db);
            CHECK(A.a >= B.a - 1e-14);
            CHECK(A.b <= B.b + 1e-14);
        }
    }
}

TEST_CASE("grid aligns Omega endpoints and masks") {
    Domain1D om(-1.0, 1.0, 20.0);
    auto obs = ObstacleSpec::constant(-0.4, 0.4, 0.5);
    Grid1D g = make_grid(om, obs, 1.0 / 64);
    CHECK(g.node(g.i_a) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(g.node(g.i_b) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.h == doctest::Approx(1.0 / 64));
    CHECK_FALSE(g.interior(g.i_a));
    CHECK_FALSE(g.interior(g.i_b));
    CHECK(g.interior(g.i_a + 1));
    for (int i : g.obstacle_nodes()) {
        CHECK(g.node(i) > -0.4);
        CHECK(g.node(i) < 0.4);
        CHECK(g.interior(i));
    }
    CHECK(g.obstacle_nodes().size() > 0);
}

TEST_CASE("tail closed form for constant data on a bounded window piece") {
    // int_2^3 y^(-1.5) dy = 2 (1/sqrt(2) - 1/sqrt(3))
    KernelSpec k(1, 0.5);
    Domain1D om(-1.0, 1.0, 50.0);
    auto phi = ExteriorData::constant(1.0);
    auto r = tail(k, phi, om, {{2.0, 3.0}}, 0.0);
    CHECK(r.value == doctest::Approx(2.0 * (1.0 / std::sqrt(2.0) - 1.0 / std::sqrt(3.0)))
                         .epsilon(1e-10));
    // zero data
    auto r0 = tail(k, ExteriorData::constant(0.0), om, {{2.0, 3.0}}, 0.0);
    CHECK(r0.value == 0.0);
}

TEST_CASE("tail is linear in a signed constant") {
    KernelSpec k(1, 0.3);
    Domain1D om(-1.0, 1.0, 30.0);
    auto r1 = tail(k, ExteriorData::constant(-0.7), om, {{1.5, 9.0}}, 0.2);
    auto r2 = tail(k, ExteriorData::constant(-1.4), om, {{1.5, 9.0}}, 0.2);
    CHECK(r2.value == doctest::Approx(2.0 * r1.value).epsilon(1e-12));
}

TEST_CASE("tail of unbounded constant data uses the analytic power law") {
    KernelSpec k(1, 0.5);
    Domain1D om(-1.0, 1.0, 10.0);
    auto phi = ExteriorData::constant(2.0);
    double inf = std::numeric_limits<double>::infinity();
    auto r = tail(k, phi, om, {{2.0, inf}}, 0.0);
    // int_2^inf 2 y^(-1.5) dy = 2 * 2 / sqrt(2)
    double expect = 2.0 * 2.0 / std::sqrt(2.0);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("tail of linearly growing data diverges") {
    KernelSpec k(1, 0.5);
    Domain1D om(-1.0, 1.0, 10.0);
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(tail(k, ExteriorData::cone(0.0, 0.0, 1.0), om, {{1.0, inf}}, 0.0),
                    TailDivergence);
    CHECK_THROWS_AS(tail(k, ExteriorData::affine(0.0, 0.5), om, {{-inf, -1.0}}, 0.0),
                    TailDivergence);
    // cone with m = kappa is asymptotically constant on the right: converges there
    auto r = tail(k, ExteriorData::cone(1.0, 1.0, 1.0), om, {{1.0, inf}}, 0.0);
    CHECK(std::isfinite(r.value));
}

TEST_CASE("tail of a cone over a bounded region matches a brute-force oracle") {
    KernelSpec k(1, 0.5);
    Domain1D om(-1.0, 1.0, 20.0);
    auto phi = ExteriorData::cone(0.3, 0.0, 1.0);
    double x = 0.1;
    auto r = tail(k, phi, om, {{1.0, 21.0}, {-21.0, -1.0}}, x);
    double b1 = oracle::integrate(
        [&](double y) { return std::abs(0.3 - std::abs(y)) * std::pow(std::abs(x - y), -1.5); },
        1.0, 21.0, 1e-11);
    double b2 = oracle::integrate(
        [&](double y) { return std::abs(0.3 - std::abs(y)) * std::pow(std::abs(x - y), -1.5); },
        -21.0, -1.0, 1e-11);
    CHECK(r.value == doctest::Approx(b1 + b2).epsilon(1e-8));
}

TEST_CASE("tail rejects regions overlapping Omega") {
    KernelSpec k(1, 0.5);
    Domain1D om(-1.0, 1.0, 10.0);
    CHECK_THROWS(tail(k, ExteriorData::constant(1.0), om, {{0.5, 2.0}}, 0.0));
    CHECK_THROWS(tail(k, ExteriorData::constant(1.0), om, {{2.0, 3.0}}, 1.5));
}

TEST_CASE("exterior data slopes and subgraph alpha") {
    auto cone = ExteriorData::cone(0.0, 0.0, 1.0);
    CHECK(cone.subgraph_alpha() == doctest::Approx(0.5 * M_PI).epsilon(1e-14));
    auto cone2 = ExteriorData::cone(0.0, 0.0, 2.0);
    CHECK(cone2.subgraph_alpha() == doctest::Approx(2.0 * std::atan(0.5)).epsilon(1e-14));
    auto rev = ExteriorData::cone(0.0, 0.0, -2.0);
    CHECK(rev.subgraph_alpha() ==
          doctest::Approx(2.0 * M_PI - 2.0 * std::atan(0.5)).epsilon(1e-14));
    CHECK(ExteriorData::affine(1.0, 0.7).subgraph_alpha() == doctest::Approx(M_PI));
    CHECK(ExteriorData::constant(-2.0).subgraph_alpha() == doctest::Approx(M_PI));
    CHECK_THROWS(ExteriorData::cone(0.0, 0.0, 0.0));
}

TEST_CASE("obstacle sup norm with eps scaling") {
    Domain1D om(-1.0, 1.0, 10.0);
    auto o = ObstacleSpec::constant(-0.4, 0.4, 0.5, 0.25);
    CHECK(o.sup_scaled(om) == doctest::Approx(0.125));
    auto q = ObstacleSpec::quadratic(-0.5, 0.5, 0.2, -1.0, 1.0);
    CHECK(q.sup_scaled(om) == doctest::Approx(0.2));  // max |0.2 - x^2| on A is at x=0
    CHECK(ObstacleSpec::none().sup_scaled(om) == 0.0);
}
