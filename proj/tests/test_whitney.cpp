#include <doctest.h>

#include <cmath>

#include "gmtk/whitney.hpp"

using namespace gmtk;

namespace {
CellDomain unit_square() {
    return CellDomain::band_ext(CellDomain::interval(0.0, 1.0), VectorMap::parse(1, {"0"}),
                                VectorMap::parse(1, {"1"}), 0.0);
}
} // namespace

TEST_CASE("constant recursions") {
    CHECK(whitney_constants(1, 0.5).K == doctest::Approx(1.0));
    CHECK(whitney_constants(1, 0.5).k == doctest::Approx(0.5));
    // K(2,1) = K(1,1)(1+4) + 2 = 7
    CHECK(whitney_constants(2, 1.0).K == doctest::Approx(7.0));
    // k(2,L) = L * K(1, k(1,L)) = L
    for (double L : {0.25, 1.0, 3.0}) CHECK(whitney_constants(2, L).k == doctest::Approx(L));
    // monotone in both arguments
    CHECK(whitney_constants(3, 1.0).K > whitney_constants(2, 1.0).K);
    CHECK(whitney_constants(2, 2.0).K > whitney_constants(2, 1.0).K);
}

TEST_CASE("interval connection is the straight segment") {
    CellDomain iv = CellDomain::interval(0.0, 1.0);
    Eigen::VectorXd x(1), y(1);
    x[0] = 0.2;
    y[0] = 0.9;
    DefinableCurve c = connect_points(iv, x, y);
    CHECK((c.eval(0.0) - x).norm() <= 1e-14);
    CHECK((c.eval(1.0) - y).norm() <= 1e-14);
    CHECK(c.eval(0.5)[0] == doctest::Approx(0.55).epsilon(1e-14));
    CHECK(c.length() == doctest::Approx(0.7).epsilon(1e-12));
    for (double t : {0.1, 0.5, 0.8}) CHECK(c.derivative(t).norm() == doctest::Approx(0.7));
}

TEST_CASE("square diagonal is connected by the diagonal") {
    Eigen::Vector2d x(0.1, 0.1), y(0.9, 0.9);
    DefinableCurve c = connect_points(unit_square(), x, y);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        Eigen::VectorXd p = c.eval(t);
        CHECK(p[0] == doctest::Approx(0.1 + 0.8 * t).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.1 + 0.8 * t).epsilon(1e-12));
    }
    CHECK(c.length() == doctest::Approx(0.8 * std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("curved roof connections stay inside the cell") {
    CellDomain roof = CellDomain::band_ext(CellDomain::interval(0.5, 1.0),
                                           VectorMap::parse(1, {"0"}),
                                           VectorMap::parse(1, {"x^2"}), 2.0);
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        Eigen::VectorXd x = sample_cell_point(roof, rng);
        Eigen::VectorXd y = sample_cell_point(roof, rng);
        DefinableCurve c = connect_points(roof, x, y);
        CHECK((c.eval(0.0) - x).norm() <= 1e-12 * (1.0 + x.norm()));
        CHECK((c.eval(1.0) - y).norm() <= 1e-12 * (1.0 + y.norm()));
        for (int i = 1; i < 1000; ++i) {
            if (!roof.contains(c.eval(i / 1000.0))) {
                CHECK_MESSAGE(false, "curve left the cell at t = ", i / 1000.0);
                break;
            }
        }
    }
}

TEST_CASE("connect_points validates membership") {
    CellDomain iv = CellDomain::interval(0.0, 1.0);
    Eigen::VectorXd in(1), out(1);
    in[0] = 0.5;
    out[0] = 1.5;
    CHECK_THROWS_AS(connect_points(iv, in, out), ValidationError);
    CHECK_THROWS_AS(connect_points(iv, out, in), ValidationError);
}

TEST_CASE("verification passes with the derived bound and is deterministic") {
    CellDomain sq = unit_square();
    double K = whitney_constants(2, 1e-6).K;
    Rng r1(77), r2(77);
    WhitneyReport a = whitney_verify(sq, K, 200, r1);
    WhitneyReport b = whitney_verify(sq, K, 200, r2);
    CHECK(a.pass);
    CHECK(a.endpoint_failures == 0);
    CHECK(a.containment_failures == 0);
    CHECK(a.max_ratio <= K * (1.0 + 1e-8));
    CHECK(a.max_ratio == b.max_ratio);
    CHECK(a.max_pointwise_ratio == b.max_pointwise_ratio);

    // an impossible bound fails honestly
    Rng r3(78);
    WhitneyReport c = whitney_verify(sq, 0.5, 200, r3);
    CHECK_FALSE(c.pass);
}
