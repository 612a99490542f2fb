#include <doctest.h>

#include <cmath>

#include "gmtk/measure.hpp"
#include "gmtk/selftest.hpp"

using namespace gmtk;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("J_e closed forms") {
    // identity in R^n, e = n -> 1
    for (int n = 1; n <= 4; ++n) {
        JacobianValue v = jacobian_Je_matrix(Eigen::MatrixXd::Identity(n, n), n);
        CHECK(v.finite);
        CHECK(v.value == doctest::Approx(1.0));
    }
    // F(u) = (u, 2u): minors (1, 2), J_1 = sqrt(5)
    Eigen::MatrixXd d(2, 1);
    d << 1.0, 2.0;
    CHECK(jacobian_Je_matrix(d, 1).value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    // rank clause: identity R^2, e = 1 -> infinite
    CHECK_FALSE(jacobian_Je_matrix(Eigen::MatrixXd::Identity(2, 2), 1).finite);
    // e = 0 is the counting convention
    CHECK(jacobian_Je_matrix(d, 0).value == doctest::Approx(1.0));
}

TEST_CASE("Cauchy-Binet: Gram route equals minor enumeration") {
    Rng rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        int m = 1 + trial % 5, d = 1 + (trial / 5) % 5;
        int e = 1 + trial % std::min(m, d);
        Eigen::MatrixXd deriv(m, d);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < d; ++c) deriv(r, c) = rng.gaussian();
        JacobianValue a = jacobian_Je_matrix(deriv, e);
        JacobianValue b = jacobian_Je_minors(deriv, e);
        CHECK(a.finite == b.finite);
        if (a.finite && b.finite)
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));
    }
}

TEST_CASE("area measure of reference patches") {
    CHECK(area_measure(scenes::segment().patches[0]).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(area_measure(scenes::circle().patches[0]).value ==
          doctest::Approx(2.0 * kPi).epsilon(1e-9));
    CHECK(area_measure(scenes::sphere_cap().patches[0]).value ==
          doctest::Approx(0.4 * kPi).epsilon(1e-6 / (0.4 * kPi)));
    double parabola_len = std::sqrt(5.0) / 2.0 + std::asinh(2.0) / 4.0;
    CHECK(area_measure(scenes::parabola().patches[0]).value ==
          doctest::Approx(parabola_len).epsilon(1e-9));
}

TEST_CASE("H^0 counts points and lower-dimensional patches vanish") {
    CHECK(hausdorff_measure(scenes::points(), 0).value == doctest::Approx(3.0));
    CHECK(hausdorff_measure(scenes::points(), 1).value == doctest::Approx(0.0));
    Scene mixed = scenes::segment();
    mixed.patches.push_back(Patch::point(Eigen::Vector2d(0.5, 0.5)));
    CHECK(hausdorff_measure(mixed, 1).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(hausdorff_measure(mixed, 0), ValidationError); // 1-patch exceeds e=0
}

TEST_CASE("H^n equals the elementary volume on a box") {
    // open box (0, 0.5) x (0, 0.25) as a full-dimensional graph patch
    Scene s;
    s.ambient_dim = 2;
    CellDomain box = CellDomain::band_ext(CellDomain::interval(0.0, 0.5),
                                          VectorMap::parse(1, {"0"}),
                                          VectorMap::parse(1, {"0.25"}), 0.0);
    s.patches.push_back(Patch::graph(2, 2, {0, 1}, box, VectorMap(2, {}), 0.0));
    refresh_bounding_box(s);
    CHECK(hausdorff_measure(s, 2).value == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("well-definedness: circle as one parametric patch vs four graph arcs") {
    double one_patch = hausdorff_measure(scenes::circle(), 1).value;

    // four arcs: upper/lower graphs y = +-sqrt(1-x^2) over (-s, s), s = sin(pi/4),
    // and left/right graphs x = +-sqrt(1-y^2)
    Scene four;
    four.ambient_dim = 2;
    double s = std::sqrt(0.5);
    CellDomain base = CellDomain::interval(-s, s);
    four.patches.push_back(Patch::graph(2, 1, {0, 1}, base,
                                        VectorMap::parse(1, {"sqrt(1 - x^2)"}), 1.0000001));
    four.patches.push_back(Patch::graph(2, 1, {0, 1}, base,
                                        VectorMap::parse(1, {"-sqrt(1 - x^2)"}), 1.0000001));
    four.patches.push_back(Patch::graph(2, 1, {1, 0}, base,
                                        VectorMap::parse(1, {"sqrt(1 - x^2)"}), 1.0000001));
    four.patches.push_back(Patch::graph(2, 1, {1, 0}, base,
                                        VectorMap::parse(1, {"-sqrt(1 - x^2)"}), 1.0000001));
    refresh_bounding_box(four);
    // the four open arcs miss the 4 junction points (measure zero) but cover
    // the circle twice near nothing: expect 2 pi minus nothing, within 1%
    double four_val = hausdorff_measure(four, 1).value;
    CHECK(std::abs(four_val - one_patch) <= 0.01 * one_patch);
}

TEST_CASE("transform_scene rejects shears") {
    Eigen::MatrixXd shear(2, 2);
    shear << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(transform_scene(scenes::segment(), shear, Eigen::Vector2d::Zero()),
                    ValidationError);
}

TEST_CASE("measure reports serialize deterministically") {
    MeasureReport r = hausdorff_measure(scenes::segment(), 1);
    CHECK(r.to_json() == hausdorff_measure(scenes::segment(), 1).to_json());
    CHECK(r.to_json().find("\"method\": \"area\"") != std::string::npos);
}
