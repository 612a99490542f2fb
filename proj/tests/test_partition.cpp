#include <doctest.h>

#include <cmath>

#include "gmtk/measure.hpp"
#include "gmtk/partition.hpp"
#include "gmtk/selftest.hpp"

using namespace gmtk;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("band volume closed forms") {
    CHECK(band_volume(2, 0.0) == doctest::Approx(0.0));
    // n = 2: arc measure of {|sin theta| <= 2 eps} is 4 asin(2 eps)
    for (double eps : {0.05, 0.1, 0.2, 0.24}) {
        CHECK(band_volume(2, eps) ==
              doctest::Approx(4.0 * std::asin(2.0 * eps)).epsilon(1e-12));
    }
    CHECK(band_volume(2, 0.25) == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));
    // n = 3: exact band area on S^2 is 2 * 2 pi * (2 eps)
    for (double eps : {0.02, 0.1, 0.2}) {
        CHECK(band_volume(3, eps) == doctest::Approx(8.0 * kPi * eps).epsilon(1e-12));
    }
    // saturation: the band covers the whole sphere once 2 eps >= 1
    CHECK(band_volume(3, 0.5) == doctest::Approx(sphere_area(3)).epsilon(1e-12));
    CHECK(band_volume(1, 0.2) == doctest::Approx(0.0));
    CHECK(band_volume(1, 0.6) == doctest::Approx(2.0));
}

TEST_CASE("epsilon_n is the maximal dyadic value below the threshold") {
    CHECK(epsilon_n(1) == doctest::Approx(0.25));
    CHECK(epsilon_n(2) == doctest::Approx(0.1913).epsilon(1e-3));
    const double step = 1.0 / 65536.0;
    for (int n = 2; n <= 6; ++n) {
        double eps = epsilon_n(n);
        CHECK(2.0 * n * band_volume(n, eps) < sphere_area(n));
        CHECK(2.0 * n * band_volume(n, eps + step) >= sphere_area(n));
    }
}

TEST_CASE("partition constants are monotone and dominate the slope formula") {
    double prev_M = 0.0;
    for (int n = 2; n <= 6; ++n) {
        PartitionConstants c = partition_constants(n);
        CHECK(c.epsilon > 0.0);
        CHECK(c.M >= std::sqrt(4.0 / (c.epsilon * c.epsilon) - 1.0));
        CHECK(c.M >= prev_M);
        // dyadic with denominator 256
        CHECK(c.M * 256.0 == doctest::Approx(std::round(c.M * 256.0)).epsilon(1e-12));
        prev_M = c.M;
    }
    CHECK(partition_constants(2).M == doctest::Approx(10.41).epsilon(1e-2));
}

TEST_CASE("transverse direction avoids every listed tangent") {
    Rng rng(9);
    std::vector<LinearSubspace> tangents;
    for (int i = 0; i < 4; ++i) tangents.push_back(haar_sample_subspace(3, 2, rng));
    double eps = epsilon_n(3);
    LinearSubspace dir = choose_transverse_direction(tangents, eps, rng);
    CHECK(dir.dim() == 1);
    for (const auto& t : tangents) CHECK(line_to_subspace_distance(dir, t) > eps);

    // infeasible request: lines in R^2 cannot all stay far from 3 spread lines
    std::vector<LinearSubspace> crowded;
    for (int i = 0; i < 64; ++i) {
        double th = kPi * i / 64.0;
        Eigen::MatrixXd v(2, 1);
        v << std::cos(th), std::sin(th);
        crowded.push_back(LinearSubspace::from_span(v));
    }
    CHECK_THROWS_AS(choose_transverse_direction(crowded, 0.9, rng), NumericalError);
}

TEST_CASE("eflat refinement leaves affine patches whole and splits the circle") {
    Scene seg = scenes::segment();
    auto pieces = eflat_refine(seg.patches[0], epsilon_n(2));
    CHECK(pieces.size() == 1);
    CHECK_FALSE(pieces[0].unverified);

    Scene circle = scenes::circle();
    auto arcs = eflat_refine(circle.patches[0], epsilon_n(2));
    CHECK(arcs.size() >= 17);
    CHECK(arcs.size() <= 64);
    for (const auto& a : arcs) {
        CHECK_FALSE(a.unverified);
        CHECK(tangent_spread(a) < epsilon_n(2));
    }
}

TEST_CASE("graphify straightens a tilted segment") {
    // y = x over (0,1): after rotation the slope must be ~0
    Scene tilted;
    tilted.ambient_dim = 2;
    tilted.patches.push_back(Patch::graph(2, 1, {0, 1}, CellDomain::interval(0.0, 1.0),
                                          VectorMap::parse(1, {"x"}), 1.0));
    refresh_bounding_box(tilted);
    Patch g = graphify(tilted.patches[0], partition_constants(2));
    CHECK(g.graph_over_first_e);
    Eigen::VectorXd u(1);
    u[0] = 0.4;
    Eigen::VectorXd x;
    Eigen::MatrixXd jac;
    g.eval_with_jacobian(u, x, jac);
    CHECK(std::abs(jac(1, 0) / jac(0, 0)) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("rectifiable partition of the circle is measure preserving") {
    Scene part = rectifiable_partition(scenes::circle(), 1);
    CHECK(part.patches.size() >= 17);
    for (const auto& p : part.patches) {
        CHECK(p.graph_over_first_e);
        CHECK_FALSE(p.unverified);
    }
    double total = hausdorff_measure(part, 1).value;
    CHECK(std::abs(total - 2.0 * kPi) <= 0.01 * 2.0 * kPi);
}

TEST_CASE("kink declarations split the patch before refinement") {
    Scene vee;
    vee.ambient_dim = 2;
    vee.patches.push_back(Patch::graph(2, 1, {0, 1}, CellDomain::interval(0.0, 1.0),
                                       VectorMap::parse(1, {"abs(x - 0.5)"}), 1.0));
    vee.kinks.push_back(KinkSpec{0, 0, {0.5}});
    refresh_bounding_box(vee);
    Scene part = rectifiable_partition(vee, 1);
    for (const auto& p : part.patches) {
        CHECK_FALSE(p.unverified);
        // no piece straddles the kink
        CHECK((p.box_hi[0] <= 0.5 + 1e-12 || p.box_lo[0] >= 0.5 - 1e-12));
    }
    double total = hausdorff_measure(part, 1).value;
    CHECK(total == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}
