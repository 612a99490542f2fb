#include <doctest.h>

#include <cmath>

#include "gmtk/crofton.hpp"
#include "gmtk/selftest.hpp"

using namespace gmtk;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("sampled planes have orthogonal base points and the right shape") {
    Rng rng(31);
    Eigen::VectorXd base_mean = Eigen::VectorXd::Zero(3);
    const int N = 2000;
    for (int i = 0; i < N; ++i) {
        AffinePlane E = sample_affine_plane(3, 1, 2.0, rng);
        CHECK(E.dim() == 1);
        CHECK(E.ambient_dim() == 3);
        // base point orthogonal to the direction, inside the offset ball
        CHECK(E.direction.project(E.base).norm() == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(E.base.norm() <= 2.0 + 1e-12);
        base_mean += E.base / N;
    }
    CHECK(base_mean.norm() < 0.1); // symmetry of the offset distribution
}

TEST_CASE("deterministic intersection counts") {
    NewtonConfig cfg;

    // vertical line x = 0 meets the unit circle twice
    AffinePlane vline(LinearSubspace::coordinate(2, {1}), Eigen::Vector2d(0.0, 0.0));
    CHECK(intersect_count(scenes::circle(), vline, cfg).count == 2);

    // x = 0.5 meets the unit segment once; x = 2 misses it
    AffinePlane mid(LinearSubspace::coordinate(2, {1}), Eigen::Vector2d(0.5, 0.0));
    AffinePlane far(LinearSubspace::coordinate(2, {1}), Eigen::Vector2d(2.0, 0.0));
    CHECK(intersect_count(scenes::segment(), mid, cfg).count == 1);
    CHECK(intersect_count(scenes::segment(), far, cfg).count == 0);

    // horizontal tangent line y = 1 grazes the circle: unstable
    AffinePlane tangent(LinearSubspace::coordinate(2, {0}), Eigen::Vector2d(0.0, 1.0));
    CHECK(intersect_count(scenes::circle(), tangent, cfg).unstable);
}

TEST_CASE("crofton estimate recovers the segment length") {
    CroftonConfig cfg;
    cfg.samples = 20000;
    cfg.seed = 99;
    MeasureReport r = crofton_estimate(scenes::segment(), 1, cfg);
    CHECK(std::abs(r.value - 1.0) <= 3.0 * r.stderr_ + 1e-3);
    CHECK(r.stderr_ > 0.0);
    CHECK(r.unstable_fraction.value_or(0.0) <= 0.01);
}

TEST_CASE("estimate is invariant under a larger window") {
    CroftonConfig a;
    a.samples = 40000;
    a.seed = 5;
    CroftonConfig b = a;
    b.seed = 6;
    b.window_radius = 2.0 * scenes::circle().bbox_circumradius();
    MeasureReport ra = crofton_estimate(scenes::circle(), 1, a);
    MeasureReport rb = crofton_estimate(scenes::circle(), 1, b);
    CHECK(std::abs(ra.value - 2.0 * kPi) <= 3.0 * ra.stderr_ + 1e-2);
    CHECK(std::abs(rb.value - 2.0 * kPi) <= 3.0 * rb.stderr_ + 1e-2);
}

TEST_CASE("fixed seeds reproduce bit-identical reports") {
    CroftonConfig cfg;
    cfg.samples = 5000;
    cfg.seed = 17;
    MeasureReport a = crofton_estimate(scenes::segment(), 1, cfg);
    MeasureReport b = crofton_estimate(scenes::segment(), 1, cfg);
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("argument validation") {
    CroftonConfig cfg;
    cfg.samples = 10;
    CHECK_THROWS_AS(crofton_estimate(scenes::segment(), 2, cfg), ValidationError);
    CHECK_THROWS_AS(crofton_estimate(scenes::segment(), 0, cfg), ValidationError);
}
