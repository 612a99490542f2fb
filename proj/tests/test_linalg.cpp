#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmtk/linalg.hpp"

using namespace gmtk;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("grassmann distance is a metric on sampled subspaces") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + trial % 4; // 2..5
        int k = 1 + trial % std::max(1, n - 1);
        LinearSubspace a = haar_sample_subspace(n, k, rng);
        LinearSubspace b = haar_sample_subspace(n, k, rng);
        LinearSubspace c = haar_sample_subspace(n, k, rng);
        double dab = grassmann_distance(a, b);
        CHECK(dab >= 0.0);
        CHECK(dab <= 1.0 + 1e-12);
        CHECK(grassmann_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(dab == doctest::Approx(grassmann_distance(b, a)).epsilon(1e-12));
        CHECK(dab <= grassmann_distance(a, c) + grassmann_distance(c, b) + 1e-12);
    }
}

TEST_CASE("grassmann distance extremes") {
    LinearSubspace x = LinearSubspace::coordinate(2, {0});
    LinearSubspace y = LinearSubspace::coordinate(2, {1});
    CHECK(grassmann_distance(x, y) == doctest::Approx(1.0));
    // lines at angle theta: delta = |sin theta|
    for (double th : {0.1, 0.4, 1.2}) {
        Eigen::MatrixXd v(2, 1);
        v << std::cos(th), std::sin(th);
        CHECK(grassmann_distance(x, LinearSubspace::from_orthonormal(v)) ==
              doctest::Approx(std::sin(th)).epsilon(1e-12));
    }
}

TEST_CASE("line-to-subspace distance") {
    LinearSubspace xaxis = LinearSubspace::coordinate(3, {0});
    LinearSubspace xyplane = LinearSubspace::coordinate(3, {0, 1});
    LinearSubspace zaxis = LinearSubspace::coordinate(3, {2});
    CHECK(line_to_subspace_distance(xaxis, xyplane) == doctest::Approx(0.0));
    CHECK(line_to_subspace_distance(zaxis, xyplane) == doctest::Approx(1.0));
    Eigen::MatrixXd diag(3, 1);
    diag << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    CHECK(line_to_subspace_distance(LinearSubspace::from_orthonormal(diag), xyplane) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("haar sampling is rotation invariant in distribution") {
    // Kolmogorov-Smirnov on the distance-to-a-fixed-line statistic, sampled
    // directly and after a fixed rotation of the reference line.
    const int N = 4000;
    LinearSubspace ref = LinearSubspace::coordinate(2, {0});
    double th = 0.83;
    Eigen::MatrixXd rv(2, 1);
    rv << std::cos(th), std::sin(th);
    LinearSubspace rotated = LinearSubspace::from_orthonormal(rv);

    std::vector<double> a, b;
    Rng rng(9);
    for (int i = 0; i < N; ++i) {
        LinearSubspace s = haar_sample_subspace(2, 1, rng);
        a.push_back(grassmann_distance(s, ref));
        b.push_back(grassmann_distance(s, rotated));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        ks = std::max(ks, std::abs(static_cast<double>(i) - static_cast<double>(j)) / N);
    }
    CHECK(ks < 0.05); // ~1.36 sqrt(2/N) = 0.03 at the 5% level
}

TEST_CASE("beta constant closed forms") {
    CHECK(beta_constant(2, 1) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
    CHECK(beta_constant(3, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(beta_constant(3, 2) == doctest::Approx(0.5).epsilon(1e-14));
    for (int n = 1; n <= 8; ++n) {
        CHECK(beta_constant(n, n) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(beta_constant(n, 0) == doctest::Approx(1.0).epsilon(1e-14));
        for (int e = 0; e <= n; ++e)
            CHECK(beta_constant(n, e) ==
                  doctest::Approx(beta_constant(n, n - e)).epsilon(1e-14));
    }
}

TEST_CASE("sphere areas and ball volumes") {
    CHECK(sphere_area(1) == doctest::Approx(2.0));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi));
    CHECK(ball_volume(1) == doctest::Approx(2.0));
    CHECK(ball_volume(2) == doctest::Approx(kPi));
    CHECK(ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
}

TEST_CASE("affine plane base point is orthogonalized to the direction") {
    LinearSubspace dir = LinearSubspace::coordinate(2, {1});
    AffinePlane p(dir, Eigen::Vector2d(3.0, 5.0)); // y-component lies inside the plane
    CHECK(p.base[0] == doctest::Approx(3.0));
    CHECK(p.base[1] == doctest::Approx(0.0));
}
