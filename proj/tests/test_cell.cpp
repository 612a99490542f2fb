#include <doctest.h>

#include <cmath>
#include <limits>

#include "gmtk/cell.hpp"
#include "gmtk/rng.hpp"

using namespace gmtk;

namespace {
CellDomain unit_square() {
    return CellDomain::band_ext(CellDomain::interval(0.0, 1.0), VectorMap::parse(1, {"0"}),
                                VectorMap::parse(1, {"1"}), 0.0);
}
} // namespace

TEST_CASE("cell dimensions and patterns") {
    CellDomain pt = CellDomain::point(0.5);
    CHECK(pt.dim() == 0);
    CHECK(pt.ambient_dim() == 1);

    CellDomain iv = CellDomain::interval(0.0, 1.0);
    CHECK(iv.dim() == 1);
    CHECK(iv.is_open());

    CellDomain graph = CellDomain::graph_ext(iv, VectorMap::parse(1, {"x^2"}), 2.0);
    CHECK(graph.dim() == 1);
    CHECK(graph.ambient_dim() == 2);
    CHECK_FALSE(graph.is_open());
    CHECK(graph.pattern() == std::vector<int>{1, 0});

    CellDomain band = unit_square();
    CHECK(band.dim() == 2);
    CHECK(band.is_open());
    CHECK(band.pattern() == std::vector<int>{1, 1});
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(CellDomain::interval(1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(CellDomain::graph_ext(CellDomain::interval(0.0, 1.0),
                                          VectorMap::parse(2, {"x + y"}), 1.0),
                    ValidationError); // bound function arity mismatch
}

TEST_CASE("membership is strict on open directions") {
    CellDomain roof = CellDomain::band_ext(CellDomain::interval(0.5, 1.0),
                                           VectorMap::parse(1, {"0"}),
                                           VectorMap::parse(1, {"x^2"}), 2.0);
    CHECK(roof.contains(Eigen::Vector2d(0.7, 0.2)));
    CHECK_FALSE(roof.contains(Eigen::Vector2d(0.5, 0.1)));  // base endpoint
    CHECK_FALSE(roof.contains(Eigen::Vector2d(0.7, 0.49))); // on the roof
    CHECK_FALSE(roof.contains(Eigen::Vector2d(0.7, 0.0)));  // on the floor

    CellDomain graph = CellDomain::graph_ext(CellDomain::interval(0.0, 1.0),
                                             VectorMap::parse(1, {"x^2"}), 2.0);
    CHECK(graph.contains(Eigen::Vector2d(0.5, 0.25)));
    CHECK_FALSE(graph.contains(Eigen::Vector2d(0.5, 0.3)));
}

TEST_CASE("chart covers the cell and its jacobian matches finite differences") {
    CellDomain roof = CellDomain::band_ext(CellDomain::interval(0.5, 1.0),
                                           VectorMap::parse(1, {"0"}),
                                           VectorMap::parse(1, {"x^2"}), 2.0);
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::Vector2d u(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95));
        Eigen::VectorXd x;
        Eigen::MatrixXd jac;
        roof.chart_with_jacobian(u, x, jac);
        CHECK(roof.contains(x));
        const double h = 1e-6;
        for (int i = 0; i < 2; ++i) {
            Eigen::Vector2d hi = u, lo = u;
            hi[i] += h;
            lo[i] -= h;
            Eigen::VectorXd fd = (roof.chart(hi) - roof.chart(lo)) / (2.0 * h);
            for (int r = 0; r < 2; ++r) CHECK(jac(r, i) == doctest::Approx(fd[r]).epsilon(1e-5));
        }
    }
}

TEST_CASE("chain bound takes the max along the constructor chain") {
    CellDomain c = CellDomain::band_ext(
        CellDomain::graph_ext(CellDomain::interval(0.0, 1.0), VectorMap::parse(1, {"x^2"}), 2.0),
        VectorMap::parse(2, {"0"}), VectorMap::parse(2, {"1"}), 0.5);
    CHECK(c.chain_bound() == doctest::Approx(2.0));
}

TEST_CASE("cell_to_graph on a graph over an interval is the identity rewrite") {
    CellDomain graph = CellDomain::graph_ext(CellDomain::interval(0.0, 1.0),
                                             VectorMap::parse(1, {"x^2"}), 2.0);
    GraphForm gf = cell_to_graph(graph);
    CHECK(gf.open_cell.dim() == 1);
    CHECK(gf.map.codomain_dim == 1);
    Eigen::VectorXd x(1);
    x[0] = 0.4;
    CHECK(gf.map.eval(x)[0] == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(gf.permutation == std::vector<int>{0, 1});
}

TEST_CASE("cell_to_graph realizes band-over-graph cells faithfully") {
    // band 0 < z < 1 over the graph y = x^2: realization is a 2-cell in R^3
    CellDomain base = CellDomain::graph_ext(CellDomain::interval(0.0, 1.0),
                                            VectorMap::parse(1, {"x^2"}), 2.0);
    CellDomain cell = CellDomain::band_ext(base, VectorMap::parse(2, {"0"}),
                                           VectorMap::parse(2, {"1"}), 0.0);
    GraphForm gf = cell_to_graph(cell);
    CHECK(gf.open_cell.dim() == 2);
    CHECK(gf.open_cell.is_open());

    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::Vector2d u(rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99));
        Eigen::VectorXd b = gf.open_cell.chart(u);
        Eigen::VectorXd m = gf.map.eval(b);
        Eigen::VectorXd point(3);
        for (int i = 0; i < 2; ++i) point[gf.permutation[i]] = b[i];
        point[gf.permutation[2]] = m[0];
        CHECK(cell.contains(point, 1e-9));
    }
    // recorded bounds follow the recursion, not the particular functions
    CHECK(gf.map_bound >= 2.0);
}

TEST_CASE("cell_to_graph rejects infinite declared bounds") {
    CellDomain disk = CellDomain::band_ext(CellDomain::interval(-0.6, 0.6),
                                           VectorMap::parse(1, {"-sqrt(0.36 - x^2)"}),
                                           VectorMap::parse(1, {"sqrt(0.36 - x^2)"}),
                                           std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(cell_to_graph(disk), ValidationError);
}
