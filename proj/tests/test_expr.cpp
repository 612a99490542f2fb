#include <doctest.h>

#include <cmath>

#include "gmtk/expr.hpp"
#include "gmtk/rng.hpp"

using namespace gmtk;

TEST_CASE("parser evaluates standard forms") {
    auto names = default_var_names(2);
    Eigen::Vector2d p(0.3, -0.7);
    CHECK(parse_expr("x + 2*y", names).eval(p) == doctest::Approx(0.3 - 1.4));
    CHECK(parse_expr("x^3 - y^2", names).eval(p) ==
          doctest::Approx(0.3 * 0.3 * 0.3 - 0.49).epsilon(1e-14));
    CHECK(parse_expr("sin(x)*cos(y) + exp(x*y)", names).eval(p) ==
          doctest::Approx(std::sin(0.3) * std::cos(-0.7) + std::exp(-0.21)).epsilon(1e-14));
    CHECK(parse_expr("min(x, y)", names).eval(p) == doctest::Approx(-0.7));
    CHECK(parse_expr("max(x, abs(y))", names).eval(p) == doctest::Approx(0.7));
    CHECK(parse_expr("pi", names).eval(p) == doctest::Approx(3.14159265358979324));
    CHECK(parse_expr("-x + (y - 1)/2", names).eval(p) ==
          doctest::Approx(-0.3 + (-0.7 - 1.0) / 2.0));
}

TEST_CASE("parser rejects malformed input") {
    auto names = default_var_names(1);
    CHECK_THROWS_AS(parse_expr("x +", names), ParseError);
    CHECK_THROWS_AS(parse_expr("sin()", names), ParseError);
    CHECK_THROWS_AS(parse_expr("nope(x)", names), ParseError);
    CHECK_THROWS_AS(parse_expr("y", names), ParseError); // unknown variable for d = 1
    CHECK_THROWS_AS(parse_expr("(x", names), ParseError);
}

TEST_CASE("forward gradients match central differences") {
    std::vector<std::string> texts = {
        "x^3 - 2*x*y + sin(x*y)",
        "sqrt(x^2 + y^2 + 1)",
        "exp(x - y)*cos(3*x)",
        "x/(1 + y^2)",
        "max(x, y) + min(2*x, y - 1)",
    };
    auto names = default_var_names(2);
    Rng rng(3);
    for (const auto& text : texts) {
        Expr e = parse_expr(text, names);
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::Vector2d p(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            Dual d = e.eval_dual(p);
            CHECK(d.v == doctest::Approx(e.eval(p)).epsilon(1e-13));
            const double h = 1e-6;
            for (int i = 0; i < 2; ++i) {
                Eigen::Vector2d hi = p, lo = p;
                hi[i] += h;
                lo[i] -= h;
                double fd = (e.eval(hi) - e.eval(lo)) / (2.0 * h);
                CHECK(d.g[i] == doctest::Approx(fd).epsilon(5e-5));
            }
        }
    }
}

TEST_CASE("kink derivatives take the left branch") {
    auto names = default_var_names(1);
    Eigen::VectorXd zero(1);
    zero[0] = 0.0;
    CHECK(parse_expr("abs(x)", names).eval_dual(zero).g[0] == doctest::Approx(-1.0));
    // min/max at a tie differentiate through the first argument
    CHECK(parse_expr("min(x, 2*x)", names).eval_dual(zero).g[0] == doctest::Approx(1.0));
    CHECK(parse_expr("max(x, 3*x)", names).eval_dual(zero).g[0] == doctest::Approx(1.0));
}

TEST_CASE("to_string round-trips through the parser") {
    auto names = default_var_names(2);
    std::vector<std::string> texts = {"x^3 - 2*x*y + sin(x*y)", "sqrt(x^2 + y^2 + 1)",
                                      "max(x, abs(y))/(1 + x^2)"};
    Rng rng(4);
    for (const auto& text : texts) {
        Expr e = parse_expr(text, names);
        Expr back = parse_expr(e.to_string(names), names);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::Vector2d p(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            CHECK(back.eval(p) == doctest::Approx(e.eval(p)).epsilon(1e-14));
        }
    }
}

TEST_CASE("substitution composes structurally") {
    auto n1 = default_var_names(1);
    Expr outer = parse_expr("x^2 + 1", n1);
    Expr inner = parse_expr("sin(x)", n1);
    Expr composed = outer.substitute({inner});
    Eigen::VectorXd p(1);
    p[0] = 0.6;
    CHECK(composed.eval(p) ==
          doctest::Approx(std::sin(0.6) * std::sin(0.6) + 1.0).epsilon(1e-14));
}

TEST_CASE("vector map jacobian and composition") {
    VectorMap f = VectorMap::parse(2, {"x*y", "x + y^2"});
    Eigen::Vector2d p(0.4, 1.2);
    Eigen::MatrixXd j = f.jacobian(p);
    CHECK(j(0, 0) == doctest::Approx(1.2));
    CHECK(j(0, 1) == doctest::Approx(0.4));
    CHECK(j(1, 0) == doctest::Approx(1.0));
    CHECK(j(1, 1) == doctest::Approx(2.4));

    VectorMap inner = VectorMap::parse(1, {"t", "t^2"});
    VectorMap comp = f.compose(inner);
    Eigen::VectorXd t(1);
    t[0] = 0.7;
    Eigen::VectorXd via = f.eval(inner.eval(t));
    Eigen::VectorXd direct = comp.eval(t);
    CHECK(direct[0] == doctest::Approx(via[0]).epsilon(1e-14));
    CHECK(direct[1] == doctest::Approx(via[1]).epsilon(1e-14));
}

TEST_CASE("max_var tracks referenced variables") {
    auto names = default_var_names(3);
    CHECK(parse_expr("1 + 2", names).max_var() == -1);
    CHECK(parse_expr("x", names).max_var() == 0);
    CHECK(parse_expr("x*z", names).max_var() == 2);
}
