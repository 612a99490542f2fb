#pragma once
#include <functional>
#include <string>

#include "gmtk/cell.hpp"
#include "gmtk/measure.hpp"
#include "gmtk/scene.hpp"

namespace gmtk {

/// Co-area instance: Lipschitz f on a region A inside [0,1]^m. The optional
/// slicer supplies a parametrization of the fiber over y; without it the
/// fibers are counted (m = n) or traced (m - n = 1, plane regions only).
struct SliceSpec {
    VectorMap f;       // R^m -> R^n, m >= n
    CellDomain region; // open m-cell in [0,1]^m
    std::function<Scene(const Eigen::VectorXd&)> slicer;
};

struct CheckResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    long excluded = 0; // y-values dropped at detected critical points

    std::string to_json() const;
};

/// lhs = integral of J_n f over A; rhs = Gauss-Legendre over y in [0,1]^n of
/// the fiber measure H^(m-n)(A cap f^-1(y)); grid = panels per y-axis for
/// the composite rule (n >= 2; n = 1 uses adaptive refinement).
CheckResult coarea_check(const SliceSpec& spec, int grid = 16);

/// Change-of-variables instance. `image` is an authored cell cover of f(A)
/// (pairwise disjoint); injectivity of f on A is attested by the author.
struct CovSpec {
    VectorMap f; // R^d -> R^d
    VectorMap g; // R^d -> R, the integrand
    CellDomain domain;
    std::vector<CellDomain> image;
};

/// lhs = integral of g over the image cells; rhs = integral over A of
/// |det Df| g(f(x)).
CheckResult change_of_variables_check(const CovSpec& spec);

/// joint (n+m)-dimensional quadrature of f on the unit box against the
/// iterated integral (inner over the first n variables).
CheckResult fubini_check(const VectorMap& f, int n, int m);

/// Integral of fn over the realization of an open cell (chart substitution).
QuadResult integrate_over_cell(const CellDomain& cell,
                               const std::function<double(const Eigen::VectorXd&)>& fn,
                               const QuadOptions& opt = {});

/// Arc length of {x in region : f(x) = y} for scalar f on a plane region,
/// by predictor-corrector continuation (step 1e-3, corrector tol 1e-10)
/// seeded from a boundary scan plus interior scan lines for closed loops.
double trace_fiber_length(const VectorMap& f, const CellDomain& region, double y);

/// JSON front ends for the CLI (spec document formats in the README).
CheckResult coarea_check_document(const std::string& text);
CheckResult cov_check_document(const std::string& text);
CheckResult fubini_check_document(const std::string& text);

} // namespace gmtk
