#pragma once
#include <vector>

#include "gmtk/cell.hpp"
#include "gmtk/rng.hpp"

namespace gmtk {

/// Connecting-curve constants:
///   K(1,L) = 1,  K(n,L) = K(n-1,L)(1+4L) + L + 1
///   k(1,L) = L,  k(n,L) = L * K(n-1, k(n-1,L))
/// Deliberately loose upper bounds; verification asserts the inequality.
struct WhitneyConstants {
    double K = 0.0;
    double k = 0.0;
};

WhitneyConstants whitney_constants(int n, double L);

/// A piecewise closed-form curve [0,1] -> R^n with declared endpoints.
struct DefinableCurve {
    struct Piece {
        double t0 = 0.0, t1 = 1.0;
        VectorMap map; // 1 -> n, evaluated at the global parameter t
    };
    std::vector<Piece> pieces;
    Eigen::VectorXd x, y; // declared gamma(0), gamma(1)

    Eigen::VectorXd eval(double t) const;
    Eigen::VectorXd derivative(double t) const;
    /// Arc length by adaptive quadrature of |gamma'|.
    double length() const;
};

/// The recursive in-cell connection: straight segment in an interval,
/// graph lift through f, band fiber interpolation l(t) h + (1-l(t)) g with
/// l affine between the fiber coordinates of x and y.
DefinableCurve connect_points(const CellDomain& c, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y);

/// Uniform-ish random point of the cell (base sampled recursively, fiber
/// coordinates uniform between the bounds, nudged off the boundary).
Eigen::VectorXd sample_cell_point(const CellDomain& c, Rng& rng);

struct WhitneyReport {
    double max_ratio = 0.0;           // max over pairs of length / |x - y|
    double max_pointwise_ratio = 0.0; // max over pairs, t of |gamma'(t)| / |x - y|
    double K_bound = 0.0;
    long trials = 0;
    bool pass = false;
    long endpoint_failures = 0;
    long containment_failures = 0;
};

/// Samples `trials` random pairs, builds curves, and checks endpoint
/// exactness (1e-12), strict containment on 10^3 t-samples, pointwise
/// |gamma'| <= K_bound |x-y| (1 + 1e-8), and length <= K_bound |x-y|.
WhitneyReport whitney_verify(const CellDomain& c, double K_bound, long trials, Rng& rng);

} // namespace gmtk
