#pragma once
#include <functional>

#include <Eigen/Dense>

namespace gmtk {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // conservative accumulated estimate
    bool converged = true;
    long evaluations = 0;
};

struct QuadOptions {
    double abs_tol = 1e-9;
    int max_depth = 14;
    int order = 15; // Gauss-Legendre points per axis (order 7 used above 2 dims)
};

/// Gauss-Legendre nodes/weights on [0,1], cached per order.
void gauss_legendre_unit(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive integral of fn over [a,b].
QuadResult integrate_1d(const std::function<double(double)>& fn, double a, double b,
                        const QuadOptions& opt = {});

/// Adaptive integral of fn over the axis-aligned box [lo, hi]. Bisection is
/// anisotropic: each step splits the axis whose refinement moves the
/// estimate the most, so edge singularities refine in one direction only.
QuadResult integrate_box(const std::function<double(const Eigen::VectorXd&)>& fn,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         const QuadOptions& opt = {});

/// Non-adaptive tensor Gauss-Legendre on the box (single pass).
double tensor_gauss(const std::function<double(const Eigen::VectorXd&)>& fn,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int order);

} // namespace gmtk
