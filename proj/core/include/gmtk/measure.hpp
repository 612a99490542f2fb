#pragma once
#include <optional>
#include <string>

#include "gmtk/quadrature.hpp"
#include "gmtk/scene.hpp"

namespace gmtk {

/// Extended nonnegative real for the e-Jacobian.
struct JacobianValue {
    bool finite = true;
    double value = 0.0; // meaningful when finite

    static JacobianValue infinite() { return {false, 0.0}; }
    static JacobianValue of(double v) { return {true, v}; }
};

struct MeasureReport {
    double value = 0.0;
    double stderr_ = 0.0; // 0 for deterministic quadrature
    std::string method;   // "area", "crofton", "coarea"
    int e = 0;
    int n = 0;
    std::optional<long> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> unstable_fraction;

    std::string to_json() const;
};

/// J_e of an m x d derivative matrix: +infinity when rank > e, otherwise
/// sqrt of the sum of squared e x e minors (Gram route, sqrt(det G^T G)).
JacobianValue jacobian_Je_matrix(const Eigen::MatrixXd& deriv, int e);

/// J_e by direct minor enumeration; kept as the cross-check route.
JacobianValue jacobian_Je_minors(const Eigen::MatrixXd& deriv, int e);

/// J_e of a map at a point.
JacobianValue jacobian_Je(const VectorMap& F, const Eigen::VectorXd& a, int e);

struct AreaOptions {
    double abs_tol = 1e-8; // scaled by the piece diameter
    int max_depth = 14;
};

/// Area-formula measure of one patch: adaptive Gauss-Legendre quadrature of
/// J_e over the parameter box (chart substitution folded into the
/// realization derivative).
MeasureReport area_measure(const Patch& p, const AreaOptions& opt = {});

/// H^e of a scene: basic e-rectifiable partition, then the patch measures
/// summed in fixed piece order. dim < e patches contribute 0; e = 0 counts.
MeasureReport hausdorff_measure(const Scene& s, int e, const AreaOptions& opt = {});

/// Applies x -> linear x + offset to every patch. linear must be c * Q with
/// Q orthogonal (isometry when c = 1, scaling otherwise).
Scene transform_scene(const Scene& s, const Eigen::MatrixXd& linear, const Eigen::VectorXd& offset);
Scene scale_scene(const Scene& s, double r);

/// Embeds the scene into R^(n+1) via x -> (x, 0).
Scene embed_scene(const Scene& s);

} // namespace gmtk
