#pragma once
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmtk/cell.hpp"
#include "gmtk/expr.hpp"
#include "gmtk/linalg.hpp"

namespace gmtk {

/// A basic e-rectifiable piece: after a coordinate permutation (and an
/// optional recorded rotation) the set is the graph of a bounded map over
/// an open cell, or an attested-injective parametric image of one.
/// Every patch is evaluated through unit-box parameters: u in param_box
/// (a sub-box of (0,1)^e) -> cell chart -> map -> permutation -> post
/// linear transform + offset.
struct Patch {
    enum class Kind { Graph, Parametric, Point };

    Kind kind = Kind::Graph;
    int n = 0; // ambient dimension
    int e = 0; // intrinsic dimension

    std::vector<int> permutation;      // graph kind: component j of (x,f(x)) -> coord permutation[j]
    CellDomain domain;                 // open e-cell in R^e (graph/parametric)
    VectorMap map;                     // graph: e -> n-e; parametric: e -> n
    std::optional<double> bound;       // declared sup |Df|
    bool injective_attested = false;   // parametric kind only

    Eigen::VectorXd at;                // point kind

    // post transform: p -> post_linear * p + post_offset
    std::optional<Eigen::MatrixXd> post_linear;
    std::optional<Eigen::VectorXd> post_offset;

    Eigen::VectorXd box_lo, box_hi;    // parameter sub-box within (0,1)^e
    bool unverified = false;           // refinement gave up before the flatness target
    bool graph_over_first_e = false;   // rotated-graph certificate from graphify

    static Patch graph(int n, int e, std::vector<int> permutation, CellDomain domain,
                       VectorMap map, std::optional<double> bound = std::nullopt);
    static Patch parametric(int n, int e, CellDomain domain, VectorMap map,
                            std::optional<double> bound = std::nullopt, bool injective = true);
    static Patch point(const Eigen::VectorXd& at);

    /// Realized point for box parameter u (param_box coordinates are the
    /// caller's responsibility: u must lie in [box_lo, box_hi]).
    Eigen::VectorXd eval(const Eigen::VectorXd& u) const;
    /// n x e derivative of the realization with respect to u.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const;
    void eval_with_jacobian(const Eigen::VectorXd& u, Eigen::VectorXd& p,
                            Eigen::MatrixXd& jac) const;

    Eigen::VectorXd box_center() const { return 0.5 * (box_lo + box_hi); }
    double box_diameter() const { return (box_hi - box_lo).norm(); }

    /// Restriction to a parameter sub-box.
    Patch restricted(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) const;
};

/// Tangent space of the patch at interior parameter u.
LinearSubspace tangent_space(const Patch& p, const Eigen::VectorXd& u);

struct KinkSpec {
    int patch = 0;
    int axis = 0;
    std::vector<double> values; // parameter (unit box) coordinates
};

struct Scene {
    int ambient_dim = 0;
    std::vector<Patch> patches;
    std::vector<KinkSpec> kinks;
    Eigen::VectorXd bbox_lo, bbox_hi;
    bool partitioned = false;

    double bbox_circumradius() const;
};

/// Parses and validates a scene document (JSON). Validation samples the
/// declared invariants: band positivity, derivative bounds, parametric
/// immersion; violations raise ValidationError with a witness point.
Scene parse_scene(const std::string& text);
std::string serialize_scene(const Scene& s);

/// Recomputes the sampled bounding box (1% padding).
void refresh_bounding_box(Scene& s);

/// Standalone cell documents (JSON), used by the whitney CLI command.
CellDomain parse_cell(const std::string& text);
std::string serialize_cell(const CellDomain& c);

} // namespace gmtk
