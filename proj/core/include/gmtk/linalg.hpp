#pragma once
#include <Eigen/Dense>

#include "gmtk/errors.hpp"
#include "gmtk/rng.hpp"

namespace gmtk {

/// A k-dimensional linear subspace of R^n, carried as an orthonormal basis
/// together with its orthogonal projection matrix.
class LinearSubspace {
public:
    /// Builds from any full-rank spanning matrix; columns are orthonormalized.
    static LinearSubspace from_span(const Eigen::MatrixXd& span);
    /// Builds from columns that are already orthonormal (validated).
    static LinearSubspace from_orthonormal(const Eigen::MatrixXd& basis);
    /// The span of coordinate axes `axes` (0-based) in R^n.
    static LinearSubspace coordinate(int n, const std::vector<int>& axes);

    int ambient_dim() const { return static_cast<int>(basis_.rows()); }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Eigen::MatrixXd& basis() const { return basis_; }
    const Eigen::MatrixXd& projection() const { return projection_; }

    Eigen::VectorXd project(const Eigen::VectorXd& v) const { return projection_ * v; }

    /// Orthonormal basis of the orthogonal complement.
    Eigen::MatrixXd complement_basis() const;

private:
    LinearSubspace(Eigen::MatrixXd basis);
    Eigen::MatrixXd basis_;      // n x k, orthonormal columns
    Eigen::MatrixXd projection_; // n x n, basis * basis^T
};

/// An affine k-plane: base point (orthogonal to the direction) + direction.
struct AffinePlane {
    LinearSubspace direction;
    Eigen::VectorXd base;

    AffinePlane(LinearSubspace dir, const Eigen::VectorXd& point);

    int ambient_dim() const { return direction.ambient_dim(); }
    int dim() const { return direction.dim(); }
};

/// delta(V, W) = operator norm of pi_V - pi_W. A metric on each fixed-k
/// Grassmannian; in [0,1] when dims are equal.
double grassmann_distance(const LinearSubspace& V, const LinearSubspace& W);

/// delta(P, X) = |v - pi_X(v)| for a unit generator v of the line P.
/// 0 iff P is inside X, 1 iff P is perpendicular to X.
double line_to_subspace_distance(const LinearSubspace& P, const LinearSubspace& X);

/// Haar-distributed k-subspace of R^n: Gaussian matrix + QR with the
/// R-diagonal forced positive.
LinearSubspace haar_sample_subspace(int n, int k, Rng& rng);

/// beta(n, e) = Gamma((e+1)/2) Gamma((n-e+1)/2) / (Gamma((n+1)/2) sqrt(pi)).
double beta_constant(int n, int e);

/// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

/// Volume of the unit ball in R^e.
double ball_volume(int e);

} // namespace gmtk
