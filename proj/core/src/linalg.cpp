#include "gmtk/linalg.hpp"

#include <cmath>

namespace gmtk {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& span) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(span.rows(), span.cols());
    // force positive R-diagonal so the basis is a deterministic function of the input
    Eigen::MatrixXd R = qr.matrixQR().topRows(span.cols()).triangularView<Eigen::Upper>();
    for (int j = 0; j < span.cols(); ++j) {
        if (std::abs(R(j, j)) < 1e-12 * (1.0 + span.col(j).norm()))
            throw ValidationError("subspace span is rank deficient");
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    }
    return Q;
}

} // namespace

LinearSubspace::LinearSubspace(Eigen::MatrixXd basis)
    : basis_(std::move(basis)), projection_(basis_ * basis_.transpose()) {
    if (basis_.rows() > kMaxAmbientDim)
        throw ValidationError("ambient dimension exceeds cap " + std::to_string(kMaxAmbientDim));
    if (basis_.cols() < 1 || basis_.cols() > basis_.rows())
        throw ValidationError("subspace dimension out of range");
}

LinearSubspace LinearSubspace::from_span(const Eigen::MatrixXd& span) {
    return LinearSubspace(orthonormalize(span));
}

LinearSubspace LinearSubspace::from_orthonormal(const Eigen::MatrixXd& basis) {
    Eigen::MatrixXd gram = basis.transpose() * basis;
    if ((gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).norm() > 1e-10)
        throw ValidationError("basis columns are not orthonormal");
    return LinearSubspace(basis);
}

LinearSubspace LinearSubspace::coordinate(int n, const std::vector<int>& axes) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, static_cast<int>(axes.size()));
    for (int j = 0; j < static_cast<int>(axes.size()); ++j) {
        if (axes[j] < 0 || axes[j] >= n) throw ValidationError("axis index out of range");
        b(axes[j], j) = 1.0;
    }
    return LinearSubspace(b);
}

Eigen::MatrixXd LinearSubspace::complement_basis() const {
    int n = ambient_dim(), k = dim();
    if (k == n) return Eigen::MatrixXd(n, 0);
    // complete the basis: QR of [basis | I] and take the trailing columns
    Eigen::MatrixXd ext(n, n + k);
    ext.leftCols(k) = basis_;
    ext.rightCols(n) = Eigen::MatrixXd::Identity(n, n);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ext);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    // the first k columns of Q span this subspace; re-orthogonalize the rest
    Eigen::MatrixXd rest = Q.rightCols(n - k);
    rest -= basis_ * (basis_.transpose() * rest);
    return orthonormalize(rest);
}

AffinePlane::AffinePlane(LinearSubspace dir, const Eigen::VectorXd& point)
    : direction(std::move(dir)), base(point - direction.project(point)) {
    if (point.size() != direction.ambient_dim())
        throw ValidationError("affine plane base point has wrong dimension");
}

double grassmann_distance(const LinearSubspace& V, const LinearSubspace& W) {
    if (V.ambient_dim() != W.ambient_dim())
        throw ValidationError("grassmann_distance: ambient dimension mismatch");
    Eigen::MatrixXd diff = V.projection() - W.projection();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double line_to_subspace_distance(const LinearSubspace& P, const LinearSubspace& X) {
    if (P.dim() != 1) throw ValidationError("line_to_subspace_distance: P must be a line");
    if (P.ambient_dim() != X.ambient_dim())
        throw ValidationError("line_to_subspace_distance: ambient dimension mismatch");
    Eigen::VectorXd v = P.basis().col(0);
    return (v - X.project(v)).norm();
}

LinearSubspace haar_sample_subspace(int n, int k, Rng& rng) {
    if (k <= 0 || k > n) throw ValidationError("haar_sample_subspace: need 0 < k <= n");
    Eigen::MatrixXd g(n, k);
    for (int j = 0; j < k; ++j) g.col(j) = rng.gaussian_vector(n);
    return LinearSubspace::from_span(g);
}

double beta_constant(int n, int e) {
    if (e < 0 || e > n) throw ValidationError("beta_constant: need 0 <= e <= n");
    double lg = std::lgamma((e + 1) / 2.0) + std::lgamma((n - e + 1) / 2.0) -
                std::lgamma((n + 1) / 2.0) - 0.5 * std::log(M_PI);
    return std::exp(lg);
}

double sphere_area(int n) {
    if (n < 1) throw ValidationError("sphere_area: need n >= 1");
    if (n == 1) return 2.0; // S^0 = two points, counting measure
    return 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
}

double ball_volume(int e) {
    if (e < 0) throw ValidationError("ball_volume: need e >= 0");
    return std::pow(M_PI, e / 2.0) / std::tgamma(e / 2.0 + 1.0);
}

} // namespace gmtk
