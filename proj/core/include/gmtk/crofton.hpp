#pragma once
#include <cstdint>

#include "gmtk/linalg.hpp"
#include "gmtk/measure.hpp"
#include "gmtk/scene.hpp"

namespace gmtk {

struct NewtonConfig {
    int grid_per_axis = 8;     // multi-start density; missing roots biases down
    int max_iter = 40;
    double tol = 1e-10;        // residual acceptance threshold
    double dedup_radius = 1e-6; // ambient Euclidean dedup
};

struct CroftonConfig {
    long samples = 200000;
    double window_radius = 0.0; // <= 0: scene bounding-box circumradius
    std::uint64_t seed = 0;
    NewtonConfig newton;
};

/// Plane count for one sampled plane. `unstable` marks a near-tangential
/// intersection (root Jacobian condition number > 1e8); callers resample.
struct IntersectCount {
    long count = 0;
    bool unstable = false;
};

/// Direction Haar-distributed on G_k(R^n); base point uniform in the ball
/// of radius R inside the orthogonal complement of the direction.
AffinePlane sample_affine_plane(int n, int k, double R, Rng& rng);

/// #(scene cap E) by damped multi-start Newton on each patch, deduplicated
/// within cfg.dedup_radius in ambient space.
IntersectCount intersect_count(const Scene& s, const AffinePlane& E, const NewtonConfig& cfg = {});

/// Monte Carlo Cauchy-Crofton estimate of H^e:
///   (1/beta(n,e)) * vol_e(ball_R) * mean(intersection count).
/// Unstable samples are redrawn and reported through unstable_fraction;
/// a fraction above 1% marks the scene degenerate (CLI exit 2).
MeasureReport crofton_estimate(const Scene& s, int e, const CroftonConfig& cfg);

} // namespace gmtk
