#pragma once
#include <vector>

#include "gmtk/linalg.hpp"
#include "gmtk/scene.hpp"

namespace gmtk {

/// Per-dimension constants: epsilon_n is the largest dyadic k/2^16 with
/// 2n * band_volume(n, epsilon_n) < area(S^(n-1)); M_n is a rational above
/// max(M_(n-1), sqrt(4/epsilon_n^2 - 1)).
struct PartitionConstants {
    int n = 0;
    double epsilon = 0.0;
    double M = 0.0;
};

/// Surface measure on S^(n-1) of {v : |v - pi_X(v)| <= 2 eps} for a
/// hyperplane X (independent of X by symmetry). Closed form through the
/// regularized incomplete beta function.
double band_volume(int n, double eps);

/// The dyadic epsilon_n (n = 1 returns the 1/4 convention).
double epsilon_n(int n);

PartitionConstants partition_constants(int n);

/// A unit direction at delta-distance > eps from every supplied subspace,
/// found by rejection sampling (budget 1e5 draws).
LinearSubspace choose_transverse_direction(const std::vector<LinearSubspace>& tangents, double eps,
                                           Rng& rng);

struct RefineOptions {
    int sample_count = 17; // quasi-random interior samples (corners added)
    int max_depth = 12;
};

/// Dyadic parameter subdivision until the sampled tangent spread (pairwise
/// grassmann_distance over samples + corners) drops below eps. Residual
/// pieces at the depth cap are flagged unverified, never dropped.
std::vector<Patch> eflat_refine(const Patch& p, double eps, const RefineOptions& opt = {});

/// Sampled tangent spread of one piece.
double tangent_spread(const Patch& p, const RefineOptions& opt = {});

/// Rotates the (eps_n-flat) piece so its center tangent spans the first e
/// coordinates and certifies the implied graph slope <= M_n on samples.
Patch graphify(const Patch& p, const PartitionConstants& constants);

/// Full pipeline: eflat_refine at epsilon_n, then graphify per piece.
Scene rectifiable_partition(const Scene& s, int e);

} // namespace gmtk
