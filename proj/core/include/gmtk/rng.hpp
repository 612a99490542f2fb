#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gmtk {

/// Seeded random stream. All randomized operations take one of these
/// explicitly; parallel callers derive independent substreams so results
/// do not depend on scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Substream for a parallel chunk: reproducible for (seed, index).
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        // splitmix64 of the pair decorrelates consecutive chunk seeds
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    /// Uniform in [0,1). Built from raw bits so the stream is identical
    /// across standard library implementations.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (unbuffered, stream-portable).
    double gaussian() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    Eigen::VectorXd gaussian_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    /// Uniform direction on the unit sphere in R^n.
    Eigen::VectorXd unit_vector(int n) {
        Eigen::VectorXd v = gaussian_vector(n);
        double norm = v.norm();
        while (norm < 1e-300) {
            v = gaussian_vector(n);
            norm = v.norm();
        }
        return v / norm;
    }

    /// Uniform point in the closed unit ball of R^n.
    Eigen::VectorXd ball_point(int n) {
        Eigen::VectorXd v = unit_vector(n);
        return v * std::pow(uniform(), 1.0 / n);
    }

private:
    std::mt19937_64 gen_;
};

/// Halton low-discrepancy sequence, used for deterministic invariant
/// sampling (derivative bounds, band positivity, membership spot checks).
class Halton {
public:
    explicit Halton(int dim) : dim_(dim), index_(0) {}

    Eigen::VectorXd next() {
        ++index_;
        Eigen::VectorXd p(dim_);
        for (int d = 0; d < dim_; ++d) p[d] = radical_inverse(index_, primes_[d % 8]);
        return p;
    }

private:
    static double radical_inverse(std::uint64_t i, int base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= base;
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        return r;
    }
    static constexpr int primes_[8] = {2, 3, 5, 7, 11, 13, 17, 19};
    int dim_;
    std::uint64_t index_;
};

} // namespace gmtk
