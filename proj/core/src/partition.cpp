#include "gmtk/partition.hpp"

#include <cmath>
#include <deque>

#include <boost/math/special_functions/beta.hpp>

#include "gmtk/errors.hpp"

namespace gmtk {

double band_volume(int n, double eps) {
    if (n < 1) throw ValidationError("band_volume: need n >= 1");
    if (eps < 0.0) throw ValidationError("band_volume: need eps >= 0");
    double t = std::min(2.0 * eps, 1.0); // the band saturates at the whole sphere
    if (n == 1) return t >= 1.0 ? 2.0 : 0.0; // S^0: both points have |v1| = 1
    if (t == 0.0) return 0.0;
    if (t >= 1.0) return sphere_area(n);
    // area{|v1| <= t} = S_(n-2) * B(1/2, (n-1)/2) * I_(t^2)(1/2, (n-1)/2)
    double a = 0.5, b = (n - 1) / 2.0;
    double full_beta = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    return sphere_area(n - 1) * full_beta * boost::math::ibeta(a, b, t * t);
}

double epsilon_n(int n) {
    if (n < 1) throw ValidationError("epsilon_n: need n >= 1");
    if (n == 1) return 0.25; // bands on S^0 are empty below eps = 1/2
    const int denom = 1 << 16;
    double area = sphere_area(n);
    auto ok = [&](int k) {
        double eps = static_cast<double>(k) / denom;
        return eps <= 0.5 && 2.0 * n * band_volume(n, eps) < area;
    };
    int lo = 1, hi = denom / 2; // invariant: ok(lo), !ok(hi+1) conceptually
    if (!ok(lo)) throw NumericalError("epsilon_n: no admissible dyadic value");
    while (ok(hi)) return static_cast<double>(hi) / denom; // cannot happen for n >= 2
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        (ok(mid) ? lo : hi) = mid;
    }
    return static_cast<double>(lo) / denom;
}

PartitionConstants partition_constants(int n) {
    if (n < 1) throw ValidationError("partition_constants: need n >= 1");
    double M_prev = 0.0;
    PartitionConstants pc;
    for (int k = 1; k <= n; ++k) {
        double eps = epsilon_n(k);
        double lower = std::sqrt(4.0 / (eps * eps) - 1.0);
        // next dyadic (step 1/256) strictly above the requirement
        double M = std::floor(std::max(M_prev, lower) * 256.0 + 1.0) / 256.0;
        pc = {k, eps, M};
        M_prev = M;
    }
    return pc;
}

LinearSubspace choose_transverse_direction(const std::vector<LinearSubspace>& tangents, double eps,
                                           Rng& rng) {
    if (tangents.empty()) throw ValidationError("choose_transverse_direction: no subspaces given");
    int n = tangents.front().ambient_dim();
    for (const auto& t : tangents)
        if (t.ambient_dim() != n)
            throw ValidationError("choose_transverse_direction: mixed ambient dimensions");
    const int budget = 100000;
    for (int draw = 0; draw < budget; ++draw) {
        Eigen::MatrixXd v = rng.unit_vector(n);
        LinearSubspace P = LinearSubspace::from_orthonormal(v);
        bool clear = true;
        for (const auto& X : tangents) {
            if (line_to_subspace_distance(P, X) <= eps) {
                clear = false;
                break;
            }
        }
        if (clear) return P;
    }
    throw NumericalError(
        "choose_transverse_direction: rejection budget exhausted (inputs violate the 2n "
        "cardinality / eps contract)");
}

double tangent_spread(const Patch& p, const RefineOptions& opt) {
    std::vector<LinearSubspace> tangents;
    Halton hal(p.e);
    Eigen::VectorXd width = p.box_hi - p.box_lo;
    for (int i = 0; i < opt.sample_count; ++i) {
        Eigen::VectorXd u = p.box_lo.array() + width.array() * hal.next().array();
        tangents.push_back(tangent_space(p, u));
    }
    for (int mask = 0; mask < (1 << p.e); ++mask) {
        Eigen::VectorXd u(p.e);
        for (int a = 0; a < p.e; ++a)
            u[a] = (mask >> a) & 1 ? p.box_hi[a] - 1e-3 * width[a] : p.box_lo[a] + 1e-3 * width[a];
        tangents.push_back(tangent_space(p, u));
    }
    double spread = 0.0;
    for (size_t i = 0; i < tangents.size(); ++i)
        for (size_t j = i + 1; j < tangents.size(); ++j)
            spread = std::max(spread, grassmann_distance(tangents[i], tangents[j]));
    return spread;
}

std::vector<Patch> eflat_refine(const Patch& p, double eps, const RefineOptions& opt) {
    if (!(eps > 0)) throw ValidationError("eflat_refine: eps must be positive");
    if (p.kind == Patch::Kind::Point) return {p};
    struct Item {
        Patch piece;
        int depth;
    };
    std::deque<Item> queue{{p, 0}};
    std::vector<Patch> out;
    while (!queue.empty()) {
        Item it = std::move(queue.front());
        queue.pop_front();
        if (tangent_spread(it.piece, opt) < eps) {
            out.push_back(std::move(it.piece));
            continue;
        }
        if (it.depth >= opt.max_depth) {
            it.piece.unverified = true;
            out.push_back(std::move(it.piece));
            continue;
        }
        // dyadic split along the widest parameter axis
        int axis = 0;
        (it.piece.box_hi - it.piece.box_lo).maxCoeff(&axis);
        double mid = 0.5 * (it.piece.box_lo[axis] + it.piece.box_hi[axis]);
        Eigen::VectorXd hi1 = it.piece.box_hi, lo2 = it.piece.box_lo;
        hi1[axis] = mid;
        lo2[axis] = mid;
        queue.push_back({it.piece.restricted(it.piece.box_lo, hi1), it.depth + 1});
        queue.push_back({it.piece.restricted(lo2, it.piece.box_hi), it.depth + 1});
    }
    return out;
}

Patch graphify(const Patch& p, const PartitionConstants& constants) {
    if (p.kind == Patch::Kind::Point) return p;
    const int n = p.n, e = p.e;
    LinearSubspace center_tangent = tangent_space(p, p.box_center());

    Eigen::MatrixXd frame(n, n);
    frame.leftCols(e) = center_tangent.basis();
    if (e < n) frame.rightCols(n - e) = center_tangent.complement_basis();
    Eigen::MatrixXd rot = frame.transpose(); // sends the center tangent to span(e_1..e_e)

    Patch out = p;
    out.post_linear = p.post_linear ? (rot * (*p.post_linear)).eval() : rot;
    if (p.post_offset) out.post_offset = rot * (*p.post_offset);

    // certify the implied graph slope on samples
    Halton hal(e);
    Eigen::VectorXd width = out.box_hi - out.box_lo;
    double max_slope = 0.0;
    for (int i = 0; i < 64; ++i) {
        Eigen::VectorXd u = out.box_lo.array() + width.array() * hal.next().array();
        Eigen::MatrixXd jac = out.jacobian(u);
        Eigen::MatrixXd top = jac.topRows(e);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(top);
        const auto& sv = svd.singularValues();
        if (sv[e - 1] < 1e-10 * std::max(1.0, sv[0]))
            throw NumericalError("graphify: piece is not a graph over the rotated base "
                                 "(insufficient flatness), refine further");
        if (e < n) {
            Eigen::MatrixXd slope = jac.bottomRows(n - e) * top.inverse();
            Eigen::JacobiSVD<Eigen::MatrixXd> ssvd(slope);
            max_slope = std::max(max_slope, ssvd.singularValues()(0));
        }
    }
    if (max_slope > constants.M)
        throw NumericalError("graphify: sampled graph slope " + std::to_string(max_slope) +
                             " exceeds M_n = " + std::to_string(constants.M));
    out.graph_over_first_e = true;
    return out;
}

Scene rectifiable_partition(const Scene& s, int e) {
    for (const auto& p : s.patches)
        if (p.e > e)
            throw ValidationError("rectifiable_partition: patch dimension exceeds e");
    PartitionConstants constants = partition_constants(s.ambient_dim);

    Scene out;
    out.ambient_dim = s.ambient_dim;
    out.partitioned = true;
    for (int i = 0; i < static_cast<int>(s.patches.size()); ++i) {
        const Patch& p = s.patches[i];
        // lower-dimensional patches are H^e-null residue
        if (p.e < e || p.kind == Patch::Kind::Point) continue;

        // split at declared kink loci first: flatness sampling must not
        // straddle a derivative discontinuity
        std::vector<Patch> seeds{p};
        for (const auto& k : s.kinks) {
            if (k.patch != i) continue;
            std::vector<Patch> next;
            for (const auto& seed : seeds) {
                std::vector<Patch> pieces{seed};
                for (double v : k.values) {
                    std::vector<Patch> acc;
                    for (const auto& piece : pieces) {
                        if (k.axis >= 0 && k.axis < piece.e && v > piece.box_lo[k.axis] &&
                            v < piece.box_hi[k.axis]) {
                            Eigen::VectorXd hi1 = piece.box_hi, lo2 = piece.box_lo;
                            hi1[k.axis] = v;
                            lo2[k.axis] = v;
                            acc.push_back(piece.restricted(piece.box_lo, hi1));
                            acc.push_back(piece.restricted(lo2, piece.box_hi));
                        } else {
                            acc.push_back(piece);
                        }
                    }
                    pieces = std::move(acc);
                }
                next.insert(next.end(), pieces.begin(), pieces.end());
            }
            seeds = std::move(next);
        }

        for (const auto& seed : seeds) {
            for (auto& piece : eflat_refine(seed, constants.epsilon)) {
                if (piece.unverified) {
                    out.patches.push_back(std::move(piece));
                    continue;
                }
                out.patches.push_back(graphify(piece, constants));
            }
        }
    }
    refresh_bounding_box(out);
    return out;
}

} // namespace gmtk
