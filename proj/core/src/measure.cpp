#include "gmtk/measure.hpp"

#include <cmath>

#include <json.hpp>

#include "gmtk/partition.hpp"

namespace gmtk {

std::string MeasureReport::to_json() const {
    nlohmann::ordered_json j;
    j["value"] = value;
    j["stderr"] = stderr_;
    j["method"] = method;
    j["e"] = e;
    j["n"] = n;
    if (samples) j["samples"] = *samples;
    if (seed) j["seed"] = *seed;
    if (unstable_fraction) j["unstable_fraction"] = *unstable_fraction;
    return j.dump(2) + "\n";
}

JacobianValue jacobian_Je_matrix(const Eigen::MatrixXd& deriv, int e) {
    if (e < 0) throw ValidationError("jacobian_Je: e must be nonnegative");
    if (e == 0) return JacobianValue::of(1.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(deriv);
    const auto& sv = svd.singularValues();
    int maxrank = static_cast<int>(sv.size());
    double thresh = 1e-10 * (maxrank > 0 ? sv[0] : 0.0);
    int rank = 0;
    for (int i = 0; i < maxrank; ++i)
        if (sv[i] > thresh) ++rank;
    if (rank > e) return JacobianValue::infinite();
    // Cauchy-Binet: sum of squared e x e minors = det(D^T D) restricted to
    // the rank-e factor = product of the e largest squared singular values
    double prod = 1.0;
    for (int i = 0; i < e; ++i) prod *= i < maxrank ? sv[i] : 0.0;
    return JacobianValue::of(prod);
}

JacobianValue jacobian_Je_minors(const Eigen::MatrixXd& deriv, int e) {
    if (e == 0) return JacobianValue::of(1.0);
    const int m = static_cast<int>(deriv.rows());
    const int d = static_cast<int>(deriv.cols());
    if (e > std::min(m, d)) {
        // fewer than e independent directions available: all minors vanish
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(deriv);
        return JacobianValue::of(0.0);
    }
    // rank check shared with the Gram route
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(deriv);
    const auto& sv = svd.singularValues();
    double thresh = 1e-10 * sv[0];
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > thresh) ++rank;
    if (rank > e) return JacobianValue::infinite();

    // enumerate all e-row x e-column submatrices
    std::vector<int> rows(e), cols(e);
    for (int i = 0; i < e; ++i) rows[i] = i;
    double sum = 0.0;
    auto next_subset = [](std::vector<int>& s, int limit) {
        int k = static_cast<int>(s.size());
        int i = k - 1;
        while (i >= 0 && s[i] == limit - k + i) --i;
        if (i < 0) return false;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
        return true;
    };
    do {
        for (int i = 0; i < e; ++i) cols[i] = i;
        do {
            Eigen::MatrixXd sub(e, e);
            for (int r = 0; r < e; ++r)
                for (int c = 0; c < e; ++c) sub(r, c) = deriv(rows[r], cols[c]);
            double det = sub.determinant();
            sum += det * det;
        } while (next_subset(cols, d));
    } while (next_subset(rows, m));
    return JacobianValue::of(std::sqrt(sum));
}

JacobianValue jacobian_Je(const VectorMap& F, const Eigen::VectorXd& a, int e) {
    return jacobian_Je_matrix(F.jacobian(a), e);
}

namespace {

// splits the patch parameter box at declared kink loci before quadrature
std::vector<Patch> split_at_kinks(const Patch& p, const std::vector<KinkSpec>& kinks, int index) {
    std::vector<Patch> pieces{p};
    for (const auto& k : kinks) {
        if (k.patch != index || k.axis < 0 || k.axis >= p.e) continue;
        for (double v : k.values) {
            std::vector<Patch> next;
            for (const auto& piece : pieces) {
                if (v > piece.box_lo[k.axis] && v < piece.box_hi[k.axis]) {
                    Eigen::VectorXd hi1 = piece.box_hi, lo2 = piece.box_lo;
                    hi1[k.axis] = v;
                    lo2[k.axis] = v;
                    next.push_back(piece.restricted(piece.box_lo, hi1));
                    next.push_back(piece.restricted(lo2, piece.box_hi));
                } else {
                    next.push_back(piece);
                }
            }
            pieces = std::move(next);
        }
    }
    return pieces;
}

} // namespace

MeasureReport area_measure(const Patch& p, const AreaOptions& opt) {
    MeasureReport rep;
    rep.method = "area";
    rep.n = p.n;
    rep.e = p.e;
    if (p.kind == Patch::Kind::Point) {
        rep.value = 1.0; // H^0 of a single point
        return rep;
    }
    bool hit_infinite = false;
    auto integrand = [&](const Eigen::VectorXd& u) {
        JacobianValue jv = jacobian_Je_matrix(p.jacobian(u), p.e);
        if (!jv.finite) {
            hit_infinite = true;
            return 0.0;
        }
        return jv.value;
    };
    QuadOptions qopt;
    qopt.abs_tol = opt.abs_tol * std::max(1.0, p.box_diameter());
    qopt.max_depth = opt.max_depth;
    QuadResult q = integrate_box(integrand, p.box_lo, p.box_hi, qopt);
    if (hit_infinite) throw NumericalError("area_measure: infinite J_e on the piece");
    rep.value = q.value;
    rep.stderr_ = q.error;
    return rep;
}

MeasureReport hausdorff_measure(const Scene& s, int e, const AreaOptions& opt) {
    MeasureReport rep;
    rep.method = "area";
    rep.n = s.ambient_dim;
    rep.e = e;
    for (const auto& p : s.patches)
        if (p.e > e)
            throw ValidationError("hausdorff_measure: patch of dimension " + std::to_string(p.e) +
                                  " exceeds e = " + std::to_string(e));
    if (e == 0) {
        // H^0 is the counting measure
        rep.value = 0.0;
        for (const auto& p : s.patches)
            if (p.kind == Patch::Kind::Point) rep.value += 1.0;
        return rep;
    }
    // keep only full-dimension patches; dim < e contributes nothing
    Scene full = s;
    full.patches.clear();
    std::vector<KinkSpec> remapped;
    for (int i = 0; i < static_cast<int>(s.patches.size()); ++i) {
        if (s.patches[i].e != e || s.patches[i].kind == Patch::Kind::Point) continue;
        for (const auto& k : s.kinks)
            if (k.patch == i) {
                KinkSpec kk = k;
                kk.patch = static_cast<int>(full.patches.size());
                remapped.push_back(kk);
            }
        full.patches.push_back(s.patches[i]);
    }
    full.kinks = std::move(remapped);
    if (full.patches.empty()) {
        rep.value = 0.0;
        return rep;
    }

    Scene parted = full.partitioned ? full : rectifiable_partition(full, e);
    for (int i = 0; i < static_cast<int>(parted.patches.size()); ++i) {
        for (const auto& piece : split_at_kinks(parted.patches[i], parted.kinks, i)) {
            MeasureReport r = area_measure(piece, opt);
            rep.value += r.value;
            rep.stderr_ += r.stderr_;
        }
    }
    return rep;
}

Scene transform_scene(const Scene& s, const Eigen::MatrixXd& linear,
                      const Eigen::VectorXd& offset) {
    const int n = s.ambient_dim;
    if (linear.rows() != n || linear.cols() != n || offset.size() != n)
        throw ValidationError("transform_scene: transform has wrong dimensions");
    Eigen::MatrixXd gram = linear.transpose() * linear;
    double c2 = gram.trace() / n;
    if ((gram - c2 * Eigen::MatrixXd::Identity(n, n)).norm() > 1e-9 * std::max(1.0, c2) || c2 <= 0)
        throw ValidationError("transform_scene: linear part must be a scaled orthogonal map");
    double c = std::sqrt(c2);

    Scene out = s;
    for (auto& p : out.patches) {
        if (p.kind == Patch::Kind::Point) {
            Eigen::VectorXd q = p.at;
            if (p.post_linear) q = (*p.post_linear) * q;
            if (p.post_offset) q += *p.post_offset;
            p.at = linear * q + offset;
            p.post_linear.reset();
            p.post_offset.reset();
            continue;
        }
        Eigen::MatrixXd lin = p.post_linear ? linear * (*p.post_linear) : linear;
        Eigen::VectorXd off = p.post_offset ? (linear * (*p.post_offset) + offset).eval() : offset;
        p.post_linear = lin;
        p.post_offset = off;
        if (p.bound) p.bound = *p.bound * c;
    }
    refresh_bounding_box(out);
    return out;
}

Scene scale_scene(const Scene& s, double r) {
    if (!(r > 0)) throw ValidationError("scale_scene: r must be positive");
    return transform_scene(s, r * Eigen::MatrixXd::Identity(s.ambient_dim, s.ambient_dim),
                           Eigen::VectorXd::Zero(s.ambient_dim));
}

Scene embed_scene(const Scene& s) {
    const int n = s.ambient_dim;
    if (n + 1 > kMaxAmbientDim) throw ValidationError("embed_scene: dimension cap reached");
    Scene out;
    out.ambient_dim = n + 1;
    out.partitioned = s.partitioned;
    out.kinks = s.kinks;
    for (const auto& p : s.patches) {
        if (p.kind == Patch::Kind::Point) {
            Eigen::VectorXd q(n + 1);
            Eigen::VectorXd base = p.at;
            if (p.post_linear) base = (*p.post_linear) * base;
            if (p.post_offset) base += *p.post_offset;
            q.head(n) = base;
            q[n] = 0.0;
            out.patches.push_back(Patch::point(q));
            continue;
        }
        Patch q;
        if (p.kind == Patch::Kind::Graph) {
            std::vector<Expr> comps = p.map.components;
            comps.push_back(Expr::constant(0.0));
            std::vector<int> perm = p.permutation;
            perm.push_back(n);
            q = Patch::graph(n + 1, p.e, std::move(perm), p.domain,
                             VectorMap(p.e, std::move(comps), p.map.declared_bound), p.bound);
        } else {
            std::vector<Expr> comps = p.map.components;
            comps.push_back(Expr::constant(0.0));
            q = Patch::parametric(n + 1, p.e, p.domain,
                                  VectorMap(p.e, std::move(comps), p.map.declared_bound), p.bound,
                                  p.injective_attested);
        }
        q.box_lo = p.box_lo;
        q.box_hi = p.box_hi;
        q.unverified = p.unverified;
        q.graph_over_first_e = p.graph_over_first_e;
        if (p.post_linear || p.post_offset) {
            Eigen::MatrixXd lin = Eigen::MatrixXd::Identity(n + 1, n + 1);
            if (p.post_linear) lin.topLeftCorner(n, n) = *p.post_linear;
            Eigen::VectorXd off = Eigen::VectorXd::Zero(n + 1);
            if (p.post_offset) off.head(n) = *p.post_offset;
            q.post_linear = lin;
            q.post_offset = off;
        }
        out.patches.push_back(std::move(q));
    }
    refresh_bounding_box(out);
    return out;
}

} // namespace gmtk
