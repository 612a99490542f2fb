#include "gmtk/crofton.hpp"

#include <cmath>

#include "gmtk/parallel.hpp"

namespace gmtk {

AffinePlane sample_affine_plane(int n, int k, double R, Rng& rng) {
    if (k <= 0 || k >= n) throw ValidationError("sample_affine_plane: need 0 < k < n");
    if (!(R > 0)) throw ValidationError("sample_affine_plane: window radius must be positive");
    LinearSubspace W = haar_sample_subspace(n, k, rng);
    Eigen::VectorXd base = W.complement_basis() * (R * rng.ball_point(n - k));
    return AffinePlane(std::move(W), base);
}

namespace {

struct PatchBall {
    Eigen::VectorXd center;
    double radius = 0.0;
};

// sampled enclosing ball, padded; used to skip planes that cannot hit
PatchBall patch_ball(const Patch& p) {
    PatchBall b;
    if (p.kind == Patch::Kind::Point) {
        b.center = p.at;
        return b;
    }
    std::vector<Eigen::VectorXd> pts;
    Halton hal(p.e);
    Eigen::VectorXd width = p.box_hi - p.box_lo;
    for (int i = 0; i < 128; ++i)
        pts.push_back(p.eval(p.box_lo.array() + width.array() * hal.next().array()));
    for (int mask = 0; mask < (1 << p.e); ++mask) {
        Eigen::VectorXd u(p.e);
        for (int a = 0; a < p.e; ++a) u[a] = (mask >> a) & 1 ? p.box_hi[a] : p.box_lo[a];
        pts.push_back(p.eval(u));
    }
    b.center = Eigen::VectorXd::Zero(p.n);
    for (const auto& q : pts) b.center += q;
    b.center /= static_cast<double>(pts.size());
    for (const auto& q : pts) b.radius = std::max(b.radius, (q - b.center).norm());
    b.radius *= 1.05;
    b.radius += 1e-9;
    return b;
}

struct Worker {
    const Scene& scene;
    NewtonConfig cfg;
    std::vector<PatchBall> balls;

    Worker(const Scene& s, const NewtonConfig& c) : scene(s), cfg(c) {
        balls.reserve(s.patches.size());
        for (const auto& p : s.patches) balls.push_back(patch_ball(p));
    }

    IntersectCount count(const AffinePlane& E) const {
        const int n = scene.ambient_dim;
        Eigen::MatrixXd A = E.direction.complement_basis(); // n x e
        Eigen::VectorXd b = A.transpose() * E.base;
        const Eigen::MatrixXd off_plane = Eigen::MatrixXd::Identity(n, n) - E.direction.projection();

        IntersectCount out;
        std::vector<Eigen::VectorXd> roots;
        for (size_t pi = 0; pi < scene.patches.size(); ++pi) {
            const Patch& p = scene.patches[pi];
            if (p.kind == Patch::Kind::Point) continue;
            double plane_dist = (off_plane * balls[pi].center - E.base).norm();
            if (plane_dist > balls[pi].radius) continue;
            newton_roots(p, A, b, roots, out.unstable);
        }
        out.count = static_cast<long>(roots.size());
        return out;
    }

    void newton_roots(const Patch& p, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      std::vector<Eigen::VectorXd>& roots, bool& unstable) const {
        const int e = p.e;
        const int g = cfg.grid_per_axis;
        Eigen::VectorXd width = p.box_hi - p.box_lo;
        long starts = 1;
        for (int a = 0; a < e; ++a) starts *= g;

        Eigen::VectorXd u(e), point(p.n), F(e), Fnew(e), trial(e);
        Eigen::MatrixXd jac(p.n, e), J(e, e);
        // roots of this patch only: a near-double root (two Newton limits a
        // hair apart) is the signature of a tangential hit
        std::vector<Eigen::VectorXd> local;
        const double pair_radius = 1e-4;
        auto clamp = [&](Eigen::VectorXd& v) {
            for (int a = 0; a < e; ++a) v[a] = std::min(p.box_hi[a], std::max(p.box_lo[a], v[a]));
        };

        for (long s = 0; s < starts; ++s) {
            long idx = s;
            for (int a = 0; a < e; ++a) {
                u[a] = p.box_lo[a] + (static_cast<double>(idx % g) + 0.5) / g * width[a];
                idx /= g;
            }
            bool found = false;
            p.eval_with_jacobian(u, point, jac);
            F = A.transpose() * point - b;
            double res = F.norm();
            for (int iter = 0; iter < cfg.max_iter; ++iter) {
                if (res < cfg.tol) {
                    found = true;
                    break;
                }
                J = A.transpose() * jac;
                Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
                if (!step.allFinite()) break;
                double t = 1.0;
                double res_new = res;
                while (t > 1.0 / 1024.0) {
                    trial = u + t * step;
                    clamp(trial);
                    Fnew = A.transpose() * p.eval(trial) - b;
                    res_new = Fnew.norm();
                    if (std::isfinite(res_new) && res_new < res) break;
                    t *= 0.5;
                }
                if (!(std::isfinite(res_new) && res_new < res)) break; // stalled
                u = trial;
                p.eval_with_jacobian(u, point, jac);
                F = A.transpose() * point - b;
                res = F.norm();
            }
            if (!found && res < cfg.tol) found = true;
            if (!found) continue;

            J = A.transpose() * jac;
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
            const auto& sv = svd.singularValues();
            if (sv[e - 1] <= 0.0 || sv[0] / sv[e - 1] > 1e8) {
                unstable = true; // tangential hit; the sampler redraws
                continue;
            }
            bool fresh = true;
            for (const auto& r : roots)
                if ((r - point).norm() <= cfg.dedup_radius) {
                    fresh = false;
                    break;
                }
            if (!fresh) continue;
            for (const auto& r : local)
                if ((r - point).norm() <= pair_radius) {
                    unstable = true;
                    break;
                }
            local.push_back(point);
            roots.push_back(point);
        }
    }
};

double scene_window_radius(const Scene& s) {
    if (s.bbox_lo.size() == 0) throw ValidationError("crofton: scene bounding box unset");
    const int n = s.ambient_dim;
    double r = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        Eigen::VectorXd c(n);
        for (int a = 0; a < n; ++a) c[a] = (mask >> a) & 1 ? s.bbox_hi[a] : s.bbox_lo[a];
        r = std::max(r, c.norm()); // offsets are drawn around the origin
    }
    return r;
}

} // namespace

IntersectCount intersect_count(const Scene& s, const AffinePlane& E, const NewtonConfig& cfg) {
    if (E.ambient_dim() != s.ambient_dim)
        throw ValidationError("intersect_count: plane/scene dimension mismatch");
    return Worker(s, cfg).count(E);
}

MeasureReport crofton_estimate(const Scene& s, int e, const CroftonConfig& cfg) {
    const int n = s.ambient_dim;
    if (e <= 0 || e >= n)
        throw ValidationError("crofton_estimate: need 0 < e < n (use area for e = n, counting "
                              "for e = 0)");
    if (cfg.samples <= 0) throw ValidationError("crofton_estimate: samples must be positive");
    for (const auto& p : s.patches)
        if (p.kind != Patch::Kind::Point && p.e != e)
            throw ValidationError("crofton_estimate: patch of dimension " + std::to_string(p.e) +
                                  ", expected " + std::to_string(e));

    double R_min = scene_window_radius(s);
    double R = cfg.window_radius > 0 ? cfg.window_radius : std::max(R_min, 1e-6);
    if (R < R_min)
        throw ValidationError("crofton_estimate: window radius " + std::to_string(R) +
                              " smaller than the scene shadow radius " + std::to_string(R_min));

    Worker worker(s, cfg.newton);
    const int k = n - e;

    const long chunk_size = 1024;
    const int nchunks = static_cast<int>((cfg.samples + chunk_size - 1) / chunk_size);
    struct ChunkStats {
        double sum = 0.0, sumsq = 0.0;
        long unstable = 0;
    };
    auto stats = parallel_map_chunks(nchunks, [&](int ci) {
        ChunkStats st;
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(ci));
        long todo = std::min(chunk_size, cfg.samples - static_cast<long>(ci) * chunk_size);
        for (long i = 0; i < todo; ++i) {
            IntersectCount c;
            for (int retry = 0; retry < 64; ++retry) {
                c = worker.count(sample_affine_plane(n, k, R, rng));
                if (!c.unstable) break;
                ++st.unstable;
            }
            double v = static_cast<double>(c.count);
            st.sum += v;
            st.sumsq += v * v;
        }
        return st;
    });

    double sum = 0.0, sumsq = 0.0;
    long unstable = 0;
    for (const auto& st : stats) { // fixed chunk order
        sum += st.sum;
        sumsq += st.sumsq;
        unstable += st.unstable;
    }

    const double N = static_cast<double>(cfg.samples);
    const double mean = sum / N;
    double var = N > 1 ? std::max(0.0, (sumsq - sum * sum / N) / (N - 1.0)) : 0.0;
    const double scale = ball_volume(e) * std::pow(R, e) / beta_constant(n, e);

    MeasureReport rep;
    rep.method = "crofton";
    rep.n = n;
    rep.e = e;
    rep.value = scale * mean;
    rep.stderr_ = scale * std::sqrt(var / N);
    rep.samples = cfg.samples;
    rep.seed = cfg.seed;
    rep.unstable_fraction =
        static_cast<double>(unstable) / static_cast<double>(cfg.samples + unstable);
    return rep;
}

} // namespace gmtk
