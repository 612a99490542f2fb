#include "gmtk/whitney.hpp"

#include <algorithm>
#include <cmath>

#include "gmtk/quadrature.hpp"

namespace gmtk {

WhitneyConstants whitney_constants(int n, double L) {
    if (n < 1) throw ValidationError("whitney_constants: need n >= 1");
    if (!(L > 0)) throw ValidationError("whitney_constants: need L > 0");
    double K = 1.0; // straight segment in one dimension
    for (int m = 2; m <= n; ++m) K = K * (1.0 + 4.0 * L) + L + 1.0;

    double k = L;
    for (int m = 2; m <= n; ++m) {
        double K_prev = 1.0; // K(m-1, k(m-1, L))
        for (int j = 2; j <= m - 1; ++j) K_prev = K_prev * (1.0 + 4.0 * k) + k + 1.0;
        k = L * K_prev;
    }
    return {K, k};
}

Eigen::VectorXd DefinableCurve::eval(double t) const {
    for (const auto& pc : pieces) {
        if (t <= pc.t1 || &pc == &pieces.back()) {
            Eigen::VectorXd arg(1);
            arg[0] = t;
            return pc.map.eval(arg);
        }
    }
    throw ValidationError("DefinableCurve: empty curve");
}

Eigen::VectorXd DefinableCurve::derivative(double t) const {
    for (const auto& pc : pieces) {
        if (t <= pc.t1 || &pc == &pieces.back()) {
            Eigen::VectorXd arg(1);
            arg[0] = t;
            return pc.map.jacobian(arg).col(0);
        }
    }
    throw ValidationError("DefinableCurve: empty curve");
}

double DefinableCurve::length() const {
    double total = 0.0;
    for (const auto& pc : pieces) {
        auto speed = [&](double t) {
            Eigen::VectorXd arg(1);
            arg[0] = t;
            return pc.map.jacobian(arg).col(0).norm();
        };
        QuadOptions opt;
        opt.abs_tol = 1e-10;
        total += integrate_1d(speed, pc.t0, pc.t1, opt).value;
    }
    return total;
}

namespace {

// the single closed-form component map of the recursive construction
VectorMap connect_map(const CellDomain& c, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Expr t = Expr::variable(0);
    switch (c.kind()) {
        case CellDomain::Kind::Point:
            return VectorMap(1, {Expr::constant(c.point_value())});
        case CellDomain::Kind::Interval:
            return VectorMap(1, {Expr::constant(x[0]) + t * Expr::constant(y[0] - x[0])});
        case CellDomain::Kind::GraphExt: {
            const int m = c.base().ambient_dim();
            VectorMap alpha = connect_map(c.base(), x.head(m), y.head(m));
            VectorMap lifted = c.f().compose(alpha);
            std::vector<Expr> comps = alpha.components;
            comps.push_back(lifted.components[0]);
            return VectorMap(1, std::move(comps));
        }
        case CellDomain::Kind::BandExt: {
            const int m = c.base().ambient_dim();
            VectorMap alpha = connect_map(c.base(), x.head(m), y.head(m));
            double gx = c.g().eval(x.head(m))[0], hx = c.h().eval(x.head(m))[0];
            double gy = c.g().eval(y.head(m))[0], hy = c.h().eval(y.head(m))[0];
            if (!(hx > gx) || !(hy > gy))
                throw ValidationError("connect_points: band pinches at an endpoint");
            // fiber coordinates of the endpoints, nudged off the boundary
            double u = std::clamp((x[m] - gx) / (hx - gx), 1e-12, 1.0 - 1e-12);
            double v = std::clamp((y[m] - gy) / (hy - gy), 1e-12, 1.0 - 1e-12);
            Expr l = Expr::constant(u) + t * Expr::constant(v - u);
            Expr gt = c.g().compose(alpha).components[0];
            Expr ht = c.h().compose(alpha).components[0];
            std::vector<Expr> comps = alpha.components;
            comps.push_back(gt + l * (ht - gt));
            return VectorMap(1, std::move(comps));
        }
    }
    throw ValidationError("connect_points: unknown cell kind");
}

} // namespace

DefinableCurve connect_points(const CellDomain& c, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
    if (x.size() != c.ambient_dim() || y.size() != c.ambient_dim())
        throw ValidationError("connect_points: endpoint dimension mismatch");
    if (!c.contains(x)) throw ValidationError("connect_points: x is not in the cell");
    if (!c.contains(y)) throw ValidationError("connect_points: y is not in the cell");
    DefinableCurve curve;
    curve.x = x;
    curve.y = y;
    curve.pieces.push_back({0.0, 1.0, connect_map(c, x, y)});
    return curve;
}

Eigen::VectorXd sample_cell_point(const CellDomain& c, Rng& rng) {
    auto interior = [&]() { return 1e-9 + (1.0 - 2e-9) * rng.uniform(); };
    switch (c.kind()) {
        case CellDomain::Kind::Point: {
            Eigen::VectorXd p(1);
            p[0] = c.point_value();
            return p;
        }
        case CellDomain::Kind::Interval: {
            Eigen::VectorXd p(1);
            p[0] = c.interval_lo() + (c.interval_hi() - c.interval_lo()) * interior();
            return p;
        }
        case CellDomain::Kind::GraphExt: {
            Eigen::VectorXd base = sample_cell_point(c.base(), rng);
            Eigen::VectorXd p(base.size() + 1);
            p.head(base.size()) = base;
            p[base.size()] = c.f().eval(base)[0];
            return p;
        }
        case CellDomain::Kind::BandExt: {
            Eigen::VectorXd base = sample_cell_point(c.base(), rng);
            double g = c.g().eval(base)[0], h = c.h().eval(base)[0];
            Eigen::VectorXd p(base.size() + 1);
            p.head(base.size()) = base;
            p[base.size()] = g + (h - g) * interior();
            return p;
        }
    }
    throw ValidationError("sample_cell_point: unknown cell kind");
}

WhitneyReport whitney_verify(const CellDomain& c, double K_bound, long trials, Rng& rng) {
    if (!(K_bound > 0)) throw ValidationError("whitney_verify: K_bound must be positive");
    WhitneyReport rep;
    rep.K_bound = K_bound;
    rep.trials = trials;
    const int t_samples = 1000;
    for (long trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd x = sample_cell_point(c, rng);
        Eigen::VectorXd y = sample_cell_point(c, rng);
        double d = (x - y).norm();
        if (d < 1e-9) continue; // ratio undefined at coincident points
        DefinableCurve curve = connect_points(c, x, y);

        double tol = 1e-12 * (1.0 + std::max(x.norm(), y.norm()));
        if ((curve.eval(0.0) - x).norm() > tol || (curve.eval(1.0) - y).norm() > tol)
            ++rep.endpoint_failures;

        for (int i = 0; i < t_samples; ++i) {
            double t = (i + 0.5) / t_samples;
            if (!c.contains(curve.eval(t))) {
                ++rep.containment_failures;
                break;
            }
        }
        for (int i = 0; i <= t_samples; ++i) {
            double t = static_cast<double>(i) / t_samples;
            rep.max_pointwise_ratio =
                std::max(rep.max_pointwise_ratio, curve.derivative(t).norm() / d);
        }
        rep.max_ratio = std::max(rep.max_ratio, curve.length() / d);
    }
    rep.pass = rep.endpoint_failures == 0 && rep.containment_failures == 0 &&
               rep.max_ratio <= K_bound * (1.0 + 1e-8) &&
               rep.max_pointwise_ratio <= K_bound * (1.0 + 1e-8);
    return rep;
}

} // namespace gmtk
