#include "gmtk/cell.hpp"

#include <algorithm>
#include <cmath>

namespace gmtk {

CellDomain CellDomain::point(double r) {
    CellDomain c;
    c.kind_ = Kind::Point;
    c.ambient_ = 1;
    c.dim_ = 0;
    c.a_ = r;
    return c;
}

CellDomain CellDomain::interval(double a, double b) {
    if (!(a < b)) throw ValidationError("interval cell requires a < b");
    CellDomain c;
    c.kind_ = Kind::Interval;
    c.ambient_ = 1;
    c.dim_ = 1;
    c.a_ = a;
    c.b_ = b;
    return c;
}

CellDomain CellDomain::graph_ext(CellDomain base, VectorMap f, double bound) {
    if (f.domain_dim != base.ambient_dim() || f.codomain_dim != 1)
        throw ValidationError("graph_ext: bound function must be scalar over the base coordinates");
    CellDomain c;
    c.kind_ = Kind::GraphExt;
    c.ambient_ = base.ambient_dim() + 1;
    c.dim_ = base.dim();
    if (c.ambient_ > kMaxAmbientDim) throw ValidationError("cell ambient dimension exceeds cap");
    c.base_ = std::make_shared<CellDomain>(std::move(base));
    c.f_ = std::move(f);
    c.bound_ = bound;
    return c;
}

CellDomain CellDomain::band_ext(CellDomain base, VectorMap g, VectorMap h, double bound) {
    if (g.domain_dim != base.ambient_dim() || g.codomain_dim != 1 ||
        h.domain_dim != base.ambient_dim() || h.codomain_dim != 1)
        throw ValidationError("band_ext: bound functions must be scalar over the base coordinates");
    CellDomain c;
    c.kind_ = Kind::BandExt;
    c.ambient_ = base.ambient_dim() + 1;
    c.dim_ = base.dim() + 1;
    if (c.ambient_ > kMaxAmbientDim) throw ValidationError("cell ambient dimension exceeds cap");
    c.base_ = std::make_shared<CellDomain>(std::move(base));
    c.f_ = std::move(g);
    c.h_ = std::move(h);
    c.bound_ = bound;
    return c;
}

std::vector<int> CellDomain::pattern() const {
    std::vector<int> p;
    const CellDomain* c = this;
    while (c) {
        switch (c->kind_) {
            case Kind::Point: p.push_back(0); c = nullptr; break;
            case Kind::Interval: p.push_back(1); c = nullptr; break;
            case Kind::GraphExt: p.push_back(0); c = c->base_.get(); break;
            case Kind::BandExt: p.push_back(1); c = c->base_.get(); break;
        }
    }
    std::reverse(p.begin(), p.end());
    return p;
}

double CellDomain::chain_bound() const {
    double m = bound_;
    const CellDomain* c = base_.get();
    while (c) {
        m = std::max(m, c->bound_);
        c = c->base_.get();
    }
    return m;
}

bool CellDomain::contains(const Eigen::VectorXd& x, double graph_tol) const {
    if (x.size() != ambient_) return false;
    switch (kind_) {
        case Kind::Point: return std::abs(x[0] - a_) <= graph_tol;
        case Kind::Interval: return x[0] > a_ && x[0] < b_;
        case Kind::GraphExt: {
            Eigen::VectorXd xb = x.head(ambient_ - 1);
            if (!base_->contains(xb, graph_tol)) return false;
            return std::abs(x[ambient_ - 1] - f_.eval(xb)[0]) <= graph_tol;
        }
        case Kind::BandExt: {
            Eigen::VectorXd xb = x.head(ambient_ - 1);
            if (!base_->contains(xb, graph_tol)) return false;
            double last = x[ambient_ - 1];
            return last > f_.eval(xb)[0] && last < h_.eval(xb)[0];
        }
    }
    return false;
}

Eigen::VectorXd CellDomain::chart(const Eigen::VectorXd& u) const {
    if (!is_open()) throw ValidationError("chart: cell is not open");
    if (kind_ == Kind::Interval) {
        Eigen::VectorXd x(1);
        x[0] = a_ + (b_ - a_) * u[0];
        return x;
    }
    Eigen::VectorXd xb = base_->chart(u.head(dim_ - 1));
    double gv = f_.eval(xb)[0], hv = h_.eval(xb)[0];
    Eigen::VectorXd x(dim_);
    x.head(dim_ - 1) = xb;
    x[dim_ - 1] = gv + (hv - gv) * u[dim_ - 1];
    return x;
}

void CellDomain::chart_with_jacobian(const Eigen::VectorXd& u, Eigen::VectorXd& x,
                                     Eigen::MatrixXd& jac) const {
    if (!is_open()) throw ValidationError("chart: cell is not open");
    if (kind_ == Kind::Interval) {
        x.resize(1);
        jac.resize(1, 1);
        x[0] = a_ + (b_ - a_) * u[0];
        jac(0, 0) = b_ - a_;
        return;
    }
    Eigen::VectorXd xb;
    Eigen::MatrixXd jb;
    base_->chart_with_jacobian(u.head(dim_ - 1), xb, jb);

    Eigen::VectorXd gval, hval;
    Eigen::MatrixXd gjac, hjac;
    f_.eval_with_jacobian(xb, gval, gjac);
    h_.eval_with_jacobian(xb, hval, hjac);
    double gv = gval[0], hv = hval[0];
    double t = u[dim_ - 1];

    x.resize(dim_);
    x.head(dim_ - 1) = xb;
    x[dim_ - 1] = gv + (hv - gv) * t;

    jac = Eigen::MatrixXd::Zero(dim_, dim_);
    jac.topLeftCorner(dim_ - 1, dim_ - 1) = jb;
    // d x_last / d u_head = (Dg + t (Dh - Dg)) * jb
    jac.row(dim_ - 1).head(dim_ - 1) = (gjac + t * (hjac - gjac)) * jb;
    jac(dim_ - 1, dim_ - 1) = hv - gv;
}

GraphForm cell_to_graph(const CellDomain& cell) {
    switch (cell.kind()) {
        case CellDomain::Kind::Point: {
            GraphForm out;
            out.open_cell = cell; // zero-dimensional; handled specially by callers
            out.map = VectorMap(0, {Expr::constant(cell.point_value())});
            out.permutation = {0};
            return out;
        }
        case CellDomain::Kind::Interval: {
            GraphForm out;
            out.open_cell = cell;
            out.map = VectorMap(1, {});
            out.permutation = {0};
            return out;
        }
        case CellDomain::Kind::GraphExt: {
            if (!std::isfinite(cell.bound()))
                throw ValidationError("cell_to_graph: infinite declared bound");
            GraphForm base = cell_to_graph(cell.base());
            int d = base.open_cell.dim();
            int mb = cell.base().ambient_dim();
            // express base ambient coordinates in the graph parameters
            std::vector<Expr> ambient(mb);
            for (int j = 0; j < mb; ++j) {
                int coord = base.permutation[j];
                ambient[coord] = j < d ? Expr::variable(j) : base.map.components[j - d];
            }
            Expr fnew = cell.f().components[0].substitute(ambient);
            std::vector<Expr> comps = base.map.components;
            comps.push_back(fnew);
            GraphForm out;
            out.open_cell = base.open_cell;
            out.map = VectorMap(d, std::move(comps));
            out.permutation = base.permutation;
            out.permutation.push_back(mb);
            out.cell_bound = base.cell_bound;
            double lifted = cell.bound() * (1.0 + base.map_bound);
            out.map_bound = std::hypot(base.map_bound, lifted);
            return out;
        }
        case CellDomain::Kind::BandExt: {
            if (!std::isfinite(cell.bound()))
                throw ValidationError("cell_to_graph: infinite declared bound");
            GraphForm base = cell_to_graph(cell.base());
            int d = base.open_cell.dim();
            int mb = cell.base().ambient_dim();
            std::vector<Expr> ambient(mb);
            for (int j = 0; j < mb; ++j) {
                int coord = base.permutation[j];
                ambient[coord] = j < d ? Expr::variable(j) : base.map.components[j - d];
            }
            Expr gt = cell.g().components[0].substitute(ambient);
            Expr ht = cell.h().components[0].substitute(ambient);
            double lifted = cell.bound() * (1.0 + base.map_bound);
            GraphForm out;
            out.open_cell = CellDomain::band_ext(base.open_cell, VectorMap(d, {gt}),
                                                 VectorMap(d, {ht}), lifted);
            // map ignores the band coordinate (last parameter)
            out.map = VectorMap(d + 1, base.map.components);
            out.permutation.assign(base.permutation.begin(), base.permutation.begin() + d);
            out.permutation.push_back(mb);
            for (int j = d; j < mb; ++j) out.permutation.push_back(base.permutation[j]);
            out.cell_bound = std::max(base.cell_bound, lifted);
            out.map_bound = base.map_bound;
            return out;
        }
    }
    throw Error("unreachable cell kind");
}

} // namespace gmtk
