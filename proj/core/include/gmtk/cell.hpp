#pragma once
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gmtk/expr.hpp"

namespace gmtk {

/// Inductive cell per the (i1,...,im) grammar:
///   Point(r) | Interval(a,b) | GraphExt(base, f) | BandExt(base, g, h)
/// where f, g, h are scalar C^1 bound functions of the base coordinates.
/// Each constructor carries the declared derivative bound M of its
/// bounding functions.
class CellDomain {
public:
    enum class Kind { Point, Interval, GraphExt, BandExt };

    /// Placeholder (a 0-cell at the origin of R^0); reassign before use.
    CellDomain() = default;

    static CellDomain point(double r);
    static CellDomain interval(double a, double b);
    static CellDomain graph_ext(CellDomain base, VectorMap f, double bound);
    static CellDomain band_ext(CellDomain base, VectorMap g, VectorMap h, double bound);

    Kind kind() const { return kind_; }
    int ambient_dim() const { return ambient_; }
    int dim() const { return dim_; }
    /// The open/point pattern (i1,...,im), 1 = open direction.
    std::vector<int> pattern() const;
    /// True when every constructor is Interval/BandExt (dim == ambient_dim).
    bool is_open() const { return dim_ == ambient_ && kind_ != Kind::Point; }

    double point_value() const { return a_; }
    double interval_lo() const { return a_; }
    double interval_hi() const { return b_; }
    const CellDomain& base() const { return *base_; }
    const VectorMap& f() const { return f_; }
    const VectorMap& g() const { return f_; }
    const VectorMap& h() const { return h_; }
    double bound() const { return bound_; }
    /// Max declared bound along the whole constructor chain.
    double chain_bound() const;

    /// Strict membership (graph coordinates compared within graph_tol).
    bool contains(const Eigen::VectorXd& x, double graph_tol = 1e-9) const;

    /// For open cells: maps the unit box (0,1)^e onto the cell.
    Eigen::VectorXd chart(const Eigen::VectorXd& u) const;
    /// Chart value and its e x e Jacobian (lower triangular).
    void chart_with_jacobian(const Eigen::VectorXd& u, Eigen::VectorXd& x,
                             Eigen::MatrixXd& jac) const;

private:
    Kind kind_ = Kind::Point;
    int ambient_ = 0, dim_ = 0;
    double a_ = 0, b_ = 0;
    std::shared_ptr<const CellDomain> base_;
    VectorMap f_, h_; // f_: graph map or lower band bound; h_: upper band bound
    double bound_ = 0;
};

/// Result of rewriting an M-cell as a graph over an open cell:
/// realization = perm applied to (x, map(x)), x in open_cell.
struct GraphForm {
    CellDomain open_cell;          // open e-cell in R^e
    VectorMap map;                 // e -> n - e
    std::vector<int> permutation;  // component j of (x, map(x)) -> ambient coord permutation[j]
    double cell_bound = 0;         // bound of open_cell's band functions
    double map_bound = 0;          // recorded bound on |D map|
};

/// The constructive cell-to-graph rewriting: case (1) appends the graph
/// value through the accumulated coordinates, case (2) lifts the band to a
/// band over composed bounds. The recorded bounds depend only on the input
/// bound and the ambient dimension.
GraphForm cell_to_graph(const CellDomain& cell);

} // namespace gmtk
