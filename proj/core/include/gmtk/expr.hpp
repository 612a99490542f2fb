#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmtk/errors.hpp"

namespace gmtk {

/// Value + gradient pair for forward-mode differentiation. The gradient is
/// taken with respect to at most kMaxAmbientDim variables.
struct Dual {
    double v = 0.0;
    int d = 0;
    double g[kMaxAmbientDim] = {};

    static Dual constant(double c, int d) {
        Dual r;
        r.v = c;
        r.d = d;
        return r;
    }
    static Dual variable(double x, int i, int d) {
        Dual r = constant(x, d);
        r.g[i] = 1.0;
        return r;
    }
};

namespace detail {
struct ExprNode;
}

/// A closed-form C^1 expression over variables x1..xd.
/// Nodes: constant, variable, +, -, *, /, integer power, sqrt, sin, cos,
/// exp, abs, min, max. Derivatives at abs/min/max kinks take the left branch.
class Expr {
public:
    Expr() = default;

    static Expr constant(double c);
    static Expr variable(int index);

    bool valid() const { return node_ != nullptr; }

    double eval(const Eigen::VectorXd& x) const;
    Dual eval_dual(const Eigen::VectorXd& x) const;

    /// Structural substitution: variable i is replaced by args[i].
    Expr substitute(const std::vector<Expr>& args) const;

    /// Canonical infix form; parse(to_string()) evaluates identically.
    std::string to_string(const std::vector<std::string>& var_names) const;

    /// Largest variable index referenced, or -1 for constants.
    int max_var() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    static Expr pow(const Expr& a, int k);
    static Expr sqrt(const Expr& a);
    static Expr sin(const Expr& a);
    static Expr cos(const Expr& a);
    static Expr exp(const Expr& a);
    static Expr abs(const Expr& a);
    static Expr min(const Expr& a, const Expr& b);
    static Expr max(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::ExprNode> node_;
};

/// Default variable names for a d-variable context: x,y,z,w plus x1..xd
/// aliases; for d == 1, t and u as well.
std::vector<std::string> default_var_names(int d);

/// Parses an infix expression string. `var_names[i]` binds to variable i.
/// Reports syntax errors with a column offset.
Expr parse_expr(const std::string& text, const std::vector<std::string>& var_names);

/// A C^1 map R^d -> R^m given by component expressions, with an optional
/// declared sup-norm bound on the derivative matrix.
struct VectorMap {
    int domain_dim = 0;
    int codomain_dim = 0;
    std::vector<Expr> components;
    std::optional<double> declared_bound;

    VectorMap() = default;
    VectorMap(int d, std::vector<Expr> comps, std::optional<double> bound = std::nullopt);

    static VectorMap parse(int d, const std::vector<std::string>& texts,
                           std::optional<double> bound = std::nullopt);
    static VectorMap identity(int d);

    Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
    /// m x d derivative matrix by forward accumulation.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;
    void eval_with_jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& value,
                            Eigen::MatrixXd& jac) const;

    /// Composition this(inner(u)) by expression substitution.
    VectorMap compose(const VectorMap& inner) const;

    std::vector<std::string> to_strings() const;
};

} // namespace gmtk
