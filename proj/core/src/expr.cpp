#include "gmtk/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace gmtk {
namespace detail {

enum class Op {
    Const,
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Abs,
    Min,
    Max,
};

struct ExprNode {
    Op op;
    double value = 0.0; // Const
    int var = -1;       // Var
    int ipow = 0;       // Pow
    std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

double eval_node(const ExprNode& n, const Eigen::VectorXd& x) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var:
            if (n.var >= x.size()) throw ValidationError("expression references variable beyond domain dimension");
            return x[n.var];
        case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case Op::Div: {
            double den = eval_node(*n.b, x);
            if (den == 0.0) throw NumericalError("division by zero in expression evaluation");
            return eval_node(*n.a, x) / den;
        }
        case Op::Neg: return -eval_node(*n.a, x);
        case Op::Pow: return std::pow(eval_node(*n.a, x), n.ipow);
        case Op::Sqrt: {
            double v = eval_node(*n.a, x);
            if (v < 0.0) throw NumericalError("sqrt of negative value in expression evaluation");
            return std::sqrt(v);
        }
        case Op::Sin: return std::sin(eval_node(*n.a, x));
        case Op::Cos: return std::cos(eval_node(*n.a, x));
        case Op::Exp: return std::exp(eval_node(*n.a, x));
        case Op::Abs: return std::abs(eval_node(*n.a, x));
        case Op::Min: return std::min(eval_node(*n.a, x), eval_node(*n.b, x));
        case Op::Max: return std::max(eval_node(*n.a, x), eval_node(*n.b, x));
    }
    throw Error("unreachable expression op");
}

Dual dual_unary(const Dual& a, double v, double dv) {
    Dual r = Dual::constant(v, a.d);
    for (int i = 0; i < a.d; ++i) r.g[i] = dv * a.g[i];
    return r;
}

Dual eval_dual_node(const ExprNode& n, const Eigen::VectorXd& x) {
    const int d = static_cast<int>(x.size());
    switch (n.op) {
        case Op::Const: return Dual::constant(n.value, d);
        case Op::Var:
            if (n.var >= d) throw ValidationError("expression references variable beyond domain dimension");
            return Dual::variable(x[n.var], n.var, d);
        case Op::Add: {
            Dual a = eval_dual_node(*n.a, x), b = eval_dual_node(*n.b, x);
            Dual r = Dual::constant(a.v + b.v, d);
            for (int i = 0; i < d; ++i) r.g[i] = a.g[i] + b.g[i];
            return r;
        }
        case Op::Sub: {
            Dual a = eval_dual_node(*n.a, x), b = eval_dual_node(*n.b, x);
            Dual r = Dual::constant(a.v - b.v, d);
            for (int i = 0; i < d; ++i) r.g[i] = a.g[i] - b.g[i];
            return r;
        }
        case Op::Mul: {
            Dual a = eval_dual_node(*n.a, x), b = eval_dual_node(*n.b, x);
            Dual r = Dual::constant(a.v * b.v, d);
            for (int i = 0; i < d; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
            return r;
        }
        case Op::Div: {
            Dual a = eval_dual_node(*n.a, x), b = eval_dual_node(*n.b, x);
            if (b.v == 0.0) throw NumericalError("division by zero in expression evaluation");
            Dual r = Dual::constant(a.v / b.v, d);
            for (int i = 0; i < d; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
            return r;
        }
        case Op::Neg: {
            Dual a = eval_dual_node(*n.a, x);
            return dual_unary(a, -a.v, -1.0);
        }
        case Op::Pow: {
            Dual a = eval_dual_node(*n.a, x);
            double v = std::pow(a.v, n.ipow);
            double dv = n.ipow * std::pow(a.v, n.ipow - 1);
            return dual_unary(a, v, dv);
        }
        case Op::Sqrt: {
            Dual a = eval_dual_node(*n.a, x);
            if (a.v < 0.0) throw NumericalError("sqrt of negative value in expression evaluation");
            double v = std::sqrt(a.v);
            return dual_unary(a, v, v > 0.0 ? 0.5 / v : std::numeric_limits<double>::infinity());
        }
        case Op::Sin: {
            Dual a = eval_dual_node(*n.a, x);
            return dual_unary(a, std::sin(a.v), std::cos(a.v));
        }
        case Op::Cos: {
            Dual a = eval_dual_node(*n.a, x);
            return dual_unary(a, std::cos(a.v), -std::sin(a.v));
        }
        case Op::Exp: {
            Dual a = eval_dual_node(*n.a, x);
            double v = std::exp(a.v);
            return dual_unary(a, v, v);
        }
        case Op::Abs: {
            // left-branch convention at the kink
            Dual a = eval_dual_node(*n.a, x);
            return dual_unary(a, std::abs(a.v), a.v > 0.0 ? 1.0 : -1.0);
        }
        case Op::Min: {
            Dual a = eval_dual_node(*n.a, x), b = eval_dual_node(*n.b, x);
            return a.v <= b.v ? a : b;
        }
        case Op::Max: {
            Dual a = eval_dual_node(*n.a, x), b = eval_dual_node(*n.b, x);
            return a.v >= b.v ? a : b;
        }
    }
    throw Error("unreachable expression op");
}

NodePtr substitute_node(const NodePtr& n, const std::vector<NodePtr>& args) {
    switch (n->op) {
        case Op::Const: return n;
        case Op::Var:
            if (n->var >= static_cast<int>(args.size()))
                throw ValidationError("substitute: missing argument for variable");
            return args[n->var];
        default: {
            auto copy = std::make_shared<ExprNode>(*n);
            if (n->a) copy->a = substitute_node(n->a, args);
            if (n->b) copy->b = substitute_node(n->b, args);
            return copy;
        }
    }
}

int max_var_node(const ExprNode& n) {
    int m = n.op == Op::Var ? n.var : -1;
    if (n.a) m = std::max(m, max_var_node(*n.a));
    if (n.b) m = std::max(m, max_var_node(*n.b));
    return m;
}

// precedence levels for printing: 0 add, 1 mul, 2 unary, 3 pow/atom
void print_node(std::ostream& os, const ExprNode& n, const std::vector<std::string>& vars,
                int parent_prec) {
    auto paren = [&](int prec, auto&& body) {
        if (prec < parent_prec) {
            os << '(';
            body();
            os << ')';
        } else {
            body();
        }
    };
    switch (n.op) {
        case Op::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            std::string s = tmp.str();
            if (n.value < 0)
                paren(2, [&] { os << s; });
            else
                os << s;
            break;
        }
        case Op::Var:
            if (n.var >= static_cast<int>(vars.size()))
                os << "x" << (n.var + 1);
            else
                os << vars[n.var];
            break;
        case Op::Add:
            paren(0, [&] {
                print_node(os, *n.a, vars, 0);
                os << " + ";
                print_node(os, *n.b, vars, 1);
            });
            break;
        case Op::Sub:
            paren(0, [&] {
                print_node(os, *n.a, vars, 0);
                os << " - ";
                print_node(os, *n.b, vars, 1);
            });
            break;
        case Op::Mul:
            paren(1, [&] {
                print_node(os, *n.a, vars, 1);
                os << " * ";
                print_node(os, *n.b, vars, 2);
            });
            break;
        case Op::Div:
            paren(1, [&] {
                print_node(os, *n.a, vars, 1);
                os << " / ";
                print_node(os, *n.b, vars, 2);
            });
            break;
        case Op::Neg:
            paren(2, [&] {
                os << '-';
                print_node(os, *n.a, vars, 2);
            });
            break;
        case Op::Pow:
            paren(3, [&] {
                print_node(os, *n.a, vars, 4);
                os << '^';
                if (n.ipow < 0)
                    os << '(' << n.ipow << ')';
                else
                    os << n.ipow;
            });
            break;
        case Op::Sqrt:
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
        case Op::Abs: {
            const char* name = n.op == Op::Sqrt  ? "sqrt"
                               : n.op == Op::Sin ? "sin"
                               : n.op == Op::Cos ? "cos"
                               : n.op == Op::Exp ? "exp"
                                                 : "abs";
            os << name << '(';
            print_node(os, *n.a, vars, 0);
            os << ')';
            break;
        }
        case Op::Min:
        case Op::Max:
            os << (n.op == Op::Min ? "min(" : "max(");
            print_node(os, *n.a, vars, 0);
            os << ", ";
            print_node(os, *n.b, vars, 0);
            os << ')';
            break;
    }
}

} // namespace detail

using detail::ExprNode;
using detail::NodePtr;
using detail::Op;

Expr Expr::constant(double c) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->value = c;
    return Expr(n);
}

Expr Expr::variable(int index) {
    if (index < 0 || index >= kMaxAmbientDim) throw ValidationError("variable index out of range");
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Var;
    n->var = index;
    return Expr(n);
}

double Expr::eval(const Eigen::VectorXd& x) const {
    if (!node_) throw Error("evaluating empty expression");
    return detail::eval_node(*node_, x);
}

Dual Expr::eval_dual(const Eigen::VectorXd& x) const {
    if (!node_) throw Error("evaluating empty expression");
    return detail::eval_dual_node(*node_, x);
}

Expr Expr::substitute(const std::vector<Expr>& args) const {
    std::vector<NodePtr> nodes;
    nodes.reserve(args.size());
    for (const auto& a : args) {
        if (!a.valid()) throw Error("substitute: empty argument expression");
        nodes.push_back(a.node_);
    }
    return Expr(detail::substitute_node(node_, nodes));
}

std::string Expr::to_string(const std::vector<std::string>& var_names) const {
    std::ostringstream os;
    detail::print_node(os, *node_, var_names, 0);
    return os.str();
}

int Expr::max_var() const { return node_ ? detail::max_var_node(*node_) : -1; }

Expr operator+(const Expr& a, const Expr& b) { return Expr(detail::make(Op::Add, a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(detail::make(Op::Sub, a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(detail::make(Op::Mul, a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(detail::make(Op::Div, a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(detail::make(Op::Neg, a.node_)); }
Expr Expr::pow(const Expr& a, int k) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Pow;
    n->ipow = k;
    n->a = a.node_;
    return Expr(n);
}
Expr Expr::sqrt(const Expr& a) { return Expr(detail::make(Op::Sqrt, a.node_)); }
Expr Expr::sin(const Expr& a) { return Expr(detail::make(Op::Sin, a.node_)); }
Expr Expr::cos(const Expr& a) { return Expr(detail::make(Op::Cos, a.node_)); }
Expr Expr::exp(const Expr& a) { return Expr(detail::make(Op::Exp, a.node_)); }
Expr Expr::abs(const Expr& a) { return Expr(detail::make(Op::Abs, a.node_)); }
Expr Expr::min(const Expr& a, const Expr& b) { return Expr(detail::make(Op::Min, a.node_, b.node_)); }
Expr Expr::max(const Expr& a, const Expr& b) { return Expr(detail::make(Op::Max, a.node_, b.node_)); }

std::vector<std::string> default_var_names(int d) {
    std::vector<std::string> names;
    static const char* short_names[] = {"x", "y", "z", "w"};
    for (int i = 0; i < d && i < 4; ++i) names.push_back(short_names[i]);
    // canonical x1..xd aliases always resolve
    // (parser matches by name; printer prefers the short names)
    return names;
}

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& vars;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression error at column " + std::to_string(pos + 1) + ": " + msg +
                         " in \"" + text + "\"");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos != text.size()) fail("unexpected trailing input");
        return e;
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (eat('+'))
                e = e + term();
            else if (eat('-'))
                e = e - term();
            else
                return e;
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (eat('*'))
                e = e * unary();
            else if (eat('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Expr power() {
        Expr e = atom();
        if (eat('^')) {
            bool parens = eat('(');
            skip_ws();
            bool neg = false;
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
                neg = text[pos] == '-';
                ++pos;
            }
            size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == start) fail("expected integer exponent after '^'");
            int k = std::stoi(text.substr(start, pos - start));
            if (parens && !eat(')')) fail("expected ')' after exponent");
            e = Expr::pow(e, neg ? -k : k);
        }
        return e;
    }

    Expr atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character");
    }

    Expr number() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
            ++pos;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            size_t save = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            } else {
                pos = save;
            }
        }
        try {
            return Expr::constant(std::stod(text.substr(start, pos - start)));
        } catch (const std::exception&) {
            fail("malformed number literal");
        }
    }

    Expr identifier() {
        size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);

        if (peek() == '(') {
            ++pos; // consume '('
            if (name == "min" || name == "max") {
                Expr a = expr();
                if (!eat(',')) fail("expected ',' in " + name + "(a, b)");
                Expr b = expr();
                if (!eat(')')) fail("expected ')'");
                return name == "min" ? Expr::min(a, b) : Expr::max(a, b);
            }
            Expr a = expr();
            if (!eat(')')) fail("expected ')'");
            if (name == "sqrt") return Expr::sqrt(a);
            if (name == "sin") return Expr::sin(a);
            if (name == "cos") return Expr::cos(a);
            if (name == "exp") return Expr::exp(a);
            if (name == "abs") return Expr::abs(a);
            fail("unknown function '" + name + "'");
        }

        if (name == "pi") return Expr::constant(M_PI);
        for (int i = 0; i < static_cast<int>(vars.size()); ++i)
            if (vars[i] == name) return Expr::variable(i);
        // canonical aliases x1..xd, plus t/u for one-variable contexts
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (size_t i = 1; i < name.size(); ++i)
                digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
            if (digits) {
                int idx = std::stoi(name.substr(1)) - 1;
                if (idx >= 0 && idx < kMaxAmbientDim) return Expr::variable(idx);
            }
        }
        if (name == "t" || name == "u" || name == "r") return Expr::variable(0);
        fail("unknown identifier '" + name + "'");
    }
};

} // namespace

Expr parse_expr(const std::string& text, const std::vector<std::string>& var_names) {
    Parser p{text, var_names};
    return p.parse();
}

VectorMap::VectorMap(int d, std::vector<Expr> comps, std::optional<double> bound)
    : domain_dim(d), codomain_dim(static_cast<int>(comps.size())), components(std::move(comps)),
      declared_bound(bound) {
    for (const auto& c : components) {
        if (!c.valid()) throw Error("VectorMap: empty component");
        if (c.max_var() >= d)
            throw ValidationError("VectorMap: component references variable beyond domain dimension");
    }
}

VectorMap VectorMap::parse(int d, const std::vector<std::string>& texts, std::optional<double> bound) {
    auto names = default_var_names(d);
    std::vector<Expr> comps;
    comps.reserve(texts.size());
    for (const auto& t : texts) comps.push_back(parse_expr(t, names));
    return VectorMap(d, std::move(comps), bound);
}

VectorMap VectorMap::identity(int d) {
    std::vector<Expr> comps;
    for (int i = 0; i < d; ++i) comps.push_back(Expr::variable(i));
    return VectorMap(d, std::move(comps));
}

Eigen::VectorXd VectorMap::eval(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(codomain_dim);
    for (int i = 0; i < codomain_dim; ++i) out[i] = components[i].eval(x);
    return out;
}

Eigen::MatrixXd VectorMap::jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd jac(codomain_dim, domain_dim);
    for (int i = 0; i < codomain_dim; ++i) {
        Dual d = components[i].eval_dual(x);
        for (int j = 0; j < domain_dim; ++j) jac(i, j) = d.g[j];
    }
    return jac;
}

void VectorMap::eval_with_jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& value,
                                   Eigen::MatrixXd& jac) const {
    value.resize(codomain_dim);
    jac.resize(codomain_dim, domain_dim);
    for (int i = 0; i < codomain_dim; ++i) {
        Dual d = components[i].eval_dual(x);
        value[i] = d.v;
        for (int j = 0; j < domain_dim; ++j) jac(i, j) = d.g[j];
    }
}

VectorMap VectorMap::compose(const VectorMap& inner) const {
    if (inner.codomain_dim != domain_dim)
        throw ValidationError("compose: dimension mismatch");
    std::vector<Expr> comps;
    comps.reserve(components.size());
    for (const auto& c : components) comps.push_back(c.substitute(inner.components));
    return VectorMap(inner.domain_dim, std::move(comps));
}

std::vector<std::string> VectorMap::to_strings() const {
    auto names = default_var_names(domain_dim);
    // ensure every referenced variable prints: pad with x5..xd names
    for (int i = static_cast<int>(names.size()); i < domain_dim; ++i)
        names.push_back("x" + std::to_string(i + 1));
    std::vector<std::string> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.to_string(names));
    return out;
}

} // namespace gmtk
