#include "gmtk/coarea.hpp"

#include <cmath>

#include <json.hpp>

#include "gmtk/quadrature.hpp"

namespace gmtk {

std::string CheckResult::to_json() const {
    nlohmann::ordered_json j;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["gap"] = gap;
    if (excluded > 0) j["excluded"] = excluded;
    return j.dump(2) + "\n";
}

QuadResult integrate_over_cell(const CellDomain& cell,
                               const std::function<double(const Eigen::VectorXd&)>& fn,
                               const QuadOptions& opt) {
    if (!cell.is_open()) throw ValidationError("integrate_over_cell: cell must be open");
    const int d = cell.dim();
    Eigen::VectorXd x(d);
    Eigen::MatrixXd jac(d, d);
    auto pulled = [&](const Eigen::VectorXd& u) {
        cell.chart_with_jacobian(u, x, jac);
        return fn(x) * std::abs(jac.diagonal().prod()); // chart Jacobian is triangular
    };
    return integrate_box(pulled, Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d), opt);
}

namespace {

// ------------------------------------------------------ fiber tracing (m=2)

constexpr double kStep = 1e-3;
constexpr double kCorrTol = 1e-10;

struct Tracer {
    const VectorMap& f;
    const CellDomain& region;
    double y;
    std::vector<Eigen::Vector2d> visited; // all traced points, for loop dedup

    double phi(const Eigen::Vector2d& x) const { return f.eval(x)[0] - y; }

    Eigen::Vector2d grad(const Eigen::Vector2d& x) const {
        Eigen::MatrixXd j = f.jacobian(x);
        return {j(0, 0), j(0, 1)};
    }

    // projects x back onto the level set along the gradient
    bool correct(Eigen::Vector2d& x) const {
        for (int it = 0; it < 30; ++it) {
            double v = phi(x);
            if (std::abs(v) <= kCorrTol) return true;
            Eigen::Vector2d g = grad(x);
            double gn2 = g.squaredNorm();
            if (gn2 < 1e-16)
                throw NumericalError("fiber tracing: critical point near y = " + std::to_string(y));
            x -= g * (v / gn2);
        }
        return false;
    }

    Eigen::Vector2d tangent(const Eigen::Vector2d& x) const {
        Eigen::Vector2d g = grad(x);
        double gn = g.norm();
        if (gn < 1e-8)
            throw NumericalError("fiber tracing: critical point near y = " + std::to_string(y));
        return Eigen::Vector2d(-g[1], g[0]) / gn;
    }

    bool near_visited(const Eigen::Vector2d& x, double r) const {
        for (const auto& p : visited)
            if ((p - x).norm() < r) return true;
        return false;
    }

    // walks one arc from `start` in direction sign * tangent; returns its
    // length. closed = stop on returning to start; open = stop on leaving
    // the region (boundary located by bisection on the last step).
    double walk(const Eigen::Vector2d& start, double sign, bool* closed_out) {
        Eigen::Vector2d cur = start;
        Eigen::Vector2d dir = sign * tangent(cur);
        double length = 0.0;
        visited.push_back(cur);
        const long max_steps = 400000;
        for (long step = 0; step < max_steps; ++step) {
            Eigen::Vector2d nxt = cur + kStep * dir;
            if (!correct(nxt))
                throw NumericalError("fiber tracing: corrector stalled at y = " +
                                     std::to_string(y));
            if (!region.contains(nxt)) {
                // bisect the exit point along the corrected step
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 50; ++it) {
                    double mid = 0.5 * (lo + hi);
                    Eigen::Vector2d probe = cur + mid * kStep * dir;
                    if (!correct(probe)) break;
                    (region.contains(probe) ? lo : hi) = mid;
                }
                Eigen::Vector2d edge = cur + lo * kStep * dir;
                correct(edge);
                length += (edge - cur).norm();
                visited.push_back(edge); // so the far endpoint seed is not re-traced
                if (closed_out) *closed_out = false;
                return length;
            }
            length += (nxt - cur).norm();
            cur = nxt;
            visited.push_back(cur);
            if (step > 10 && (cur - start).norm() < kStep) {
                length += (start - cur).norm();
                if (closed_out) *closed_out = true;
                return length;
            }
            Eigen::Vector2d t = tangent(cur);
            dir = t.dot(dir) >= 0 ? t : Eigen::Vector2d(-t);
        }
        throw NumericalError("fiber tracing: step budget exhausted at y = " + std::to_string(y));
    }
};

// sign-change bisection along a chart path u(tau)
template <typename PathFn>
bool bisect_root(const PathFn& path, const std::function<double(const Eigen::Vector2d&)>& phi,
                 double a, double b, Eigen::Vector2d& out) {
    double fa = phi(path(a)), fb = phi(path(b));
    if (!(fa * fb < 0)) return false;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (a + b);
        double fm = phi(path(mid));
        if (std::abs(fm) <= kCorrTol) {
            out = path(mid);
            return true;
        }
        if (fa * fm < 0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    out = path(0.5 * (a + b));
    return true;
}

} // namespace

double trace_fiber_length(const VectorMap& f, const CellDomain& region, double y) {
    if (f.domain_dim != 2 || f.codomain_dim != 1)
        throw ValidationError("trace_fiber_length: needs scalar f on a plane region");
    if (!region.is_open() || region.dim() != 2)
        throw ValidationError("trace_fiber_length: region must be an open 2-cell");

    Tracer tr{f, region, y, {}};
    auto phi = [&](const Eigen::Vector2d& x) { return tr.phi(x); };
    double total = 0.0;

    // boundary scan: the four chart edges
    const int scan = 512;
    for (int edge = 0; edge < 4; ++edge) {
        auto path = [&](double tau) -> Eigen::Vector2d {
            Eigen::VectorXd u(2);
            switch (edge) {
                case 0: u << tau, 0.0; break;
                case 1: u << tau, 1.0; break;
                case 2: u << 0.0, tau; break;
                default: u << 1.0, tau; break;
            }
            return region.chart(u);
        };
        double prev_tau = 0.0, prev_val = phi(path(0.0));
        for (int i = 0; i <= scan; ++i) {
            double tau = static_cast<double>(i) / scan;
            double val = phi(path(tau));
            // a scan point can land on the fiber exactly; seed there directly
            bool exact = std::abs(val) <= kCorrTol;
            if (exact || prev_val * val < 0) {
                Eigen::Vector2d seed;
                bool have = exact ? (seed = path(tau), true)
                                  : bisect_root(path, phi, prev_tau, tau, seed);
                if (have && !tr.near_visited(seed, kStep)) {
                    // nudge the boundary seed inward before walking
                    Eigen::Vector2d inward = seed;
                    bool started = false;
                    for (double sign : {1.0, -1.0}) {
                        Eigen::Vector2d probe = seed + sign * kStep * tr.tangent(seed);
                        if (tr.correct(probe) && region.contains(probe)) {
                            total += tr.walk(probe, sign, nullptr) + (probe - seed).norm();
                            started = true;
                            break;
                        }
                        (void)inward;
                    }
                    if (!started) tr.visited.push_back(seed); // tangential boundary touch
                }
            }
            prev_tau = tau;
            prev_val = val;
        }
    }

    // interior scan lines catch closed loops that never meet the boundary
    const int lines = 33;
    for (int j = 0; j < lines; ++j) {
        double v = (j + 0.5) / lines;
        auto path = [&](double tau) -> Eigen::Vector2d {
            Eigen::VectorXd u(2);
            u << tau, v;
            return region.chart(u);
        };
        double prev_tau = 0.0, prev_val = phi(path(0.0));
        for (int i = 0; i <= scan; ++i) {
            double tau = static_cast<double>(i) / scan;
            double val = phi(path(tau));
            bool exact = std::abs(val) <= kCorrTol;
            if (exact || prev_val * val < 0) {
                Eigen::Vector2d seed;
                bool have = exact ? (seed = path(tau), true)
                                  : bisect_root(path, phi, prev_tau, tau, seed);
                if (have && !tr.near_visited(seed, 2.0 * kStep) && region.contains(seed)) {
                    bool closed = false;
                    double len = tr.walk(seed, 1.0, &closed);
                    if (!closed) len += tr.walk(seed, -1.0, nullptr); // boundary arc missed above
                    total += len;
                }
            }
            prev_tau = tau;
            prev_val = val;
        }
    }
    return total;
}

namespace {

// multi-start Newton count of {x in region : f(x) = y}, m = n
long count_preimages(const VectorMap& f, const CellDomain& region, const Eigen::VectorXd& y) {
    const int d = f.domain_dim;
    const int g = 8;
    long starts = 1;
    for (int a = 0; a < d; ++a) starts *= g;

    Eigen::VectorXd u(d), x(d), F(d);
    Eigen::MatrixXd chart_jac(d, d), J(d, d);
    std::vector<Eigen::VectorXd> roots;
    auto clamp01 = [&](Eigen::VectorXd& w) {
        for (int a = 0; a < d; ++a) w[a] = std::min(1.0, std::max(0.0, w[a]));
    };
    for (long s = 0; s < starts; ++s) {
        long idx = s;
        for (int a = 0; a < d; ++a) {
            u[a] = (static_cast<double>(idx % g) + 0.5) / g;
            idx /= g;
        }
        Eigen::VectorXd w = u;
        bool found = false;
        for (int iter = 0; iter < 40; ++iter) {
            region.chart_with_jacobian(w, x, chart_jac);
            F = f.eval(x) - y;
            if (F.norm() < 1e-11) {
                found = true;
                break;
            }
            J = f.jacobian(x) * chart_jac;
            Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
            if (!step.allFinite()) break;
            double t = 1.0;
            bool moved = false;
            double res = F.norm();
            while (t > 1.0 / 1024.0) {
                Eigen::VectorXd trial = w + t * step;
                clamp01(trial);
                double res_new = (f.eval(region.chart(trial)) - y).norm();
                if (std::isfinite(res_new) && res_new < res) {
                    w = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) break;
        }
        if (!found) continue;
        bool fresh = true;
        for (const auto& r : roots)
            if ((r - x).norm() <= 1e-6) {
                fresh = false;
                break;
            }
        if (fresh) roots.push_back(x);
    }
    return static_cast<long>(roots.size());
}

} // namespace

CheckResult coarea_check(const SliceSpec& spec, int grid) {
    const int m = spec.f.domain_dim, n = spec.f.codomain_dim;
    if (m < n) throw ValidationError("coarea_check: need m >= n");
    if (spec.region.ambient_dim() != m)
        throw ValidationError("coarea_check: region lives in the wrong dimension");
    if (!spec.slicer && m - n > 1)
        throw ValidationError("coarea_check: m - n >= 2 needs a slicer");
    if (!spec.slicer && m - n == 1 && m != 2)
        throw ValidationError("coarea_check: built-in fiber tracing covers plane regions only; "
                              "supply a slicer");

    CheckResult out;
    QuadOptions lopt;
    lopt.abs_tol = 1e-9;
    out.lhs = integrate_over_cell(
        spec.region,
        [&](const Eigen::VectorXd& x) {
            return jacobian_Je_matrix(spec.f.jacobian(x), n).value;
        },
        lopt)
                  .value;

    auto fiber = [&](const Eigen::VectorXd& y) -> double {
        try {
            if (spec.slicer) return hausdorff_measure(spec.slicer(y), m - n).value;
            if (m == n) return static_cast<double>(count_preimages(spec.f, spec.region, y));
            return trace_fiber_length(spec.f, spec.region, y[0]);
        } catch (const NumericalError&) {
            ++out.excluded; // Sard: critical values form a null set
            return 0.0;
        }
    };

    if (n == 1) {
        QuadOptions ropt;
        ropt.abs_tol = 1e-7;
        ropt.max_depth = 20;
        auto line = [&](double t) {
            Eigen::VectorXd y(1);
            y[0] = t;
            return fiber(y);
        };
        out.rhs = integrate_1d(line, 0.0, 1.0, ropt).value;
    } else {
        // composite Gauss-Legendre, grid panels per axis
        if (grid < 1) grid = 1;
        Eigen::VectorXi idx = Eigen::VectorXi::Zero(n);
        double acc = 0.0;
        for (;;) {
            Eigen::VectorXd lo(n), hi(n);
            for (int a = 0; a < n; ++a) {
                lo[a] = static_cast<double>(idx[a]) / grid;
                hi[a] = static_cast<double>(idx[a] + 1) / grid;
            }
            acc += tensor_gauss(fiber, lo, hi, 7);
            int a = 0;
            while (a < n && ++idx[a] == grid) idx[a++] = 0;
            if (a == n) break;
        }
        out.rhs = acc;
    }
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

CheckResult change_of_variables_check(const CovSpec& spec) {
    const int d = spec.f.domain_dim;
    if (spec.f.codomain_dim != d)
        throw ValidationError("change_of_variables_check: f must be a self-map of R^d");
    if (spec.g.domain_dim != d || spec.g.codomain_dim != 1)
        throw ValidationError("change_of_variables_check: g must be scalar on R^d");
    if (spec.domain.ambient_dim() != d)
        throw ValidationError("change_of_variables_check: domain dimension mismatch");
    if (spec.image.empty())
        throw ValidationError("change_of_variables_check: needs an authored image cover");

    QuadOptions opt;
    opt.abs_tol = 1e-9;
    CheckResult out;
    for (const auto& cell : spec.image) {
        if (cell.ambient_dim() != d)
            throw ValidationError("change_of_variables_check: image cell dimension mismatch");
        out.lhs += integrate_over_cell(
                       cell, [&](const Eigen::VectorXd& x) { return spec.g.eval(x)[0]; }, opt)
                       .value;
    }
    out.rhs = integrate_over_cell(
                  spec.domain,
                  [&](const Eigen::VectorXd& x) {
                      return std::abs(spec.f.jacobian(x).determinant()) *
                             spec.g.eval(spec.f.eval(x))[0];
                  },
                  opt)
                  .value;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

CheckResult fubini_check(const VectorMap& f, int n, int m) {
    if (f.domain_dim != n + m || f.codomain_dim != 1)
        throw ValidationError("fubini_check: f must be scalar on [0,1]^(n+m)");

    QuadOptions opt;
    opt.abs_tol = 1e-10;
    CheckResult out;
    auto scalar = [&](const Eigen::VectorXd& x) { return f.eval(x)[0]; };
    out.lhs = integrate_box(scalar, Eigen::VectorXd::Zero(n + m), Eigen::VectorXd::Ones(n + m), opt)
                  .value;

    QuadOptions inner_opt;
    inner_opt.abs_tol = 1e-11;
    auto inner = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd full(n + m);
        full.tail(m) = y;
        return integrate_box(
                   [&](const Eigen::VectorXd& x) {
                       full.head(n) = x;
                       return f.eval(full)[0];
                   },
                   Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n), inner_opt)
            .value;
    };
    out.rhs = integrate_box(inner, Eigen::VectorXd::Zero(m), Eigen::VectorXd::Ones(m), opt).value;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

// ----------------------------------------------------------- JSON documents

namespace {
nlohmann::json parse_doc(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}
} // namespace

CheckResult coarea_check_document(const std::string& text) {
    auto j = parse_doc(text, "coarea spec");
    try {
        int m = j.at("m").get<int>();
        int n = j.at("n").get<int>();
        SliceSpec spec;
        spec.f = VectorMap::parse(m, j.at("f").get<std::vector<std::string>>());
        if (spec.f.codomain_dim != n) throw ValidationError("coarea spec: f has wrong codomain");
        spec.region = parse_cell(j.at("region").dump());
        return coarea_check(spec, j.value("grid", 16));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("coarea spec: ") + e.what());
    }
}

CheckResult cov_check_document(const std::string& text) {
    auto j = parse_doc(text, "cov spec");
    try {
        int d = j.at("d").get<int>();
        CovSpec spec;
        spec.f = VectorMap::parse(d, j.at("f").get<std::vector<std::string>>());
        spec.g = VectorMap::parse(d, {j.at("g").get<std::string>()});
        spec.domain = parse_cell(j.at("domain").dump());
        for (const auto& cj : j.at("image")) spec.image.push_back(parse_cell(cj.dump()));
        return change_of_variables_check(spec);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("cov spec: ") + e.what());
    }
}

CheckResult fubini_check_document(const std::string& text) {
    auto j = parse_doc(text, "fubini spec");
    try {
        int n = j.at("n").get<int>();
        int m = j.at("m").get<int>();
        VectorMap f = VectorMap::parse(n + m, {j.at("f").get<std::string>()});
        return fubini_check(f, n, m);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("fubini spec: ") + e.what());
    }
}

} // namespace gmtk
