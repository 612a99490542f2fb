#include "gmtk/scene.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gmtk/rng.hpp"

namespace gmtk {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- Patch

Patch Patch::graph(int n, int e, std::vector<int> permutation, CellDomain domain, VectorMap map,
                   std::optional<double> bound) {
    if (n < 1 || n > kMaxAmbientDim) throw ValidationError("ambient dimension out of range");
    if (e < 1 || e > n) throw ValidationError("intrinsic dimension out of range");
    if (!domain.is_open() || domain.dim() != e)
        throw ValidationError("graph patch domain must be an open e-cell");
    if (map.domain_dim != e || map.codomain_dim != n - e)
        throw ValidationError("graph patch map must be R^e -> R^(n-e)");
    if (permutation.empty()) {
        permutation.resize(n);
        for (int i = 0; i < n; ++i) permutation[i] = i;
    }
    std::vector<bool> seen(n, false);
    if (static_cast<int>(permutation.size()) != n) throw ValidationError("permutation has wrong length");
    for (int v : permutation) {
        if (v < 0 || v >= n || seen[v]) throw ValidationError("invalid permutation");
        seen[v] = true;
    }
    Patch p;
    p.kind = Kind::Graph;
    p.n = n;
    p.e = e;
    p.permutation = std::move(permutation);
    p.domain = std::move(domain);
    p.map = std::move(map);
    p.bound = bound;
    p.box_lo = Eigen::VectorXd::Zero(e);
    p.box_hi = Eigen::VectorXd::Ones(e);
    return p;
}

Patch Patch::parametric(int n, int e, CellDomain domain, VectorMap map,
                        std::optional<double> bound, bool injective) {
    if (n < 1 || n > kMaxAmbientDim) throw ValidationError("ambient dimension out of range");
    if (e < 1 || e > n) throw ValidationError("intrinsic dimension out of range");
    if (!domain.is_open() || domain.dim() != e)
        throw ValidationError("parametric patch domain must be an open e-cell");
    if (map.domain_dim != e || map.codomain_dim != n)
        throw ValidationError("parametric patch map must be R^e -> R^n");
    Patch p;
    p.kind = Kind::Parametric;
    p.n = n;
    p.e = e;
    p.domain = std::move(domain);
    p.map = std::move(map);
    p.bound = bound;
    p.injective_attested = injective;
    p.box_lo = Eigen::VectorXd::Zero(e);
    p.box_hi = Eigen::VectorXd::Ones(e);
    return p;
}

Patch Patch::point(const Eigen::VectorXd& at) {
    if (at.size() < 1 || at.size() > kMaxAmbientDim)
        throw ValidationError("point patch dimension out of range");
    Patch p;
    p.kind = Kind::Point;
    p.n = static_cast<int>(at.size());
    p.e = 0;
    p.at = at;
    return p;
}

void Patch::eval_with_jacobian(const Eigen::VectorXd& u, Eigen::VectorXd& out,
                               Eigen::MatrixXd& jac) const {
    if (kind == Kind::Point) {
        out = at;
        jac = Eigen::MatrixXd::Zero(n, 0);
    } else {
        Eigen::VectorXd x;
        Eigen::MatrixXd jc;
        domain.chart_with_jacobian(u, x, jc);
        if (kind == Kind::Parametric) {
            Eigen::VectorXd v;
            Eigen::MatrixXd jm;
            map.eval_with_jacobian(x, v, jm);
            out = v;
            jac = jm * jc;
        } else {
            Eigen::VectorXd fv;
            Eigen::MatrixXd jf;
            if (map.codomain_dim > 0)
                map.eval_with_jacobian(x, fv, jf);
            else {
                fv.resize(0);
                jf.resize(0, e);
            }
            out.resize(n);
            jac.resize(n, e);
            for (int j = 0; j < e; ++j) {
                out[permutation[j]] = x[j];
                jac.row(permutation[j]) = jc.row(j);
            }
            Eigen::MatrixXd jfc = jf * jc;
            for (int j = e; j < n; ++j) {
                out[permutation[j]] = fv[j - e];
                jac.row(permutation[j]) = jfc.row(j - e);
            }
        }
    }
    if (post_linear) {
        out = (*post_linear) * out;
        jac = (*post_linear) * jac;
    }
    if (post_offset) out += *post_offset;
}

Eigen::VectorXd Patch::eval(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out;
    Eigen::MatrixXd jac;
    eval_with_jacobian(u, out, jac);
    return out;
}

Eigen::MatrixXd Patch::jacobian(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out;
    Eigen::MatrixXd jac;
    eval_with_jacobian(u, out, jac);
    return jac;
}

Patch Patch::restricted(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) const {
    Patch p = *this;
    p.box_lo = lo;
    p.box_hi = hi;
    return p;
}

LinearSubspace tangent_space(const Patch& p, const Eigen::VectorXd& u) {
    if (p.kind == Patch::Kind::Point) throw ValidationError("tangent_space: point patch");
    Eigen::MatrixXd jac = p.jacobian(u);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] < 1e-10 * std::max(1.0, sv[0]))
        throw NumericalError("tangent_space: rank-deficient derivative (non-immersion point)");
    return LinearSubspace::from_orthonormal(svd.matrixU());
}

// ---------------------------------------------------------------- Scene

double Scene::bbox_circumradius() const {
    double r2 = 0.0;
    for (int mask = 0; mask < (1 << ambient_dim); ++mask) {
        Eigen::VectorXd corner(ambient_dim);
        for (int a = 0; a < ambient_dim; ++a)
            corner[a] = (mask >> a) & 1 ? bbox_hi[a] : bbox_lo[a];
        r2 = std::max(r2, corner.squaredNorm());
    }
    return std::sqrt(r2);
}

void refresh_bounding_box(Scene& s) {
    const int n = s.ambient_dim;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    Eigen::VectorXd hi = -lo;
    auto absorb = [&](const Eigen::VectorXd& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    };
    for (const auto& p : s.patches) {
        if (p.kind == Patch::Kind::Point) {
            Eigen::VectorXd q = p.at;
            if (p.post_linear) q = (*p.post_linear) * q;
            if (p.post_offset) q += *p.post_offset;
            absorb(q);
            continue;
        }
        Halton hal(p.e);
        for (int i = 0; i < 256; ++i) {
            Eigen::VectorXd u = p.box_lo.array() +
                                (p.box_hi - p.box_lo).array() * hal.next().array();
            absorb(p.eval(u));
        }
        // push samples toward the box corners as well
        for (int mask = 0; mask < (1 << p.e); ++mask) {
            Eigen::VectorXd u(p.e);
            for (int a = 0; a < p.e; ++a)
                u[a] = (mask >> a) & 1 ? p.box_lo[a] + 0.999 * (p.box_hi[a] - p.box_lo[a])
                                       : p.box_lo[a] + 0.001 * (p.box_hi[a] - p.box_lo[a]);
            absorb(p.eval(u));
        }
    }
    if (s.patches.empty()) {
        lo = Eigen::VectorXd::Zero(n);
        hi = Eigen::VectorXd::Zero(n);
    }
    double pad = 0.01 * (hi - lo).norm() + 1e-9;
    s.bbox_lo = lo.array() - pad;
    s.bbox_hi = hi.array() + pad;
}

// ----------------------------------------------------------- validation

namespace {

std::string vec_str(const Eigen::VectorXd& v) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ")";
    return os.str();
}

// checks g < h on every band level of the chart at sampled parameters
void check_band_positivity(const CellDomain& cell, const Eigen::VectorXd& u) {
    if (cell.kind() == CellDomain::Kind::Interval) return;
    check_band_positivity(cell.base(), u.head(cell.dim() - 1));
    Eigen::VectorXd xb = cell.base().chart(u.head(cell.dim() - 1));
    double gv = cell.g().eval(xb)[0], hv = cell.h().eval(xb)[0];
    if (!(gv < hv))
        throw ValidationError("empty band: g >= h at base point " + vec_str(xb) +
                              " (g=" + std::to_string(gv) + ", h=" + std::to_string(hv) + ")");
}

double operator_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

void validate_patch(const Patch& p, int sample_count = 1000) {
    if (p.kind == Patch::Kind::Point) return;
    Halton hal(p.e);
    for (int i = 0; i < sample_count; ++i) {
        Eigen::VectorXd u = p.box_lo.array() + (p.box_hi - p.box_lo).array() * hal.next().array();
        check_band_positivity(p.domain, u);
        Eigen::VectorXd x = p.domain.chart(u);
        if (p.bound) {
            Eigen::MatrixXd jm = p.map.jacobian(x);
            double nrm = operator_norm(jm);
            if (nrm > *p.bound * (1.0 + 1e-9) + 1e-12)
                throw ValidationError("derivative bound violation: |Df| = " + std::to_string(nrm) +
                                      " > " + std::to_string(*p.bound) + " at " + vec_str(x));
        }
        if (p.kind == Patch::Kind::Parametric) {
            Eigen::MatrixXd jac = p.map.jacobian(x);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
            const auto& sv = svd.singularValues();
            if (sv[sv.size() - 1] <= 1e-12 * std::max(1.0, sv[0]))
                throw ValidationError("parametric patch is not an immersion at " + vec_str(x));
        }
    }
}

// ------------------------------------------------------------- JSON I/O

CellDomain cell_from_json(const json& j) {
    if (j.contains("point")) return CellDomain::point(j.at("point").get<double>());
    if (j.contains("interval")) {
        auto iv = j.at("interval");
        return CellDomain::interval(iv.at(0).get<double>(), iv.at(1).get<double>());
    }
    if (j.contains("graph_ext")) {
        const auto& ge = j.at("graph_ext");
        CellDomain base = cell_from_json(ge.at("base"));
        auto f = VectorMap::parse(base.ambient_dim(), {ge.at("f").get<std::string>()});
        double bound = ge.value("bound", std::numeric_limits<double>::quiet_NaN());
        return CellDomain::graph_ext(std::move(base), std::move(f), bound);
    }
    if (j.contains("band_ext")) {
        const auto& be = j.at("band_ext");
        CellDomain base = cell_from_json(be.at("base"));
        auto g = VectorMap::parse(base.ambient_dim(), {be.at("g").get<std::string>()});
        auto h = VectorMap::parse(base.ambient_dim(), {be.at("h").get<std::string>()});
        double bound = be.value("bound", std::numeric_limits<double>::quiet_NaN());
        return CellDomain::band_ext(std::move(base), std::move(g), std::move(h), bound);
    }
    throw ParseError("cell node must contain one of point/interval/graph_ext/band_ext");
}

json cell_to_json(const CellDomain& c) {
    json j;
    switch (c.kind()) {
        case CellDomain::Kind::Point: j["point"] = c.point_value(); break;
        case CellDomain::Kind::Interval:
            j["interval"] = {c.interval_lo(), c.interval_hi()};
            break;
        case CellDomain::Kind::GraphExt:
            j["graph_ext"] = {{"base", cell_to_json(c.base())}, {"f", c.f().to_strings()[0]}};
            if (std::isfinite(c.bound())) j["graph_ext"]["bound"] = c.bound();
            break;
        case CellDomain::Kind::BandExt:
            j["band_ext"] = {{"base", cell_to_json(c.base())},
                             {"g", c.g().to_strings()[0]},
                             {"h", c.h().to_strings()[0]}};
            if (std::isfinite(c.bound())) j["band_ext"]["bound"] = c.bound();
            break;
    }
    return j;
}

Patch patch_from_json(const json& j, int n) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "point") {
        std::vector<double> at = j.at("at").get<std::vector<double>>();
        return Patch::point(Eigen::Map<Eigen::VectorXd>(at.data(), at.size()));
    }
    int e = j.at("e").get<int>();
    CellDomain domain = cell_from_json(j.at("domain"));
    std::vector<std::string> map_texts = j.value("map", std::vector<std::string>{});
    std::optional<double> bound;
    if (j.contains("bound")) bound = j.at("bound").get<double>();

    Patch p;
    if (kind == "graph") {
        std::vector<int> perm = j.value("permutation", std::vector<int>{});
        p = Patch::graph(n, e, std::move(perm), std::move(domain),
                         VectorMap::parse(e, map_texts, bound), bound);
    } else if (kind == "parametric") {
        bool inj = j.value("injective", true);
        p = Patch::parametric(n, e, std::move(domain), VectorMap::parse(e, map_texts, bound), bound,
                              inj);
    } else {
        throw ParseError("unknown patch kind '" + kind + "'");
    }

    if (j.contains("param_box")) {
        auto lo = j.at("param_box").at(0).get<std::vector<double>>();
        auto hi = j.at("param_box").at(1).get<std::vector<double>>();
        if (static_cast<int>(lo.size()) != e || static_cast<int>(hi.size()) != e)
            throw ParseError("param_box has wrong dimension");
        p.box_lo = Eigen::Map<Eigen::VectorXd>(lo.data(), e);
        p.box_hi = Eigen::Map<Eigen::VectorXd>(hi.data(), e);
    }
    if (j.contains("rotation")) {
        auto rows = j.at("rotation").get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd rot(n, n);
        if (static_cast<int>(rows.size()) != n) throw ParseError("rotation has wrong shape");
        for (int r = 0; r < n; ++r) {
            if (static_cast<int>(rows[r].size()) != n) throw ParseError("rotation has wrong shape");
            for (int c = 0; c < n; ++c) rot(r, c) = rows[r][c];
        }
        p.post_linear = rot;
    }
    if (j.contains("offset")) {
        auto off = j.at("offset").get<std::vector<double>>();
        if (static_cast<int>(off.size()) != n) throw ParseError("offset has wrong dimension");
        p.post_offset = Eigen::Map<Eigen::VectorXd>(off.data(), n);
    }
    p.unverified = j.value("unverified", false);
    p.graph_over_first_e = j.value("graph_over_first_e", false);
    return p;
}

json patch_to_json(const Patch& p) {
    json j;
    switch (p.kind) {
        case Patch::Kind::Point: {
            j["kind"] = "point";
            j["at"] = std::vector<double>(p.at.data(), p.at.data() + p.at.size());
            return j;
        }
        case Patch::Kind::Graph: {
            j["kind"] = "graph";
            j["e"] = p.e;
            j["permutation"] = p.permutation;
            j["domain"] = cell_to_json(p.domain);
            j["map"] = p.map.to_strings();
            break;
        }
        case Patch::Kind::Parametric: {
            j["kind"] = "parametric";
            j["e"] = p.e;
            j["domain"] = cell_to_json(p.domain);
            j["map"] = p.map.to_strings();
            j["injective"] = p.injective_attested;
            break;
        }
    }
    if (p.bound) j["bound"] = *p.bound;
    bool whole_box = (p.box_lo.array() == 0.0).all() && (p.box_hi.array() == 1.0).all();
    if (!whole_box) {
        j["param_box"] = {std::vector<double>(p.box_lo.data(), p.box_lo.data() + p.e),
                          std::vector<double>(p.box_hi.data(), p.box_hi.data() + p.e)};
    }
    if (p.post_linear) {
        std::vector<std::vector<double>> rows(p.n, std::vector<double>(p.n));
        for (int r = 0; r < p.n; ++r)
            for (int c = 0; c < p.n; ++c) rows[r][c] = (*p.post_linear)(r, c);
        j["rotation"] = rows;
    }
    if (p.post_offset)
        j["offset"] = std::vector<double>(p.post_offset->data(), p.post_offset->data() + p.n);
    if (p.unverified) j["unverified"] = true;
    if (p.graph_over_first_e) j["graph_over_first_e"] = true;
    return j;
}

} // namespace

Scene parse_scene(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scene document: ") + e.what());
    }
    Scene s;
    try {
        s.ambient_dim = j.at("ambient_dim").get<int>();
        if (s.ambient_dim < 1 || s.ambient_dim > kMaxAmbientDim)
            throw ValidationError("ambient_dim out of range (cap " +
                                  std::to_string(kMaxAmbientDim) + ")");
        for (const auto& pj : j.at("patches")) s.patches.push_back(patch_from_json(pj, s.ambient_dim));
        s.partitioned = j.value("partitioned", false);
        if (j.contains("kinks")) {
            for (const auto& kj : j.at("kinks")) {
                KinkSpec k;
                k.patch = kj.at("patch").get<int>();
                k.axis = kj.value("axis", 0);
                k.values = kj.at("values").get<std::vector<double>>();
                if (k.patch < 0 || k.patch >= static_cast<int>(s.patches.size()))
                    throw ValidationError("kink spec references missing patch");
                s.kinks.push_back(std::move(k));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene document: ") + e.what());
    }
    for (const auto& p : s.patches) validate_patch(p);
    refresh_bounding_box(s);
    return s;
}

std::string serialize_scene(const Scene& s) {
    json j;
    j["ambient_dim"] = s.ambient_dim;
    if (s.partitioned) j["partitioned"] = true;
    j["patches"] = json::array();
    for (const auto& p : s.patches) j["patches"].push_back(patch_to_json(p));
    if (!s.kinks.empty()) {
        j["kinks"] = json::array();
        for (const auto& k : s.kinks)
            j["kinks"].push_back({{"patch", k.patch}, {"axis", k.axis}, {"values", k.values}});
    }
    return j.dump(2) + "\n";
}

CellDomain parse_cell(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("cell document: ") + e.what());
    }
    try {
        return cell_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("cell document: ") + e.what());
    }
}

std::string serialize_cell(const CellDomain& c) {
    return cell_to_json(c).dump(2) + "\n";
}

} // namespace gmtk
