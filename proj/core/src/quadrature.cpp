#include "gmtk/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "gmtk/errors.hpp"

namespace gmtk {

void gauss_legendre_unit(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) {
        // Newton iteration on Legendre P_n over [-1,1], then map to [0,1]
        std::vector<double> xs(order), ws(order);
        for (int i = 0; i < order; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= order; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = order * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = order * (x * p1 - p0) / (x * x - 1.0);
            xs[i] = 0.5 * (x + 1.0);
            ws[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        it = cache.emplace(order, std::make_pair(std::move(xs), std::move(ws))).first;
    }
    nodes = it->second.first;
    weights = it->second.second;
}

namespace {

struct TensorRule {
    std::vector<double> nodes, weights;

    explicit TensorRule(int order) { gauss_legendre_unit(order, nodes, weights); }

    double apply(const std::function<double(const Eigen::VectorXd&)>& fn,
                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, long& evals) const {
        const int d = static_cast<int>(lo.size());
        const int np = static_cast<int>(nodes.size());
        Eigen::VectorXd x(d);
        double vol = 1.0;
        for (int a = 0; a < d; ++a) vol *= hi[a] - lo[a];
        if (vol == 0.0) return 0.0;

        // odometer over the tensor grid
        std::vector<int> idx(d, 0);
        double sum = 0.0;
        for (;;) {
            double w = 1.0;
            for (int a = 0; a < d; ++a) {
                x[a] = lo[a] + (hi[a] - lo[a]) * nodes[idx[a]];
                w *= weights[idx[a]];
            }
            sum += w * fn(x);
            ++evals;
            int a = 0;
            while (a < d && ++idx[a] == np) idx[a++] = 0;
            if (a == d) break;
        }
        return sum * vol;
    }
};

struct Adaptor {
    const std::function<double(const Eigen::VectorXd&)>& fn;
    const TensorRule& rule;
    int max_depth;
    QuadResult result;

    void recurse(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double parent_est,
                 double tol, int depth) {
        const int d = static_cast<int>(lo.size());
        // try bisecting each axis; keep the split that changes the estimate most
        int best_axis = 0;
        double best_diff = -1.0, best_left = 0.0, best_right = 0.0;
        for (int a = 0; a < d; ++a) {
            double mid = 0.5 * (lo[a] + hi[a]);
            Eigen::VectorXd hi1 = hi, lo2 = lo;
            hi1[a] = mid;
            lo2[a] = mid;
            double left = rule.apply(fn, lo, hi1, result.evaluations);
            double right = rule.apply(fn, lo2, hi, result.evaluations);
            double diff = std::abs(left + right - parent_est);
            if (diff > best_diff) {
                best_diff = diff;
                best_axis = a;
                best_left = left;
                best_right = right;
            }
        }
        if (best_diff <= tol || depth >= max_depth) {
            result.value += best_left + best_right;
            result.error += best_diff;
            if (best_diff > tol) result.converged = false;
            return;
        }
        double mid = 0.5 * (lo[best_axis] + hi[best_axis]);
        Eigen::VectorXd hi1 = hi, lo2 = lo;
        hi1[best_axis] = mid;
        lo2[best_axis] = mid;
        recurse(lo, hi1, best_left, 0.5 * tol, depth + 1);
        recurse(lo2, hi, best_right, 0.5 * tol, depth + 1);
    }
};

} // namespace

QuadResult integrate_box(const std::function<double(const Eigen::VectorXd&)>& fn,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         const QuadOptions& opt) {
    if (lo.size() != hi.size() || lo.size() == 0)
        throw ValidationError("integrate_box: bad box dimensions");
    int order = lo.size() > 2 ? std::min(opt.order, 7) : opt.order;
    TensorRule rule(order);
    Adaptor ad{fn, rule, opt.max_depth, {}};
    double top = rule.apply(fn, lo, hi, ad.result.evaluations);
    ad.recurse(lo, hi, top, opt.abs_tol, 0);
    return ad.result;
}

QuadResult integrate_1d(const std::function<double(double)>& fn, double a, double b,
                        const QuadOptions& opt) {
    Eigen::VectorXd lo(1), hi(1);
    lo[0] = a;
    hi[0] = b;
    return integrate_box([&fn](const Eigen::VectorXd& x) { return fn(x[0]); }, lo, hi, opt);
}

double tensor_gauss(const std::function<double(const Eigen::VectorXd&)>& fn,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int order) {
    TensorRule rule(order);
    long evals = 0;
    return rule.apply(fn, lo, hi, evals);
}

} // namespace gmtk
