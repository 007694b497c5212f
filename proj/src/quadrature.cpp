#include "ssg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

#include "ssg/errors.hpp"

namespace ssg {

namespace {

using Fn = std::function<double(const Eigen::VectorXd&)>;

// ---- Gauss-Kronrod 15(7) ---------------------------------------------------

constexpr double kGK15Nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0,
};
constexpr double kGK15Weights[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
};
constexpr double kG7Weights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
};

struct Interval {
    double a, b, value, error;
};

void gk15(const Fn& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Eigen::VectorXd x(1);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double off = h * kGK15Nodes[i];
        x[0] = c - off;
        double fv = f(x);
        if (i != 7) {
            x[0] = c + off;
            fv += f(x);
        }
        resk += kGK15Weights[i] * fv;
        if (i % 2 == 1) resg += kG7Weights[i / 2] * fv;
    }
    value = resk * h;
    error = std::abs((resk - resg) * h);
}

CubatureResult adaptive_gk(const Fn& f, double a, double b, double tol, std::size_t max_regions) {
    auto worse = [](const Interval& p, const Interval& q) { return p.error < q.error; };
    std::priority_queue<Interval, std::vector<Interval>, decltype(worse)> heap(worse);

    CubatureResult res;
    Interval root{a, b, 0.0, 0.0};
    gk15(f, a, b, root.value, root.error);
    res.evals = 15;
    heap.push(root);
    double err_total = root.error;

    std::vector<Interval> done;
    while (err_total > tol) {
        if (heap.size() + done.size() >= max_regions || heap.empty())
            throw ToleranceNotReached("1-d refinement budget exhausted, error " +
                                      std::to_string(err_total));
        Interval worst = heap.top();
        heap.pop();
        err_total -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        for (const auto& piece : {std::pair{worst.a, mid}, std::pair{mid, worst.b}}) {
            Interval part{piece.first, piece.second, 0.0, 0.0};
            gk15(f, part.a, part.b, part.value, part.error);
            res.evals += 15;
            err_total += part.error;
            // Park intervals that can no longer be refined in doubles.
            if (part.b - part.a <= 8.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::abs(part.a), std::abs(part.b)))
                done.push_back(part);
            else
                heap.push(part);
        }
    }
    while (!heap.empty()) {
        done.push_back(heap.top());
        heap.pop();
    }
    double total = 0.0;
    for (const auto& iv : done) total += iv.value;
    res.value = total;
    res.error = err_total;
    return res;
}

// ---- Genz-Malik 7(5) for k in {2, 3} ---------------------------------------

constexpr double kLambda2 = 0.3585685828003181;  // sqrt(9/70)
constexpr double kLambda4 = 0.9486832980505138;  // sqrt(9/10)
constexpr double kLambda5 = 0.6882472016116853;  // sqrt(9/19)

struct Region {
    Eigen::VectorXd center;
    Eigen::VectorXd half;
    double value = 0.0;
    double error = 0.0;
    int split_dim = 0;
};

struct GMRule {
    int dim;
    double w1, w2, w3, w4, w5;
    double e1, e2, e3, e4;
    double ratio;
    std::size_t points;

    explicit GMRule(int k) : dim(k) {
        const double D = k;
        w1 = (12824.0 - 9120.0 * D + 400.0 * D * D) / 19683.0;
        w2 = 980.0 / 6561.0;
        w3 = (1820.0 - 400.0 * D) / 19683.0;
        w4 = 200.0 / 19683.0;
        w5 = (6859.0 / 19683.0) / static_cast<double>(1 << k);
        e1 = (729.0 - 950.0 * D + 50.0 * D * D) / 729.0;
        e2 = 245.0 / 486.0;
        e3 = (265.0 - 100.0 * D) / 1458.0;
        e4 = 25.0 / 729.0;
        ratio = (kLambda2 * kLambda2) / (kLambda4 * kLambda4);
        points = 1 + 4 * static_cast<std::size_t>(k) +
                 2 * static_cast<std::size_t>(k) * (static_cast<std::size_t>(k) - 1) +
                 (std::size_t{1} << k);
    }

    void apply(const Fn& f, Region& r) const {
        const int k = dim;
        Eigen::VectorXd x = r.center;
        const double f0 = f(x);

        double sum2 = 0.0, sum3 = 0.0, sum4 = 0.0, sum5 = 0.0;
        double best_diff = -1.0;
        int best_dim = 0;
        for (int d = 0; d < k; ++d) {
            const double h2 = kLambda2 * r.half[d];
            const double h4 = kLambda4 * r.half[d];
            x = r.center;
            x[d] = r.center[d] - h2;
            const double v0 = f(x);
            x[d] = r.center[d] + h2;
            const double v1 = f(x);
            x[d] = r.center[d] - h4;
            const double v2 = f(x);
            x[d] = r.center[d] + h4;
            const double v3 = f(x);
            sum2 += v0 + v1;
            sum3 += v2 + v3;
            const double diff = std::abs(v0 + v1 - 2.0 * f0 - ratio * (v2 + v3 - 2.0 * f0));
            if (diff > best_diff) {
                best_diff = diff;
                best_dim = d;
            }
        }
        for (int d1 = 0; d1 < k; ++d1)
            for (int d2 = d1 + 1; d2 < k; ++d2)
                for (int s1 = -1; s1 <= 1; s1 += 2)
                    for (int s2 = -1; s2 <= 1; s2 += 2) {
                        x = r.center;
                        x[d1] += s1 * kLambda4 * r.half[d1];
                        x[d2] += s2 * kLambda4 * r.half[d2];
                        sum4 += f(x);
                    }
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            x = r.center;
            for (int d = 0; d < k; ++d)
                x[d] += ((mask >> d) & 1u ? 1.0 : -1.0) * kLambda5 * r.half[d];
            sum5 += f(x);
        }

        double vol = 1.0;
        for (int d = 0; d < k; ++d) vol *= 2.0 * r.half[d];
        const double res7 = vol * (w1 * f0 + w2 * sum2 + w3 * sum3 + w4 * sum4 + w5 * sum5);
        const double res5 = vol * (e1 * f0 + e2 * sum2 + e3 * sum3 + e4 * sum4);
        r.value = res7;
        r.error = std::abs(res7 - res5);
        r.split_dim = best_dim;
    }
};

CubatureResult adaptive_genz_malik(const Fn& f, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi, double tol,
                                   std::size_t max_regions) {
    const int k = static_cast<int>(lo.size());
    const GMRule rule(k);

    auto worse = [](const Region& p, const Region& q) { return p.error < q.error; };
    std::priority_queue<Region, std::vector<Region>, decltype(worse)> heap(worse);

    CubatureResult res;
    Region root;
    root.center = 0.5 * (lo + hi);
    root.half = 0.5 * (hi - lo);
    rule.apply(f, root);
    res.evals = rule.points;
    double err_total = root.error;
    heap.push(std::move(root));

    std::vector<Region> done;
    while (err_total > tol) {
        if (heap.size() + done.size() >= max_regions || heap.empty())
            throw ToleranceNotReached("cubature refinement budget exhausted, error " +
                                      std::to_string(err_total));
        Region worst = heap.top();
        heap.pop();
        err_total -= worst.error;
        const int d = worst.split_dim;
        for (int side = -1; side <= 1; side += 2) {
            Region part;
            part.half = worst.half;
            part.half[d] *= 0.5;
            part.center = worst.center;
            part.center[d] += side * part.half[d];
            rule.apply(f, part);
            res.evals += rule.points;
            err_total += part.error;
            if (part.half[d] <= 4.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(1.0, std::abs(part.center[d])))
                done.push_back(std::move(part));
            else
                heap.push(std::move(part));
        }
    }
    while (!heap.empty()) {
        done.push_back(heap.top());
        heap.pop();
    }
    double total = 0.0;
    for (const auto& r : done) total += r.value;
    res.value = total;
    res.error = err_total;
    return res;
}

}  // namespace

CubatureResult integrate_box(const Fn& f, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             double tol, std::size_t max_regions) {
    const auto k = lo.size();
    if (k < 1 || k > 3) throw std::invalid_argument("integrate_box supports k in {1, 2, 3}");
    if (hi.size() != k) throw std::invalid_argument("integrate_box: lo/hi size mismatch");
    for (Eigen::Index i = 0; i < k; ++i)
        if (!(lo[i] < hi[i])) return CubatureResult{0.0, 0.0, 0};
    if (k == 1) return adaptive_gk(f, lo[0], hi[0], tol, max_regions);
    return adaptive_genz_malik(f, lo, hi, tol, max_regions);
}

double integrate_muN(const SliceDensity& D, const TestFunction& phi, double tol) {
    const int k = D.k();
    if (k > 3) throw std::invalid_argument("integrate_muN supports k <= 3");

    Eigen::VectorXd lo(k), hi(k);
    for (int i = 0; i < k; ++i) {
        lo[i] = D.mean_k()[i] - D.box_half_width(i);
        hi[i] = D.mean_k()[i] + D.box_half_width(i);
    }

    if (phi.kind() == TestFunction::Kind::BoxIndicator) {
        for (int i = 0; i < k; ++i) {
            lo[i] = std::max(lo[i], phi.vec_a()[i]);
            hi[i] = std::min(hi[i], phi.vec_b()[i]);
            if (lo[i] >= hi[i]) return 0.0;
        }
        return integrate_box([&](const Eigen::VectorXd& x) { return density_muN(D, x); }, lo, hi,
                             tol)
            .value;
    }
    return integrate_box(
               [&](const Eigen::VectorXd& x) { return phi(x) * density_muN(D, x); }, lo, hi, tol)
        .value;
}

double integrate_muInf(const GaussianLimit& G, const TestFunction& phi, double tol) {
    const int k = static_cast<int>(G.mean.size());
    if (k > 3) throw std::invalid_argument("integrate_muInf supports k <= 3");

    Eigen::LLT<Eigen::MatrixXd> llt(G.cov);
    if (llt.info() != Eigen::Success)
        throw NotTransversal("integrate_muInf: covariance not positive definite");
    const Eigen::MatrixXd A = llt.matrixL();

    Eigen::VectorXd lo = Eigen::VectorXd::Constant(k, -10.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(k, 10.0);

    const double lognorm = -0.5 * k * std::log(2.0 * std::numbers::pi);
    const bool diag = G.cov.isDiagonal(0.0);

    if (phi.kind() == TestFunction::Kind::BoxIndicator && diag) {
        // Diagonal whitening keeps the box a box; fold it into the domain.
        for (int i = 0; i < k; ++i) {
            const double sigma = A(i, i);
            lo[i] = std::max(lo[i], (phi.vec_a()[i] - G.mean[i]) / sigma);
            hi[i] = std::min(hi[i], (phi.vec_b()[i] - G.mean[i]) / sigma);
            if (lo[i] >= hi[i]) return 0.0;
        }
        return integrate_box(
                   [&](const Eigen::VectorXd& y) {
                       return std::exp(lognorm - 0.5 * y.squaredNorm());
                   },
                   lo, hi, tol)
            .value;
    }

    return integrate_box(
               [&](const Eigen::VectorXd& y) {
                   const Eigen::VectorXd x = G.mean + A * y;
                   return phi(x) * std::exp(lognorm - 0.5 * y.squaredNorm());
               },
               lo, hi, tol)
        .value;
}

}  // namespace ssg
