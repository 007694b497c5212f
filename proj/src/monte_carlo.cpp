#include "ssg/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ssg/errors.hpp"

namespace ssg {

namespace {

// Fixed block size: part of the estimator's definition, so results are
// reproducible across worker counts.
constexpr std::int64_t kBlockSize = 16384;

struct BlockPartial {
    double sum = 0.0;
    double sumsq = 0.0;
};

// Evaluates phi over n samples in fixed blocks; make_sampler(rng) returns a
// callable producing one phi value per call.
template <typename MakeSampler>
MCEstimate blockwise_estimate(std::int64_t n, std::uint64_t seed, MakeSampler&& make_sampler) {
    if (n < 100) throw std::invalid_argument("estimator needs n >= 100");
    const std::int64_t nblocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<BlockPartial> partials(static_cast<std::size_t>(nblocks));

    const int workers = std::min<std::int64_t>(worker_count(), nblocks);
    auto run_block = [&](std::int64_t b) {
        RngStream rng = RngStream::for_block(seed, static_cast<std::uint64_t>(b));
        auto sampler = make_sampler(rng);
        const std::int64_t lo = b * kBlockSize;
        const std::int64_t hi = std::min(n, lo + kBlockSize);
        BlockPartial p;
        for (std::int64_t i = lo; i < hi; ++i) {
            const double v = sampler();
            p.sum += v;
            p.sumsq += v * v;
        }
        partials[static_cast<std::size_t>(b)] = p;
    };

    if (workers <= 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::int64_t b = w; b < nblocks; b += workers) run_block(b);
            });
        for (auto& t : pool) t.join();
    }

    // Ordered reduction over block partials.
    double sum = 0.0, sumsq = 0.0;
    for (const auto& p : partials) {
        sum += p.sum;
        sumsq += p.sumsq;
    }
    MCEstimate est;
    est.n_samples = n;
    est.seed = seed;
    est.value = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(n) * est.value * est.value) /
                          static_cast<double>(n - 1));
    est.stderror = std::sqrt(var / static_cast<double>(n));
    return est;
}

void fill_gaussian(Eigen::VectorXd& g, RngStream& rng) {
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.gaussian();
}

}  // namespace

Eigen::VectorXd sample_sphere(int d, double a, RngStream& rng) {
    if (d < 1 || a <= 0.0) throw std::invalid_argument("sample_sphere needs d >= 1, a > 0");
    Eigen::VectorXd g(d + 1);
    double nrm = 0.0;
    do {
        fill_gaussian(g, rng);
        nrm = g.norm();
    } while (nrm == 0.0);
    return (a / nrm) * g;
}

Eigen::VectorXd sample_slice(const TruncatedSlice& S, RngStream& rng) {
    const auto free_dim = static_cast<Eigen::Index>(S.N()) - S.m();
    if (free_dim < 2) throw std::invalid_argument("sample_slice needs N - m >= 2");
    Eigen::VectorXd g(free_dim);
    double nrm = 0.0;
    do {
        fill_gaussian(g, rng);
        nrm = g.norm();
    } while (nrm == 0.0);
    return S.z0N() + (S.radius() / nrm) * S.apply_kernel(g);
}

MCEstimate estimate_slice_mean(const AffineConstraintSet& L, std::int64_t N,
                               const TestFunction& phi, std::int64_t n, std::uint64_t seed) {
    const TruncatedSlice S = truncated_slice(L, N);
    const int k = L.k();
    const auto free_dim = static_cast<Eigen::Index>(N) - S.m();

    // First k rows of the kernel basis, so each sample only needs the k
    // coordinates phi reads.
    Eigen::MatrixXd Kk(k, free_dim);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
        e[i] = 1.0;
        const Eigen::VectorXd row = S.apply_kernel_transpose(e);
        Kk.row(i) = row.transpose();
    }

    return blockwise_estimate(n, seed, [&](RngStream& rng) {
        return [&, g = Eigen::VectorXd(free_dim), xk = Eigen::VectorXd(k)]() mutable {
            double nrm = 0.0;
            do {
                fill_gaussian(g, rng);
                nrm = g.norm();
            } while (nrm == 0.0);
            xk.noalias() = S.mean_k() + (S.radius() / nrm) * (Kk * g);
            return phi(xk);
        };
    });
}

MCEstimate estimate_gaussian_mean(const GaussianLimit& G, const TestFunction& phi, std::int64_t n,
                                  std::uint64_t seed) {
    Eigen::LLT<Eigen::MatrixXd> llt(G.cov);
    if (llt.info() != Eigen::Success)
        throw NotTransversal("estimate_gaussian_mean: covariance not positive definite");
    const Eigen::MatrixXd A = llt.matrixL();
    const auto k = G.mean.size();

    return blockwise_estimate(n, seed, [&](RngStream& rng) {
        return [&, g = Eigen::VectorXd(k), x = Eigen::VectorXd(k)]() mutable {
            fill_gaussian(g, rng);
            x.noalias() = G.mean + A * g;
            return phi(x);
        };
    });
}

}  // namespace ssg
