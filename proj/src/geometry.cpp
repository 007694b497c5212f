#include "ssg/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ssg/errors.hpp"

namespace ssg {

namespace {

// Truncated directions as l2 vectors (exact; identity at N == kInfiniteDim).
std::vector<L2Vector> truncated_directions(const AffineConstraintSet& L, std::int64_t N) {
    std::vector<L2Vector> out;
    out.reserve(static_cast<std::size_t>(L.m()));
    for (int a = 0; a < L.m(); ++a) out.push_back(L.direction_l2(a).truncated(N));
    return out;
}

Eigen::MatrixXd gram_of(const std::vector<L2Vector>& vs) {
    const auto m = static_cast<Eigen::Index>(vs.size());
    Eigen::MatrixXd G(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = a; b < m; ++b) {
            G(a, b) = inner(vs[static_cast<std::size_t>(a)], vs[static_cast<std::size_t>(b)]);
            G(b, a) = G(a, b);
        }
    return G;
}

// SPD solve guarded by the eigenvalue threshold of the design ledger.
Eigen::VectorXd guarded_spd_solve(const Eigen::MatrixXd& G, const Eigen::VectorXd& rhs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    const double max_diag = G.diagonal().maxCoeff();
    if (max_diag <= 0.0 || eig.eigenvalues().minCoeff() < kGramRelTol * max_diag)
        throw SingularGram("truncated directions dependent: min Gram eigenvalue " +
                           std::to_string(eig.eigenvalues().minCoeff()));
    return eig.eigenvectors() *
           (eig.eigenvalues().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * rhs));
}

Eigen::MatrixXd guarded_spd_solve(const Eigen::MatrixXd& G, const Eigen::MatrixXd& rhs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    const double max_diag = G.diagonal().maxCoeff();
    if (max_diag <= 0.0 || eig.eigenvalues().minCoeff() < kGramRelTol * max_diag)
        throw SingularGram("truncated directions dependent: min Gram eigenvalue " +
                           std::to_string(eig.eigenvalues().minCoeff()));
    return eig.eigenvectors() *
           (eig.eigenvalues().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * rhs));
}

void require_min_ambient(const AffineConstraintSet& L, std::int64_t N, std::int64_t min_over) {
    if (N != kInfiniteDim && N < L.m() + min_over)
        throw std::invalid_argument("ambient dimension N too small: N=" + std::to_string(N));
}

}  // namespace

Eigen::MatrixXd truncated_gram(const AffineConstraintSet& L, std::int64_t N) {
    return gram_of(truncated_directions(L, N));
}

bool directions_independent(const AffineConstraintSet& L, std::int64_t N) {
    const Eigen::MatrixXd G = truncated_gram(L, N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    const double max_diag = G.diagonal().maxCoeff();
    if (max_diag <= 0.0) return false;
    return eig.eigenvalues().minCoeff() >= kGramRelTol * max_diag;
}

L2Vector closest_point(const AffineConstraintSet& L, std::int64_t N) {
    const auto ws = truncated_directions(L, N);
    const Eigen::MatrixXd G = gram_of(ws);
    const Eigen::VectorXd p =
        Eigen::Map<const Eigen::VectorXd>(L.offsets().data(), static_cast<Eigen::Index>(L.m()));
    const Eigen::VectorXd beta = guarded_spd_solve(G, p);
    L2Vector z;
    for (int a = 0; a < L.m(); ++a) z.axpy(beta[a], ws[static_cast<std::size_t>(a)]);
    return z;
}

double closest_point_sq_norm(const AffineConstraintSet& L, std::int64_t N) {
    const Eigen::MatrixXd G = truncated_gram(L, N);
    const Eigen::VectorXd p =
        Eigen::Map<const Eigen::VectorXd>(L.offsets().data(), static_cast<Eigen::Index>(L.m()));
    return p.dot(guarded_spd_solve(G, p));
}

std::vector<L2Vector> orthonormalized_directions(const AffineConstraintSet& L, std::int64_t N) {
    // Fail early with the ledger threshold so MGS never divides by ~0.
    if (!directions_independent(L, N))
        throw SingularGram("cannot orthonormalize dependent truncated directions");
    auto us = truncated_directions(L, N);
    for (std::size_t a = 0; a < us.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) us[a].axpy(-inner(us[a], us[b]), us[b]);
        const double nrm = std::sqrt(us[a].squared_norm());
        us[a] *= 1.0 / nrm;
    }
    return us;
}

Eigen::MatrixXd kernel_basis(const AffineConstraintSet& L, std::int64_t N) {
    if (N == kInfiniteDim) throw std::invalid_argument("kernel_basis needs finite N");
    require_min_ambient(L, N, 2);
    if (!directions_independent(L, N))
        throw SingularGram("kernel_basis below independence onset");
    const int m = L.m();
    Eigen::MatrixXd W(N, m);
    for (int a = 0; a < m; ++a) W.col(a) = L.direction_l2(a).densify(N);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
    Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(N, N - m);
    tail.bottomRows(N - m).setIdentity();
    return qr.householderQ() * tail;
}

Eigen::MatrixXd marginal_covariance(const AffineConstraintSet& L, std::int64_t N) {
    const int k = L.k();
    if (N != kInfiniteDim && N < k)
        throw std::invalid_argument("marginal_covariance needs N >= k");

    // Route 1: rank-one updates over the re-orthonormalized directions.
    const auto us = orthonormalized_directions(L, N);
    Eigen::MatrixXd cov1 = Eigen::MatrixXd::Identity(k, k);
    for (const auto& u : us) {
        const Eigen::VectorXd uk = u.densify(k);
        cov1 -= uk * uk.transpose();
    }

    // Route 2: P_(k) P_{ker Q_N} P_(k)^* through the Gram inverse of the raw
    // truncated directions.
    const auto ws = truncated_directions(L, N);
    const Eigen::MatrixXd G = gram_of(ws);
    Eigen::MatrixXd Wk(k, L.m());
    for (int a = 0; a < L.m(); ++a) Wk.col(a) = ws[static_cast<std::size_t>(a)].densify(k);
    const Eigen::MatrixXd cov2 =
        Eigen::MatrixXd::Identity(k, k) - Wk * guarded_spd_solve(G, Eigen::MatrixXd(Wk.transpose()));

    const double gap = (cov1 - cov2).cwiseAbs().maxCoeff();
    if (gap > kTwoRouteTol)
        throw FormulaMismatch("marginal covariance routes disagree by " + std::to_string(gap));

    Eigen::MatrixXd cov = 0.5 * (cov1 + cov2);
    cov = 0.5 * (cov + cov.transpose().eval());  // enforce exact symmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.eigenvalues().minCoeff() < kGramRelTol * std::max(1.0, cov.diagonal().maxCoeff()))
        throw NotTransversal("marginal covariance singular: min eigenvalue " +
                             std::to_string(eig.eigenvalues().minCoeff()));
    return cov;
}

double l0_inverse_sq_norm(const Eigen::MatrixXd& C, const Eigen::VectorXd& y) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    if (eig.eigenvalues().minCoeff() < kGramRelTol * std::max(1.0, C.diagonal().maxCoeff()))
        throw NotTransversal("covariance singular in l0_inverse_sq_norm");
    const Eigen::VectorXd w = eig.eigenvectors().transpose() * y;
    return w.cwiseAbs2().dot(eig.eigenvalues().cwiseInverse());
}

L2Vector l0_inverse_point(const AffineConstraintSet& L, std::int64_t N, const Eigen::VectorXd& y) {
    const int k = L.k();
    if (y.size() != k) throw std::invalid_argument("l0_inverse_point: y must have length k");
    const auto us = orthonormalized_directions(L, N);
    const int m = L.m();

    // <(u_a)_(k), y> and the Gram of the beyond-k parts, closed form.
    Eigen::VectorXd xvec(m);
    Eigen::MatrixXd U(m, m);
    std::vector<Eigen::VectorXd> uk;
    uk.reserve(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) uk.push_back(us[static_cast<std::size_t>(a)].densify(k));
    for (int a = 0; a < m; ++a) {
        xvec[a] = uk[static_cast<std::size_t>(a)].dot(y);
        for (int b = a; b < m; ++b) {
            const double g =
                (a == b ? 1.0 : 0.0) - uk[static_cast<std::size_t>(a)].dot(uk[static_cast<std::size_t>(b)]);
            U(a, b) = g;
            U(b, a) = g;
        }
    }
    Eigen::VectorXd c;
    try {
        c = -guarded_spd_solve(U, xvec);
    } catch (const SingularGram&) {
        throw NotTransversal("beyond-k Gram singular: projection not transversal");
    }

    std::vector<double> yv(y.data(), y.data() + y.size());
    L2Vector z = L2Vector::from_dense(std::move(yv));
    for (int a = 0; a < m; ++a) z.axpy(c[a], us[static_cast<std::size_t>(a)].beyond(k));

    // Postcondition checks (closed form, cheap): z in ker Q_N and the norm
    // identity |z|^2 = y^T (L0 L0^*)^{-1} y.
    const auto ws = truncated_directions(L, N);
    for (int a = 0; a < m; ++a) {
        const double resid = std::abs(inner(z, ws[static_cast<std::size_t>(a)]));
        if (resid > 1e-9 * std::max(1.0, y.norm()))
            throw FormulaMismatch("l0_inverse_point: kernel residual " + std::to_string(resid));
    }
    const double nrm2 = z.squared_norm();
    const double expect = l0_inverse_sq_norm(marginal_covariance(L, N), y);
    if (std::abs(nrm2 - expect) > 1e-8 * std::max(1.0, expect))
        throw FormulaMismatch("l0_inverse_point: norm identity violated");
    return z;
}

TruncatedSlice::TruncatedSlice(std::int64_t N, int k, int m, Eigen::VectorXd z0N, double radius,
                               Eigen::VectorXd mean_k, Eigen::MatrixXd cov_k, double det_factor,
                               Eigen::MatrixXd truncated_dirs)
    : N_(N),
      k_(k),
      m_(m),
      z0N_(std::move(z0N)),
      radius_(radius),
      mean_k_(std::move(mean_k)),
      cov_k_(std::move(cov_k)),
      det_factor_(det_factor),
      qr_(std::make_shared<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>>(
          std::move(truncated_dirs))) {}

Eigen::MatrixXd TruncatedSlice::kernel_basis() const {
    const auto N = static_cast<Eigen::Index>(N_);
    Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(N, N - m_);
    tail.bottomRows(N - m_).setIdentity();
    return qr_->householderQ() * tail;
}

Eigen::VectorXd TruncatedSlice::apply_kernel(const Eigen::VectorXd& u) const {
    const auto N = static_cast<Eigen::Index>(N_);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(N);
    padded.tail(N - m_) = u;
    return qr_->householderQ() * padded;
}

Eigen::VectorXd TruncatedSlice::apply_kernel_transpose(const Eigen::VectorXd& v) const {
    const auto N = static_cast<Eigen::Index>(N_);
    const Eigen::VectorXd w = qr_->householderQ().adjoint() * v;
    return w.tail(N - m_);
}

TruncatedSlice truncated_slice(const AffineConstraintSet& L, std::int64_t N) {
    const int k = L.k();
    const int m = L.m();
    if (N == kInfiniteDim) throw std::invalid_argument("truncated_slice needs finite N");
    if (N < std::max(k, m) + 2)
        throw std::invalid_argument("truncated_slice needs N >= max(k,m)+2");

    const double sq = closest_point_sq_norm(L, N);  // throws SingularGram below onset
    const double rad2 = static_cast<double>(N) - sq;
    if (rad2 <= 0.0)
        throw EmptySlice("slice empty: N = " + std::to_string(N) +
                         " <= |z0N|^2 = " + std::to_string(sq));

    const L2Vector z0 = closest_point(L, N);
    const Eigen::MatrixXd cov = marginal_covariance(L, N);

    Eigen::MatrixXd W(static_cast<Eigen::Index>(N), m);
    for (int a = 0; a < m; ++a) W.col(a) = L.direction_l2(a).densify(N);

    return TruncatedSlice(N, k, m, z0.densify(N), std::sqrt(rad2), z0.densify(k), cov,
                          std::sqrt(cov.determinant()), std::move(W));
}

GaussianLimit gaussian_limit(const AffineConstraintSet& L) {
    GaussianLimit g;
    g.mean = closest_point(L, kInfiniteDim).densify(L.k());
    g.cov = marginal_covariance(L, kInfiniteDim);
    g.det_factor = std::sqrt(g.cov.determinant());
    return g;
}

bool projection_surjective_on_kernel(const AffineConstraintSet& L, std::int64_t N) {
    const Eigen::MatrixXd K = kernel_basis(L, N);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(K.topRows(L.k())));
    qr.setThreshold(1e-9);
    return qr.rank() == L.k();
}

bool covariance_nonsingular(const AffineConstraintSet& L, std::int64_t N) {
    try {
        marginal_covariance(L, N);
        return true;
    } catch (const NotTransversal&) {
        return false;
    } catch (const SingularGram&) {
        return false;
    }
}

bool kernel_sum_spans(const AffineConstraintSet& L, std::int64_t N) {
    const int k = L.k();
    const Eigen::MatrixXd K = kernel_basis(L, N);
    const auto n = static_cast<Eigen::Index>(N);
    Eigen::MatrixXd combined(n, (n - k) + K.cols());
    combined.setZero();
    combined.block(k, 0, n - k, n - k).setIdentity();  // basis of ker P_(k)
    combined.rightCols(K.cols()) = K;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(combined);
    qr.setThreshold(1e-9);
    return qr.rank() == n;
}

}  // namespace ssg
