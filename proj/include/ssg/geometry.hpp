#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ssg/constraints.hpp"
#include "ssg/l2vector.hpp"

namespace ssg {

// Relative threshold for declaring the Gram matrix of truncated directions
// singular: smallest eigenvalue < kGramRelTol * largest diagonal entry.
inline constexpr double kGramRelTol = 1e-10;

// Tolerance for the two independent routes to the marginal covariance.
inline constexpr double kTwoRouteTol = 1e-10;

// Gram matrix [<(w_a)_(N), (w_b)_(N)>], closed form; N may be kInfiniteDim.
Eigen::MatrixXd truncated_gram(const AffineConstraintSet& L, std::int64_t N);

// Smallest eigenvalue above the singularity threshold?
bool directions_independent(const AffineConstraintSet& L, std::int64_t N);

// z^{0,N} = Q_N^*(Q_N Q_N^*)^{-1} p, the point of L_N closest to the origin
// (z^0 of the full subspace when N == kInfiniteDim).  Throws SingularGram
// below the independence onset.
L2Vector closest_point(const AffineConstraintSet& L, std::int64_t N);

// |z^{0,N}|^2 = p^T G_N^{-1} p without forming the point.
double closest_point_sq_norm(const AffineConstraintSet& L, std::int64_t N);

// Modified Gram-Schmidt on the truncated directions, in exact l2 arithmetic:
// an orthonormal basis of (ker Q_N)^perp.
std::vector<L2Vector> orthonormalized_directions(const AffineConstraintSet& L, std::int64_t N);

// Dense orthonormal basis of ker Q_N: N-m columns from a deterministic
// column-pivoted Householder factorization.  Requires finite N >= m + 2.
Eigen::MatrixXd kernel_basis(const AffineConstraintSet& L, std::int64_t N);

// L0 L0^* computed both as the rank-one-update formula over the
// re-orthonormalized directions and as the projector sandwich through the
// Gram inverse; throws FormulaMismatch if the routes disagree beyond
// kTwoRouteTol and NotTransversal if the result is singular.
Eigen::MatrixXd marginal_covariance(const AffineConstraintSet& L, std::int64_t N);

// y^T C^{-1} y for symmetric positive definite C; throws NotTransversal when
// C is singular within tolerance.
double l0_inverse_sq_norm(const Eigen::MatrixXd& C, const Eigen::VectorXd& y);

// The unique z in ker Q_N orthogonal to ker Q_N \cap ker P_(k) with first k
// coordinates equal to y.
L2Vector l0_inverse_point(const AffineConstraintSet& L, std::int64_t N, const Eigen::VectorXd& y);

// All N-dependent slice geometry in one bundle.
class TruncatedSlice {
public:
    TruncatedSlice(std::int64_t N, int k, int m, Eigen::VectorXd z0N, double radius,
                   Eigen::VectorXd mean_k, Eigen::MatrixXd cov_k, double det_factor,
                   Eigen::MatrixXd truncated_directions);

    std::int64_t N() const { return N_; }
    int k() const { return k_; }
    int m() const { return m_; }
    const Eigen::VectorXd& z0N() const { return z0N_; }
    double radius() const { return radius_; }
    const Eigen::VectorXd& mean_k() const { return mean_k_; }
    const Eigen::MatrixXd& cov_k() const { return cov_k_; }
    double det_factor() const { return det_factor_; }

    // Materializes the N x (N-m) orthonormal kernel basis.  Fine for test
    // scale N; sampling paths should prefer apply_kernel.
    Eigen::MatrixXd kernel_basis() const;

    // Q * [0; u]: maps u in R^{N-m} to the kernel vector with the same
    // coordinates in the factored basis, in O(N m) time.
    Eigen::VectorXd apply_kernel(const Eigen::VectorXd& u) const;

    // K^T v: coordinates of v in R^N against the kernel basis columns.
    Eigen::VectorXd apply_kernel_transpose(const Eigen::VectorXd& v) const;

private:
    std::int64_t N_;
    int k_;
    int m_;
    Eigen::VectorXd z0N_;
    double radius_;
    Eigen::VectorXd mean_k_;
    Eigen::MatrixXd cov_k_;
    double det_factor_;
    std::shared_ptr<const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>> qr_;
};

// Assembles the slice at finite N.  Throws EmptySlice when N <= |z0N|^2,
// SingularGram below onset, NotTransversal when the marginal degenerates.
TruncatedSlice truncated_slice(const AffineConstraintSet& L, std::int64_t N);

// Parameters of the limiting Gaussian on R^k.
struct GaussianLimit {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double det_factor = 1.0;
};

GaussianLimit gaussian_limit(const AffineConstraintSet& L);

// --- transversality / onset predicates (non-throwing) ---------------------

// (i) of the trichotomy: P_(k) maps ker Q_N onto R^k, decided by the rank of
// the first k rows of the kernel basis.
bool projection_surjective_on_kernel(const AffineConstraintSet& L, std::int64_t N);

// (ii): the marginal covariance is nonsingular (closed-form route).
bool covariance_nonsingular(const AffineConstraintSet& L, std::int64_t N);

// (iii): ker P_(k) + ker Q_N spans R^N, decided by a dense rank computation.
bool kernel_sum_spans(const AffineConstraintSet& L, std::int64_t N);

}  // namespace ssg
