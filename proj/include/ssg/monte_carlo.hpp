#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "ssg/constraints.hpp"
#include "ssg/geometry.hpp"
#include "ssg/measures.hpp"
#include "ssg/rng.hpp"

namespace ssg {

struct MCEstimate {
    double value = 0.0;
    double stderror = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
};

// Uniform point on the sphere of radius a in R^{d+1} (Gaussian normalization;
// the zero-draw event is re-drawn).
Eigen::VectorXd sample_sphere(int d, double a, RngStream& rng);

// Uniform point on the slice: z0N + radius * (kernel basis applied to a
// uniform direction in R^{N-m}).
Eigen::VectorXd sample_slice(const TruncatedSlice& S, RngStream& rng);

// Sample mean of phi(x_(k)) over n slice samples.  Deterministic for fixed
// (L, N, phi, n, seed) regardless of worker count: the index space is split
// into fixed blocks, each with its own derived stream, and block partial
// sums are reduced in block order.
MCEstimate estimate_slice_mean(const AffineConstraintSet& L, std::int64_t N,
                               const TestFunction& phi, std::int64_t n, std::uint64_t seed);

// Same estimator against the limit Gaussian: mean + cov^{1/2} * standard normal.
MCEstimate estimate_gaussian_mean(const GaussianLimit& G, const TestFunction& phi, std::int64_t n,
                                  std::uint64_t seed);

}  // namespace ssg
