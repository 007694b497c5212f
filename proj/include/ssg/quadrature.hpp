#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "ssg/measures.hpp"

namespace ssg {

struct CubatureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evals = 0;
};

// Globally adaptive integration over an axis-aligned box: Gauss-Kronrod
// 15(7) in one dimension, the Genz-Malik 7(5) rule with largest-fourth-
// difference splitting for k in {2, 3}.  Throws ToleranceNotReached when the
// refinement budget runs out above tol.
CubatureResult integrate_box(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double tol,
                             std::size_t max_regions = 2'000'000);

// integral of phi d(mu_N): adaptive integration over the bounding box of the
// support ellipsoid.  Box indicators are folded into the domain so the
// integrand stays continuous.
double integrate_muN(const SliceDensity& D, const TestFunction& phi, double tol);

// integral of phi d(mu_infinity): whitened coordinates against the standard
// Gaussian weight, truncated at |y|_inf <= 10.
double integrate_muInf(const GaussianLimit& G, const TestFunction& phi, double tol);

}  // namespace ssg
