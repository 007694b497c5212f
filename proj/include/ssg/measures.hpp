#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "ssg/constraints.hpp"
#include "ssg/geometry.hpp"

namespace ssg {

// Surface measure c_j = 2 pi^{(j+1)/2} / Gamma((j+1)/2) of the unit
// j-dimensional sphere.  The log variant stays finite for j up to 1e7 and
// beyond; the plain value overflows near j ~ 340.
double log_surface_constant(std::int64_t j);
double surface_constant(std::int64_t j);

// c_{N-1-k-m} / (N^{k/2} c_{N-1-m}), which tends to (2 pi)^{-k/2}.
double constant_ratio(std::int64_t N, int k, int m);

// Parameters of the exact finite-N marginal density on R^k.
class SliceDensity {
public:
    SliceDensity(std::int64_t N, int k, int m, double radius, Eigen::VectorXd mean_k,
                 Eigen::MatrixXd cov_k);

    std::int64_t N() const { return N_; }
    int k() const { return k_; }
    int m() const { return m_; }
    std::int64_t d() const { return N_ - 1; }
    double radius() const { return radius_; }
    const Eigen::VectorXd& mean_k() const { return mean_k_; }
    const Eigen::MatrixXd& cov_k() const { return cov_k_; }
    double det_factor() const { return det_factor_; }
    double log_norm_const() const { return log_norm_const_; }
    double exponent() const { return 0.5 * static_cast<double>(d() - k_ - m_ - 1); }

    // (x - mean)^T cov^{-1} (x - mean)
    double quadratic_form(const Eigen::VectorXd& x) const;

    // Half-width of the bounding box of the support ellipsoid along axis i.
    double box_half_width(int i) const;

private:
    std::int64_t N_;
    int k_;
    int m_;
    double radius_;
    Eigen::VectorXd mean_k_;
    Eigen::MatrixXd cov_k_;
    double det_factor_;
    double log_norm_const_;
    Eigen::LLT<Eigen::MatrixXd> cov_llt_;
};

// Builds the density parameters from closed-form geometry (no dense N-dim
// work, so N up to 1e5+ is cheap).  Requires N >= k + m + 4 so the exponent
// is >= 1 and the density is continuous across the ellipsoid boundary.
SliceDensity slice_density(const AffineConstraintSet& L, std::int64_t N);
SliceDensity slice_density(const TruncatedSlice& S);

// Density of mu_N at x; zero outside the support ellipsoid.
double density_muN(const SliceDensity& D, const Eigen::VectorXd& x);

// Density of the Gaussian limit measure at x.
double density_muInf(const GaussianLimit& G, const Eigen::VectorXd& x);

// exp(i<t, mean> - <cov t, t>/2)
std::complex<double> charfn_muInf(const GaussianLimit& G, const Eigen::VectorXd& t);

// Characteristic function of the sequence-space measure at a finitely
// supported probe t: exp(i<t, z0> - |P_{ker Q} t|^2 / 2), all closed form.
std::complex<double> charfn_muL(const AffineConstraintSet& L, const L2Vector& t);

// --- catalogued test functions --------------------------------------------

class TestFunction {
public:
    enum class Kind {
        CosineCharacter,
        SineCharacter,
        BoxIndicator,
        GaussianBump,
        ClampedMonomial,
        Constant,
    };

    static TestFunction cosine(Eigen::VectorXd t);
    static TestFunction sine(Eigen::VectorXd t);
    static TestFunction box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    static TestFunction bump(Eigen::VectorXd center, double width);
    static TestFunction clamped_monomial(std::vector<int> powers, double clamp);
    static TestFunction constant(double c);

    double operator()(const Eigen::VectorXd& x) const;
    double bound() const;
    Kind kind() const { return kind_; }

    const Eigen::VectorXd& vec_a() const { return a_; }  // t / lo / center
    const Eigen::VectorXd& vec_b() const { return b_; }  // hi
    double scalar() const { return s_; }                 // width / clamp / value
    const std::vector<int>& powers() const { return powers_; }

    static TestFunction from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

private:
    TestFunction(Kind kind, Eigen::VectorXd a, Eigen::VectorXd b, double s,
                 std::vector<int> powers);

    Kind kind_;
    Eigen::VectorXd a_;
    Eigen::VectorXd b_;
    double s_ = 0.0;
    std::vector<int> powers_;
};

// Closed-form Gaussian expectation where the catalogue provides one;
// std::nullopt means "fall back to quadrature", not an error.
std::optional<double> gaussian_expectation(const GaussianLimit& G, const TestFunction& phi);

}  // namespace ssg
