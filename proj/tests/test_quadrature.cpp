#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssg/constraints.hpp"
#include "ssg/convergence.hpp"
#include "ssg/errors.hpp"
#include "ssg/measures.hpp"
#include "ssg/quadrature.hpp"

using namespace ssg;

namespace {
Eigen::VectorXd vec1(double a) { return Eigen::VectorXd::Constant(1, a); }
Eigen::VectorXd vec2(double a, double b) { return (Eigen::VectorXd(2) << a, b).finished(); }
Eigen::VectorXd vec3(double a, double b, double c) {
    return (Eigen::VectorXd(3) << a, b, c).finished();
}
}  // namespace

TEST_CASE("one-dimensional rule against elementary integrals") {
    auto sq = [](const Eigen::VectorXd& x) { return x[0] * x[0]; };
    CHECK(integrate_box(sq, vec1(0.0), vec1(1.0), 1e-12).value ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto sine = [](const Eigen::VectorXd& x) { return std::sin(x[0]); };
    CHECK(integrate_box(sine, vec1(0.0), vec1(std::numbers::pi), 1e-12).value ==
          doctest::Approx(2.0).epsilon(1e-12));

    auto wiggly = [](const Eigen::VectorXd& x) { return std::cos(40.0 * x[0]); };
    CHECK(integrate_box(wiggly, vec1(0.0), vec1(3.0), 1e-12).value ==
          doctest::Approx(std::sin(120.0) / 40.0).epsilon(1e-10));
}

TEST_CASE("Genz-Malik rule against product and Gaussian integrals") {
    auto xy = [](const Eigen::VectorXd& x) { return x[0] * x[1]; };
    CHECK(integrate_box(xy, vec2(0.0, 0.0), vec2(1.0, 1.0), 1e-12).value ==
          doctest::Approx(0.25).epsilon(1e-12));

    // Degree-7 polynomial integrates essentially exactly.
    auto poly = [](const Eigen::VectorXd& x) {
        return std::pow(x[0], 6) * x[1] + 3.0 * x[0] * x[0] * std::pow(x[1], 4) + 2.0;
    };
    // int over [0,1]^2: 1/14 + 3/15 + 2
    CHECK(integrate_box(poly, vec2(0.0, 0.0), vec2(1.0, 1.0), 1e-11).value ==
          doctest::Approx(1.0 / 14.0 + 0.2 + 2.0).epsilon(1e-11));

    auto gauss2 = [](const Eigen::VectorXd& x) { return std::exp(-x.squaredNorm()); };
    const double erf8 = std::erf(8.0);
    CHECK(integrate_box(gauss2, vec2(-8.0, -8.0), vec2(8.0, 8.0), 1e-10).value ==
          doctest::Approx(std::numbers::pi * erf8 * erf8).epsilon(1e-10));

    auto xyz = [](const Eigen::VectorXd& x) { return x[0] * x[1] * x[2]; };
    CHECK(integrate_box(xyz, vec3(0, 0, 0), vec3(1, 1, 1), 1e-11).value ==
          doctest::Approx(0.125).epsilon(1e-11));

    auto gauss3 = [](const Eigen::VectorXd& x) { return std::exp(-x.squaredNorm()); };
    CHECK(integrate_box(gauss3, vec3(-6, -6, -6), vec3(6, 6, 6), 1e-8).value ==
          doctest::Approx(std::pow(std::numbers::pi, 1.5)).epsilon(1e-8));
}

TEST_CASE("degenerate boxes and unsupported dimensions") {
    auto one = [](const Eigen::VectorXd&) { return 1.0; };
    CHECK(integrate_box(one, vec1(2.0), vec1(2.0), 1e-10).value == 0.0);
    CHECK_THROWS_AS(
        integrate_box(one, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Ones(4), 1e-6),
        std::invalid_argument);
}

TEST_CASE("refinement budget exhaustion raises ToleranceNotReached") {
    auto jumpy = [](const Eigen::VectorXd& x) { return x[0] > std::numbers::inv_pi ? 1.0 : 0.0; };
    CHECK_THROWS_AS(integrate_box(jumpy, vec1(0.0), vec1(1.0), 1e-14, 40), ToleranceNotReached);
}

TEST_CASE("oracle triangle: quadrature matches every closed-form expectation") {
    const GaussianLimit G1 = gaussian_limit(fixtures::e1());
    GaussianLimit G2;
    G2.mean = vec2(0.4, -0.3);
    G2.cov = (Eigen::MatrixXd(2, 2) << 0.5, 0.0, 0.0, 1.25).finished();
    G2.det_factor = std::sqrt(G2.cov.determinant());

    const std::vector<TestFunction> phis1 = {
        TestFunction::constant(1.0),
        TestFunction::cosine(vec1(1.0)),
        TestFunction::sine(vec1(0.7)),
        TestFunction::box(vec1(2.0), vec1(4.0)),
        TestFunction::bump(vec1(3.0), 1.0),
    };
    for (const auto& phi : phis1) {
        const auto closed = gaussian_expectation(G1, phi);
        REQUIRE(closed.has_value());
        CHECK(integrate_muInf(G1, phi, 1e-9) == doctest::Approx(*closed).epsilon(1e-8));
    }

    const std::vector<TestFunction> phis2 = {
        TestFunction::cosine(vec2(1.0, -0.5)),
        TestFunction::box(vec2(-1.0, -2.0), vec2(0.5, 1.0)),
        TestFunction::bump(vec2(0.0, 0.0), 0.8),
    };
    for (const auto& phi : phis2) {
        const auto closed = gaussian_expectation(G2, phi);
        REQUIRE(closed.has_value());
        CHECK(integrate_muInf(G2, phi, 1e-9) == doctest::Approx(*closed).epsilon(1e-8));
    }
}

TEST_CASE("integrate_muInf worked examples") {
    const GaussianLimit G = gaussian_limit(fixtures::e1());
    CHECK(integrate_muInf(G, TestFunction::constant(1.0), 1e-11) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate_muInf(G, TestFunction::cosine(vec1(1.0)), 1e-9) ==
          doctest::Approx(-0.7188820981165926).epsilon(1e-8));

    GaussianLimit std1;
    std1.mean = Eigen::VectorXd::Zero(1);
    std1.cov = Eigen::MatrixXd::Identity(1, 1);
    CHECK(integrate_muInf(std1, TestFunction::box(vec1(-1.0), vec1(1.0)), 1e-9) ==
          doctest::Approx(0.6826894921370859).epsilon(1e-8));
}

TEST_CASE("integrate_muN: unit mass, full-mass box, clamped moment identity") {
    const SliceDensity D = slice_density(fixtures::e1(), 41);
    CHECK(integrate_muN(D, TestFunction::constant(1.0), 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-8));

    // A box containing all of D_N captures the full mass.
    CHECK(integrate_muN(D, TestFunction::box(vec1(-1.0), vec1(7.0)), 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-8));

    // The identity function (clamp far above the support) integrates to the
    // mean of the marginal, which is the first coordinate of z0N.
    const double mean = integrate_muN(D, TestFunction::clamped_monomial({1}, 100.0), 1e-10);
    CHECK(mean == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("integrate_muN respects the k <= 3 limit") {
    const SliceDensity D(20, 4, 1, 3.0, Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4));
    CHECK_THROWS_AS(integrate_muN(D, TestFunction::constant(1.0), 1e-6), std::invalid_argument);
}
