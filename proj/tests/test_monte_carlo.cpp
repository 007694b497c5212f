#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "ssg/constraints.hpp"
#include "ssg/convergence.hpp"
#include "ssg/measures.hpp"
#include "ssg/errors.hpp"
#include "ssg/monte_carlo.hpp"
#include "ssg/quadrature.hpp"

using namespace ssg;

namespace {

struct Moment {
    double mean;
    double stderror;
};

template <typename F>
Moment sample_moment(std::int64_t n, std::uint64_t seed, F&& draw) {
    RngStream rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double v = draw(rng);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sumsq - n * mean * mean) / static_cast<double>(n - 1));
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

TEST_CASE("sphere sampler: norms exact, first moment vanishes, second moment a^2/(d+1)") {
    RngStream rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Eigen::VectorXd x = sample_sphere(3, 2.5, rng);
        CHECK(std::abs(x.norm() - 2.5) < 1e-12);
    }

    const Moment m1 = sample_moment(1'000'000, 2, [](RngStream& r) {
        return sample_sphere(1, 1.0, r)[0];
    });
    CHECK(std::abs(m1.mean) <= 4.0 * m1.stderror);

    const Moment m2 = sample_moment(400'000, 3, [](RngStream& r) {
        const double c = sample_sphere(2, 1.0, r)[0];
        return c * c;
    });
    CHECK(std::abs(m2.mean - 1.0 / 3.0) <= 4.0 * m2.stderror);
}

TEST_CASE("sphere scaling law: estimate at radius r vs r^2 at radius 1") {
    const double r = 2.5;
    const Moment at1 = sample_moment(400'000, 11, [](RngStream& g) {
        const double c = sample_sphere(2, 1.0, g)[0];
        return c * c;
    });
    const Moment atr = sample_moment(400'000, 12, [&](RngStream& g) {
        const double c = sample_sphere(2, r, g)[0];
        return c * c;
    });
    const double band =
        4.0 * std::sqrt(atr.stderror * atr.stderror + std::pow(r, 4) * at1.stderror * at1.stderror);
    CHECK(std::abs(atr.mean - r * r * at1.mean) <= band);
}

TEST_CASE("polar disintegration: radial quadrature of sphere-MC shell means") {
    // int_{R^3} exp(-|x|^2) x1^2 dx = pi^{3/2} / 2, rebuilt as
    // int_0^R c_2 r^2 exp(-r^2) E_{sphere(r)}[x1^2] dr with the shell means
    // estimated by the sampler on a Gauss-Legendre grid.
    const int nodes = 48;
    const double R = 8.0;
    double value = 0.0, var = 0.0;
    for (int i = 0; i < nodes; ++i) {
        // midpoint rule on [0, R] is plenty at this tolerance
        const double r = R * (i + 0.5) / nodes;
        const double wgt = (R / nodes) * surface_constant(2) * r * r * std::exp(-r * r);
        const Moment shell = sample_moment(20'000, 7000 + i, [&](RngStream& g) {
            const double c = sample_sphere(2, r, g)[0];
            return c * c;
        });
        value += wgt * shell.mean;
        var += wgt * wgt * shell.stderror * shell.stderror;
    }
    const double target = 0.5 * std::pow(std::numbers::pi, 1.5);
    // 4 sigma of the MC part plus a coarse-grid allowance.
    CHECK(std::abs(value - target) <= 4.0 * std::sqrt(var) + 2e-3);
}

TEST_CASE("slice sampler: membership residuals over 1e5 draws") {
    const auto L = fixtures::e1();
    const std::int64_t N = 41;
    const TruncatedSlice S = truncated_slice(L, N);
    const Eigen::VectorXd w = L.direction_l2(0).densify(N);
    RngStream rng(21);
    double worst_norm = 0.0, worst_member = 0.0;
    for (int i = 0; i < 100'000; ++i) {
        const Eigen::VectorXd x = sample_slice(S, rng);
        worst_norm = std::max(worst_norm, std::abs(x.squaredNorm() - static_cast<double>(N)));
        worst_member = std::max(worst_member, std::abs(w.dot(x) - 5.0));
    }
    CHECK(worst_norm <= 1e-9 * static_cast<double>(N));
    CHECK(worst_member <= 1e-9);
}

TEST_CASE("slice sampler: E1 marginal mean matches the center") {
    const TruncatedSlice S = truncated_slice(fixtures::e1(), 41);
    const Moment m = sample_moment(1'000'000, 31, [&](RngStream& g) {
        return sample_slice(S, g)[0];
    });
    CHECK(std::abs(m.mean - 3.0) <= 4.0 * m.stderror);
}

TEST_CASE("slice mean estimator: constants are exact") {
    const auto est = estimate_slice_mean(fixtures::e1(), 41, TestFunction::constant(1.0), 5000, 7);
    CHECK(est.value == 1.0);
    CHECK(est.stderror == 0.0);
    CHECK(est.n_samples == 5000);
}

TEST_CASE("slice mean estimator agrees with quadrature at N = 41") {
    const auto L = fixtures::e1();
    const TestFunction phi = TestFunction::cosine(Eigen::VectorXd::Ones(1));
    const double quad = integrate_muN(slice_density(L, 41), phi, 1e-10);
    const MCEstimate mc = estimate_slice_mean(L, 41, phi, 1'000'000, 99);
    CHECK(std::abs(mc.value - quad) <= 3.0 * mc.stderror + 1e-6);
}

TEST_CASE("slice mean estimator: x1^2 against quadrature for the hyperplane at N = 100") {
    const auto L = fixtures::hyperplane();
    const TestFunction phi = TestFunction::clamped_monomial({2}, 200.0);
    const double quad = integrate_muN(slice_density(L, 100), phi, 1e-10);
    const MCEstimate mc = estimate_slice_mean(L, 100, phi, 400'000, 5);
    CHECK(std::abs(mc.value - quad) <= 4.0 * mc.stderror);
}

TEST_CASE("slice mean estimator near the Gaussian regime at N = 3200") {
    const auto L = fixtures::e1();
    const TestFunction phi = TestFunction::cosine(Eigen::VectorXd::Ones(1));
    const MCEstimate mc = estimate_slice_mean(L, 3200, phi, 1'000'000, 12345);
    CHECK(std::abs(mc.value - (-0.7188820981165926)) <= 3.0 * mc.stderror + 5e-3);
}

TEST_CASE("gaussian mean estimator worked examples") {
    GaussianLimit std1;
    std1.mean = Eigen::VectorXd::Zero(1);
    std1.cov = Eigen::MatrixXd::Identity(1, 1);
    const TestFunction phi = TestFunction::cosine(Eigen::VectorXd::Ones(1));

    CHECK(estimate_gaussian_mean(std1, TestFunction::constant(1.0), 2000, 3).value == 1.0);

    const MCEstimate a = estimate_gaussian_mean(std1, phi, 1'000'000, 4);
    CHECK(std::abs(a.value - std::exp(-0.5)) <= 3.0 * a.stderror);

    const MCEstimate b = estimate_gaussian_mean(gaussian_limit(fixtures::e1()), phi, 1'000'000, 5);
    CHECK(std::abs(b.value - (-0.7188820981165926)) <= 3.0 * b.stderror);
}

TEST_CASE("seed determinism and worker independence") {
    const auto L = fixtures::e1();
    const TestFunction phi = TestFunction::cosine(Eigen::VectorXd::Ones(1));

    const MCEstimate a = estimate_slice_mean(L, 41, phi, 150'000, 42);
    const MCEstimate b = estimate_slice_mean(L, 41, phi, 150'000, 42);
    CHECK(a.value == b.value);
    CHECK(a.stderror == b.stderror);

    // Worker count must not leak into the values.
    const char* saved = std::getenv("SSG_THREADS");
    const std::string saved_copy = saved ? saved : "";
    setenv("SSG_THREADS", "1", 1);
    const MCEstimate one = estimate_slice_mean(L, 41, phi, 150'000, 42);
    setenv("SSG_THREADS", "8", 1);
    const MCEstimate eight = estimate_slice_mean(L, 41, phi, 150'000, 42);
    if (saved)
        setenv("SSG_THREADS", saved_copy.c_str(), 1);
    else
        unsetenv("SSG_THREADS");
    CHECK(one.value == eight.value);
    CHECK(one.stderror == eight.stderror);
    CHECK(one.value == a.value);

    const MCEstimate other = estimate_slice_mean(L, 41, phi, 150'000, 43);
    CHECK(other.value != a.value);
}

TEST_CASE("unbiasedness at desk scale: z-scores over 50 seeds") {
    const auto L = fixtures::e1();
    const TestFunction phi = TestFunction::cosine(Eigen::VectorXd::Ones(1));
    const double truth = integrate_muN(slice_density(L, 41), phi, 1e-11);

    double zsum = 0.0, zsumsq = 0.0;
    const int runs = 50;
    for (int s = 0; s < runs; ++s) {
        const MCEstimate est = estimate_slice_mean(L, 41, phi, 20'000, 1000 + s);
        const double z = (est.value - truth) / est.stderror;
        zsum += z;
        zsumsq += z * z;
    }
    const double zmean = zsum / runs;
    const double zvar = (zsumsq - runs * zmean * zmean) / (runs - 1);
    CHECK(std::abs(zmean) < 0.5);
    CHECK(zvar > 0.5);
    CHECK(zvar < 2.0);
}

TEST_CASE("estimator preconditions") {
    CHECK_THROWS_AS(
        estimate_slice_mean(fixtures::e1(), 41, TestFunction::constant(1.0), 50, 1),
        std::invalid_argument);
    CHECK_THROWS_AS(estimate_slice_mean(fixtures::e1(), 20, TestFunction::constant(1.0), 500, 1),
                    EmptySlice);
}
