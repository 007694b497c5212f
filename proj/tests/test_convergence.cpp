#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "ssg/constraints.hpp"
#include "ssg/convergence.hpp"
#include "ssg/errors.hpp"
#include "ssg/geometry.hpp"

using namespace ssg;

TEST_CASE("fixtures are admissible and transversal") {
    for (const auto& L : {fixtures::e1(), fixtures::hyperplane(), fixtures::geometric(0.9, 1.0),
                          fixtures::tail_family(3, 2, 4, 0.8, 1)}) {
        CHECK(covariance_nonsingular(L, kInfiniteDim));
    }
    const auto fam = fixtures::tail_family(4, 2, 4, 0.85, 9);
    for (int a = 0; a < fam.m(); ++a)
        for (int b = a; b < fam.m(); ++b)
            CHECK(inner(fam.direction_l2(a), fam.direction_l2(b)) ==
                  doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("run_convergence: constant test function gives all-zero gaps") {
    const auto report = run_convergence(fixtures::e1(), TestFunction::constant(1.0),
                                        {50, 100, 200}, 1000, 9, 1e-9);
    CHECK(report.pass);
    for (const auto& row : report.rows) {
        CHECK(row.gap_quad < 1e-9);
        CHECK(row.mc.value == 1.0);
    }
}

TEST_CASE("run_convergence: E1 cosine marches to the Gaussian value") {
    const TestFunction phi = TestFunction::cosine(Eigen::VectorXd::Ones(1));
    const auto report = run_convergence(fixtures::e1(), phi, {50, 100, 200, 400, 800, 1600, 3200},
                                        2000, 17, 5e-3);
    CHECK(report.gaussian_value == doctest::Approx(-0.7188820981165926).epsilon(1e-12));
    CHECK(report.rows.back().gap_quad <= 5e-3);
    CHECK(report.pass);

    // Gaps shrink roughly like 1/N: each doubling should at least halve-ish.
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        CHECK(report.rows[i].gap_quad < report.rows[i - 1].gap_quad);
}

TEST_CASE("run_convergence: hyperplane case targets exp(-1/2)") {
    const TestFunction phi = TestFunction::cosine(Eigen::VectorXd::Ones(1));
    const auto report = run_convergence(fixtures::hyperplane(), phi,
                                        {50, 100, 200, 400, 800, 1600, 3200}, 2000, 23, 5e-3);
    CHECK(report.gaussian_value == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(report.pass);
}

TEST_CASE("run_convergence input validation and CSV shape") {
    const TestFunction phi = TestFunction::constant(1.0);
    CHECK_THROWS_AS(run_convergence(fixtures::e1(), phi, {100, 50}, 1000, 1, 1e-3),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_convergence(fixtures::e1(), phi, {}, 1000, 1, 1e-3),
                    std::invalid_argument);

    const auto report = run_convergence(fixtures::e1(), phi, {41, 64}, 1000, 1, 1e-3);
    const std::string csv = report.to_csv();
    CHECK(csv.rfind("N,quad,mc,mc_stderr,gauss,gap_quad,gap_mc_z\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    // Byte-identical on rerun.
    const auto rerun = run_convergence(fixtures::e1(), phi, {41, 64}, 1000, 1, 1e-3);
    CHECK(rerun.to_csv() == csv);
    CHECK(report.to_json() == rerun.to_json());
}

TEST_CASE("z0 limit check: finite support is exact, tails decay below 1e-8") {
    // Finite support: gaps are exactly zero once N covers the support.
    const auto finite = check_z0_limit(fixtures::e1(), {8, 16, 32},
                                       {L2Vector::basis(1), L2Vector::basis(5)});
    CHECK(finite.pass);

    // Geometric tail at r = 0.9 against the closed-form partial-sum oracle.
    const auto L = fixtures::geometric(0.9, 1.5);
    const auto res = check_z0_limit(L, {16, 32, 64, 128, 256}, {L2Vector::basis(1)});
    CHECK(res.pass);

    // Oracle: m = 1 gives <e1, z0N> = p * w1 / |w_N|^2 with
    // |w_N|^2 = 0.36 + alpha^2 (1 - r^(2(N-1))) / (1 - r^2).
    const double r = 0.9, alpha = 0.8 * std::sqrt(1.0 - r * r);
    auto inner_e1 = [&](std::int64_t N) {
        const double tail_mass =
            alpha * alpha * (1.0 - std::pow(r, 2.0 * (N - 1))) / (1.0 - r * r);
        return 1.5 * 0.6 / (0.36 + tail_mass);
    };
    const double lib = inner(L2Vector::basis(1), closest_point(L, 64));
    CHECK(lib == doctest::Approx(inner_e1(64)).epsilon(1e-13));
}

TEST_CASE("covariance limit check and the hand determinant oracle") {
    const auto res =
        check_covariance_limit(fixtures::tail_family(2, 2, 3, 0.9, 31), {8, 16, 32, 64, 128, 256});
    CHECK(res.pass);

    // k = 1 geometric direction: cov(N) = 1 - 0.36 / |w_N|^2, by hand.
    const auto L = fixtures::geometric(0.9, 1.0);
    const double r = 0.9, alpha = 0.8 * std::sqrt(1.0 - r * r);
    for (std::int64_t N : {4, 16, 64}) {
        const double wsq =
            0.36 + alpha * alpha * (1.0 - std::pow(r, 2.0 * (N - 1))) / (1.0 - r * r);
        const double byhand = 1.0 - 0.36 / wsq;
        CHECK(marginal_covariance(L, N)(0, 0) == doctest::Approx(byhand).epsilon(1e-12));
    }
}

TEST_CASE("projection limit check including the expected-fail guard") {
    const auto L = fixtures::geometric(0.9, 1.0);
    std::vector<L2Vector> spanK;
    {
        L2Vector k1 = L2Vector::from_dense({0.3});
        k1.add_run({2, kInfiniteDim, 0.5, 0.9});
        spanK.push_back(k1);
    }
    std::vector<L2Vector> probes = {L2Vector::basis(1), L2Vector::from_dense({0.2, -1.0, 0.4})};
    const auto res = check_projection_limits(L, spanK, probes, {16, 32, 64, 128, 256});
    CHECK(res.pass);

    // The guard line must certify that convergence FAILS for the harmonic
    // counterexample.
    bool saw_guard = false;
    for (const auto& line : res.lines)
        if (line.find("no convergence, as required") != std::string::npos) saw_guard = true;
    CHECK(saw_guard);
}

TEST_CASE("projection limit: probe already in ker Q stays fixed (hyperplane)") {
    const auto L = fixtures::hyperplane();
    const auto res = check_projection_limits(L, {}, {L2Vector::basis(1)}, {4, 8, 16});
    CHECK(res.pass);
    // Directly: P_{ker Q_N} e1 = e1 for every N >= 1, so the gap is zero.
    const L2Vector e1 = L2Vector::basis(1);
    L2Vector target = e1;
    target.axpy(-inner(e1, L.direction_l2(0)), L.direction_l2(0));
    CHECK(target.squared_norm() == doctest::Approx(1.0));
}

TEST_CASE("onset report: hyperplane hits every onset at N = 2") {
    OnsetReport rep;
    const auto res = check_onsets(fixtures::hyperplane(), 30, &rep);
    CHECK(res.pass);
    CHECK(rep.independence_onset == 2);
    CHECK(rep.surjectivity_onset == 2);
    CHECK(rep.transversality_onset == 2);
    CHECK(rep.permanent);
    CHECK(rep.trichotomy_agrees);
}

TEST_CASE("onset report: w = e1 with k = 1 never becomes transversal") {
    OnsetReport rep;
    const AffineConstraintSet L({DirectionVector{{1.0}, std::nullopt}}, {0.5}, 1);
    const auto res = check_onsets(L, 25, &rep);
    CHECK(res.pass);
    CHECK(rep.independence_onset == 1);
    CHECK(rep.transversality_onset == -1);
}

TEST_CASE("onset report: geometric pair has permanent onsets") {
    OnsetReport rep;
    const auto res = check_onsets(fixtures::tail_family(2, 1, 3, 0.9, 2718), 40, &rep);
    CHECK(res.pass);
    CHECK(rep.independence_onset > 0);
    CHECK(rep.independence_onset == rep.surjectivity_onset);
    CHECK(rep.transversality_onset >= rep.independence_onset);
    CHECK(rep.permanent);
    CHECK(rep.trichotomy_agrees);
}

TEST_CASE("constant limit check over k, m <= 3") {
    std::vector<std::pair<int, int>> pairs;
    for (int k = 1; k <= 3; ++k)
        for (int m = 1; m <= 3; ++m) pairs.emplace_back(k, m);
    CHECK(check_constant_limit(pairs, 100'000).pass);
}

TEST_CASE("verify suites pass and reject unknown names") {
    CHECK_THROWS_AS(verify_suite("bogus", 1), std::invalid_argument);

    const auto onsets = verify_suite("onsets", 5);
    CHECK(onsets.pass);

    const auto all = verify_suite("all", 5);
    CHECK(all.pass);
    CHECK(all.checks.size() >= 9);
    const auto j = all.to_json();
    CHECK(j.at("pass").get<bool>());

    // Same seed, same verdict tree.
    CHECK(verify_suite("onsets", 5).to_json() == onsets.to_json());
}
