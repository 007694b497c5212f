#include <doctest.h>

#include <cmath>

#include "ssg/l2vector.hpp"
#include "ssg/rng.hpp"

using ssg::GeomRun;
using ssg::kInfiniteDim;
using ssg::L2Vector;

namespace {

// Brute-force oracle: partial sum of componentwise products out to where the
// geometric remainder is below double noise.
double inner_oracle(const L2Vector& a, const L2Vector& b, std::int64_t terms = 4000) {
    double s = 0.0;
    for (std::int64_t j = 1; j <= terms; ++j) s += a.component(j) * b.component(j);
    return s;
}

L2Vector random_vector(ssg::RngStream& rng, bool with_tail) {
    std::vector<double> head(static_cast<std::size_t>(1 + (rng.next_u64() % 6)));
    for (auto& h : head) h = rng.gaussian();
    L2Vector v = L2Vector::from_dense(std::move(head));
    if (with_tail) {
        const double ratio = 0.3 + 0.6 * rng.uniform();
        const auto start = static_cast<std::int64_t>(1 + (rng.next_u64() % 5));
        v.add_run({start, kInfiniteDim, rng.gaussian(), (rng.next_u64() & 1) ? ratio : -ratio});
    }
    return v;
}

}  // namespace

TEST_CASE("closed-form norm of a direction-style vector") {
    L2Vector v = L2Vector::from_dense({3.0, 4.0});
    v.add_run({3, kInfiniteDim, 2.0, 0.5});
    // 9 + 16 + 4/(1 - 0.25)
    CHECK(v.squared_norm() == doctest::Approx(25.0 + 4.0 / 0.75).epsilon(1e-15));
}

TEST_CASE("inner products match the brute-force oracle") {
    ssg::RngStream rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const L2Vector a = random_vector(rng, trial % 3 != 0);
        const L2Vector b = random_vector(rng, trial % 2 != 0);
        const double expect = inner_oracle(a, b);
        CHECK(inner(a, b) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("truncation is exact: components vanish beyond N, match below") {
    ssg::RngStream rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const L2Vector v = random_vector(rng, true);
        const std::int64_t N = 1 + static_cast<std::int64_t>(rng.next_u64() % 12);
        const L2Vector t = v.truncated(N);
        for (std::int64_t j = 1; j <= N + 8; ++j) {
            if (j <= N)
                CHECK(t.component(j) == doctest::Approx(v.component(j)).epsilon(1e-15));
            else
                CHECK(t.component(j) == 0.0);
        }
        CHECK(t.finite_support());
    }
}

TEST_CASE("beyond(n) complements truncation") {
    ssg::RngStream rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const L2Vector v = random_vector(rng, true);
        const std::int64_t n = static_cast<std::int64_t>(rng.next_u64() % 9);
        L2Vector sum = v.truncated(n);
        sum.axpy(1.0, v.beyond(n));
        for (std::int64_t j = 1; j <= 20; ++j)
            CHECK(sum.component(j) == doctest::Approx(v.component(j)).epsilon(1e-14));
        // Pythagoras across the split.
        CHECK(v.squared_norm() == doctest::Approx(v.truncated(n).squared_norm() +
                                                  v.beyond(n).squared_norm())
                                      .epsilon(1e-13));
    }
}

TEST_CASE("densify agrees with component access") {
    ssg::RngStream rng(13);
    const L2Vector v = random_vector(rng, true);
    const Eigen::VectorXd dense = v.densify(30);
    for (std::int64_t j = 1; j <= 30; ++j)
        CHECK(dense[j - 1] == doctest::Approx(v.component(j)).epsilon(1e-15));
}

TEST_CASE("axpy is linear in exact arithmetic") {
    ssg::RngStream rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const L2Vector a = random_vector(rng, true);
        const L2Vector b = random_vector(rng, true);
        const double c = rng.gaussian();
        L2Vector combo = a;
        combo.axpy(c, b);
        // <a + c b, a + c b> = <a,a> + 2c<a,b> + c^2 <b,b>
        const double expect =
            a.squared_norm() + 2.0 * c * inner(a, b) + c * c * b.squared_norm();
        CHECK(combo.squared_norm() == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("finite runs and infinite runs combine") {
    L2Vector v;
    v.add_run({2, 5, 1.0, 0.5});            // 1, .5, .25, .125 on indices 2..5
    v.add_run({4, kInfiniteDim, 3.0, 0.25});  // from index 4
    CHECK(v.component(1) == 0.0);
    CHECK(v.component(2) == doctest::Approx(1.0));
    CHECK(v.component(4) == doctest::Approx(0.25 + 3.0));
    CHECK(v.component(6) == doctest::Approx(3.0 * 0.25 * 0.25));
    const double oracle = inner_oracle(v, v, 300);
    CHECK(v.squared_norm() == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("infinite run with |ratio| >= 1 is rejected") {
    L2Vector v;
    CHECK_THROWS_AS(v.add_run({1, kInfiniteDim, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(v.add_run({1, kInfiniteDim, 1.0, -1.5}), std::invalid_argument);
}
