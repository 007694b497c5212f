#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ssg/constraints.hpp"
#include "ssg/l2vector.hpp"
#include "ssg/measures.hpp"
#include "ssg/monte_carlo.hpp"

namespace ssg {

struct ConvergenceRow {
    std::int64_t N = 0;
    double quad = 0.0;
    MCEstimate mc;
    double gauss = 0.0;
    double gap_quad = 0.0;
    double gap_mc_z = 0.0;
};

// Both sides of the limit theorem tabulated per N, with the verdict rule
// echoed: final gap_quad below tol and nonincreasing over the last three N.
struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double gaussian_value = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string criterion;

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

ConvergenceReport run_convergence(const AffineConstraintSet& L, const TestFunction& phi,
                                  const std::vector<std::int64_t>& N_list, std::int64_t n_mc,
                                  std::uint64_t seed, double tol);

// One named, machine-checkable verdict.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::vector<std::string> lines;
    nlohmann::json details() const;

    void note(const std::string& line) { lines.push_back(line); }
};

// |<t, z^{0,N}> - <t, z^0>| decreasing below 1e-8 at max N for each probe.
CheckResult check_z0_limit(const AffineConstraintSet& L, const std::vector<std::int64_t>& N_list,
                           const std::vector<L2Vector>& t_probes);

// Entrywise and determinant gaps of cov_k(N) against cov_k(infinity),
// decreasing below 1e-6.
CheckResult check_covariance_limit(const AffineConstraintSet& L,
                                   const std::vector<std::int64_t>& N_list);

// Projection limits: P_{ker Q_N} -> P_{ker Q} on probes, projections onto
// truncations of a finite-dimensional K, and the mandatory expected-fail
// guard for the infinite-dimensional counterexample K = v^perp with
// v = (1, 1/2, 1/3, ...).
CheckResult check_projection_limits(const AffineConstraintSet& L,
                                    const std::vector<L2Vector>& span_K,
                                    const std::vector<L2Vector>& z_probes,
                                    const std::vector<std::int64_t>& N_list);

struct OnsetReport {
    std::int64_t independence_onset = -1;   // (a) truncated directions independent
    std::int64_t surjectivity_onset = -1;   // (b) Q_N onto
    std::int64_t transversality_onset = -1; // (c) P_(k)(ker Q_N) = R^k; -1 if never
    bool permanent = false;
    bool trichotomy_agrees = false;
};

// Smallest N for each onset, permanence over the next 10 values, and
// agreement of the three transversality predicates at every scanned N.
CheckResult check_onsets(const AffineConstraintSet& L, std::int64_t N_max, OnsetReport* out = nullptr);

// |constant_ratio(N, k, m) - (2 pi)^{-k/2}| < 1e-3 for the given pairs.
CheckResult check_constant_limit(const std::vector<std::pair<int, int>>& km_pairs, std::int64_t N);

// Named verification suites behind `ssg verify`; seed drives every stochastic
// sub-check.  Valid names: disintegration, limits, onsets, all.
struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool pass = false;
    nlohmann::json to_json() const;
};

SuiteResult verify_suite(const std::string& name, std::uint64_t seed);

// --- shared fixtures --------------------------------------------------------

namespace fixtures {

// k=1, w = (3/5)e1 + (4/5)e2, p = 5.
AffineConstraintSet e1();
// Same direction, offset p = 1 (nonempty already at N = 10).
AffineConstraintSet e1_small();
// k=1, w = e2, p = 0: the hyperplane / Maxwell-Boltzmann case.
AffineConstraintSet hyperplane();
// k=1 single direction carrying a geometric tail of the given ratio.
AffineConstraintSet geometric(double ratio = 0.9, double offset = 1.0);
// Orthonormal family of m directions sharing one tail ratio, built by exact
// Gram-Schmidt from seeded random prefixes; admissible by construction.
AffineConstraintSet tail_family(int m, int k, int prefix_len, double ratio, std::uint64_t seed,
                                std::vector<double> offsets = {});

}  // namespace fixtures

}  // namespace ssg
