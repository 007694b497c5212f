#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace ssg {

// Sentinel for "no truncation" / "runs forever".
inline constexpr std::int64_t kInfiniteDim = std::numeric_limits<std::int64_t>::max();

// One geometric run of components: x_j = amp * ratio^(j - start) for
// start <= j <= end (indices 1-based, end inclusive, end == kInfiniteDim
// means an infinite tail, which requires |ratio| < 1).
struct GeomRun {
    std::int64_t start = 1;
    std::int64_t end = kInfiniteDim;
    double amp = 0.0;
    double ratio = 0.0;
};

// A square-summable sequence stored in closed form: a dense head plus a list
// of geometric runs.  All inner products, norms, and truncations are exact
// (up to roundoff), with no dependence on a truncation dimension.  This is
// what lets N -> infinity limits be computed rather than approximated.
class L2Vector {
public:
    L2Vector() = default;

    static L2Vector from_dense(std::vector<double> head);
    static L2Vector basis(std::int64_t j);  // e_j

    // Appends a run; drops it silently when amp == 0 or the range is empty.
    // Throws std::invalid_argument for an infinite run with |ratio| >= 1.
    void add_run(GeomRun run);

    double component(std::int64_t j) const;

    bool finite_support() const;
    // Largest index that can carry a nonzero component (kInfiniteDim if any
    // infinite run is present).
    std::int64_t support_bound() const;

    // this += c * u
    void axpy(double c, const L2Vector& u);
    L2Vector& operator*=(double c);

    // Exact restriction to coordinates 1..n (identity when n == kInfiniteDim).
    L2Vector truncated(std::int64_t n) const;
    // Exact restriction to coordinates n+1, n+2, ...
    L2Vector beyond(std::int64_t n) const;

    Eigen::VectorXd densify(std::int64_t n) const;

    double squared_norm() const;

    const std::vector<double>& head() const { return head_; }
    const std::vector<GeomRun>& runs() const { return runs_; }

    friend double inner(const L2Vector& a, const L2Vector& b);

private:
    std::vector<double> head_;   // components 1..head_.size()
    std::vector<GeomRun> runs_;  // additional geometric contributions
};

double inner(const L2Vector& a, const L2Vector& b);

}  // namespace ssg
