#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ssg/l2vector.hpp"

namespace ssg {

// Optional geometric tail of a constraint direction, starting right after the
// prefix: component (D + 1 + i) = alpha * ratio^i.
struct GeomTailSpec {
    double alpha = 0.0;
    double ratio = 0.0;
};

// One constraint direction w: a finite prefix plus an optional geometric
// tail.  The tail is what makes the truncations (w)_(N) differ from w at
// every finite N, so that the N -> infinity limits are genuine.
struct DirectionVector {
    std::vector<double> prefix;
    std::optional<GeomTailSpec> tail;

    L2Vector to_l2() const;
    double squared_norm() const;  // closed form: sum prefix^2 + alpha^2/(1-r^2)
};

// The affine subspace L = { v : <v, w_i> = p_i, i = 1..m } together with the
// marginal dimension k.  Admission requires the directions to be orthonormal
// in l2 within kOrthonormalityTol; violating inputs are rejected, never
// silently repaired.
class AffineConstraintSet {
public:
    static constexpr double kOrthonormalityTol = 1e-8;

    AffineConstraintSet(std::vector<DirectionVector> directions, std::vector<double> offsets,
                        int k);

    int k() const { return k_; }
    int m() const { return static_cast<int>(directions_.size()); }

    const std::vector<DirectionVector>& directions() const { return directions_; }
    const L2Vector& direction_l2(int a) const { return l2_[static_cast<std::size_t>(a)]; }
    const std::vector<double>& offsets() const { return offsets_; }

    static AffineConstraintSet from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

private:
    std::vector<DirectionVector> directions_;
    std::vector<L2Vector> l2_;
    std::vector<double> offsets_;
    int k_ = 0;
};

}  // namespace ssg
