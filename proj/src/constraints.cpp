#include "ssg/constraints.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ssg/errors.hpp"

namespace ssg {

L2Vector DirectionVector::to_l2() const {
    L2Vector v = L2Vector::from_dense(prefix);
    if (tail) {
        if (std::abs(tail->ratio) >= 1.0)
            throw InvalidConstraintSet("direction tail needs |ratio| < 1");
        v.add_run({static_cast<std::int64_t>(prefix.size()) + 1, kInfiniteDim, tail->alpha,
                   tail->ratio});
    }
    return v;
}

double DirectionVector::squared_norm() const {
    double s = 0.0;
    for (double c : prefix) s += c * c;
    if (tail) s += tail->alpha * tail->alpha / (1.0 - tail->ratio * tail->ratio);
    return s;
}

AffineConstraintSet::AffineConstraintSet(std::vector<DirectionVector> directions,
                                         std::vector<double> offsets, int k)
    : directions_(std::move(directions)), offsets_(std::move(offsets)), k_(k) {
    if (directions_.empty()) throw InvalidConstraintSet("need at least one constraint direction");
    if (offsets_.size() != directions_.size())
        throw InvalidConstraintSet("offsets/directions size mismatch");
    if (k_ < 1) throw InvalidConstraintSet("marginal dimension k must be >= 1");

    l2_.reserve(directions_.size());
    for (const auto& d : directions_) l2_.push_back(d.to_l2());

    for (std::size_t a = 0; a < l2_.size(); ++a) {
        for (std::size_t b = a; b < l2_.size(); ++b) {
            const double g = inner(l2_[a], l2_[b]);
            const double target = (a == b) ? 1.0 : 0.0;
            if (std::abs(g - target) > kOrthonormalityTol)
                throw InvalidConstraintSet("directions not orthonormal: |<w_" +
                                           std::to_string(a + 1) + ", w_" + std::to_string(b + 1) +
                                           "> - " + std::to_string(target) + "| = " +
                                           std::to_string(std::abs(g - target)));
        }
    }
}

AffineConstraintSet AffineConstraintSet::from_json(const nlohmann::json& j) {
    const int k = j.at("k").get<int>();
    std::vector<DirectionVector> dirs;
    std::vector<double> offsets;
    for (const auto& c : j.at("constraints")) {
        DirectionVector d;
        d.prefix = c.at("prefix").get<std::vector<double>>();
        if (c.contains("tail") && !c.at("tail").is_null()) {
            GeomTailSpec t;
            t.alpha = c.at("tail").at("alpha").get<double>();
            t.ratio = c.at("tail").at("ratio").get<double>();
            d.tail = t;
        }
        dirs.push_back(std::move(d));
        offsets.push_back(c.at("offset").get<double>());
    }
    return AffineConstraintSet(std::move(dirs), std::move(offsets), k);
}

nlohmann::json AffineConstraintSet::to_json() const {
    nlohmann::json j;
    j["k"] = k_;
    j["constraints"] = nlohmann::json::array();
    for (std::size_t a = 0; a < directions_.size(); ++a) {
        nlohmann::json c;
        c["prefix"] = directions_[a].prefix;
        if (directions_[a].tail)
            c["tail"] = {{"alpha", directions_[a].tail->alpha},
                         {"ratio", directions_[a].tail->ratio}};
        else
            c["tail"] = nullptr;
        c["offset"] = offsets_[a];
        j["constraints"].push_back(std::move(c));
    }
    return j;
}

}  // namespace ssg
