#include "ssg/l2vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssg {

namespace {

// amp * ratio^(j - start), valid for j >= start.
double run_value_at(const GeomRun& r, std::int64_t j) {
    return r.amp * std::pow(r.ratio, static_cast<double>(j - r.start));
}

// sum_{i=0}^{count-1} q^i; count == kInfiniteDim means the full series.
double geometric_sum(double q, std::int64_t count) {
    if (count == 0) return 0.0;
    if (count == kInfiniteDim) return 1.0 / (1.0 - q);
    if (q == 1.0) return static_cast<double>(count);
    return (1.0 - std::pow(q, static_cast<double>(count))) / (1.0 - q);
}

}  // namespace

L2Vector L2Vector::from_dense(std::vector<double> head) {
    L2Vector v;
    v.head_ = std::move(head);
    return v;
}

L2Vector L2Vector::basis(std::int64_t j) {
    if (j < 1) throw std::invalid_argument("L2Vector::basis: index must be >= 1");
    std::vector<double> head(static_cast<std::size_t>(j), 0.0);
    head.back() = 1.0;
    return from_dense(std::move(head));
}

void L2Vector::add_run(GeomRun run) {
    if (run.amp == 0.0 || run.end < run.start) return;
    if (run.end == kInfiniteDim && std::abs(run.ratio) >= 1.0)
        throw std::invalid_argument("L2Vector: infinite run needs |ratio| < 1");
    if (run.start < 1) throw std::invalid_argument("L2Vector: run start must be >= 1");
    runs_.push_back(run);
}

double L2Vector::component(std::int64_t j) const {
    if (j < 1) throw std::invalid_argument("L2Vector::component: index must be >= 1");
    double v = 0.0;
    if (j <= static_cast<std::int64_t>(head_.size())) v = head_[static_cast<std::size_t>(j - 1)];
    for (const auto& r : runs_)
        if (r.start <= j && j <= r.end) v += run_value_at(r, j);
    return v;
}

bool L2Vector::finite_support() const {
    for (const auto& r : runs_)
        if (r.end == kInfiniteDim) return false;
    return true;
}

std::int64_t L2Vector::support_bound() const {
    auto bound = static_cast<std::int64_t>(head_.size());
    for (const auto& r : runs_) {
        if (r.end == kInfiniteDim) return kInfiniteDim;
        bound = std::max(bound, r.end);
    }
    return bound;
}

void L2Vector::axpy(double c, const L2Vector& u) {
    if (c == 0.0) return;
    if (u.head_.size() > head_.size()) head_.resize(u.head_.size(), 0.0);
    for (std::size_t i = 0; i < u.head_.size(); ++i) head_[i] += c * u.head_[i];
    for (const auto& r : u.runs_) {
        GeomRun scaled = r;
        scaled.amp *= c;
        add_run(scaled);
    }
}

L2Vector& L2Vector::operator*=(double c) {
    for (auto& h : head_) h *= c;
    for (auto& r : runs_) r.amp *= c;
    return *this;
}

L2Vector L2Vector::truncated(std::int64_t n) const {
    if (n == kInfiniteDim) return *this;
    if (n < 0) throw std::invalid_argument("L2Vector::truncated: n must be >= 0");
    L2Vector out;
    out.head_.assign(head_.begin(),
                     head_.begin() + std::min<std::size_t>(head_.size(), static_cast<std::size_t>(n)));
    for (const auto& r : runs_) {
        if (r.start > n) continue;
        GeomRun cut = r;
        cut.end = std::min(cut.end, n);
        out.add_run(cut);
    }
    return out;
}

L2Vector L2Vector::beyond(std::int64_t n) const {
    if (n == kInfiniteDim) return L2Vector{};
    if (n < 0) throw std::invalid_argument("L2Vector::beyond: n must be >= 0");
    L2Vector out;
    out.head_ = head_;
    for (std::size_t i = 0; i < std::min<std::size_t>(head_.size(), static_cast<std::size_t>(n)); ++i)
        out.head_[i] = 0.0;
    for (const auto& r : runs_) {
        if (r.end <= n) continue;
        if (r.start > n) {
            out.add_run(r);
        } else {
            GeomRun cut = r;
            cut.start = n + 1;
            cut.amp = run_value_at(r, n + 1);
            out.add_run(cut);
        }
    }
    return out;
}

Eigen::VectorXd L2Vector::densify(std::int64_t n) const {
    if (n == kInfiniteDim || n < 0)
        throw std::invalid_argument("L2Vector::densify: n must be finite and >= 0");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    const auto head_n = std::min<std::int64_t>(n, static_cast<std::int64_t>(head_.size()));
    for (std::int64_t j = 0; j < head_n; ++j) out[j] = head_[static_cast<std::size_t>(j)];
    for (const auto& r : runs_) {
        if (r.start > n) continue;
        double v = r.amp;
        const std::int64_t stop = std::min(r.end, n);
        for (std::int64_t j = r.start; j <= stop; ++j) {
            out[j - 1] += v;
            v *= r.ratio;
        }
    }
    return out;
}

double L2Vector::squared_norm() const { return inner(*this, *this); }

double inner(const L2Vector& a, const L2Vector& b) {
    // Direct part: all indices covered by either dense head, streaming the run
    // values multiplicatively.
    const auto direct_len = static_cast<std::int64_t>(std::max(a.head_.size(), b.head_.size()));
    double total = 0.0;
    if (direct_len > 0) {
        std::vector<double> aval(a.runs_.size(), 0.0), bval(b.runs_.size(), 0.0);
        for (std::int64_t j = 1; j <= direct_len; ++j) {
            double av = (j <= static_cast<std::int64_t>(a.head_.size()))
                            ? a.head_[static_cast<std::size_t>(j - 1)]
                            : 0.0;
            double bv = (j <= static_cast<std::int64_t>(b.head_.size()))
                            ? b.head_[static_cast<std::size_t>(j - 1)]
                            : 0.0;
            for (std::size_t i = 0; i < a.runs_.size(); ++i) {
                const auto& r = a.runs_[i];
                if (j == r.start) aval[i] = r.amp;
                if (j >= r.start && j <= r.end) {
                    av += aval[i];
                    aval[i] *= r.ratio;
                }
            }
            for (std::size_t i = 0; i < b.runs_.size(); ++i) {
                const auto& r = b.runs_[i];
                if (j == r.start) bval[i] = r.amp;
                if (j >= r.start && j <= r.end) {
                    bv += bval[i];
                    bval[i] *= r.ratio;
                }
            }
            total += av * bv;
        }
    }

    // Beyond the heads only runs remain.  Split [direct_len+1, infinity) at
    // every run start/end so each piece sees a fixed set of active runs, then
    // use closed-form geometric sums on each piece.
    std::vector<std::int64_t> cuts;
    auto note = [&](std::int64_t c) {
        if (c > direct_len) cuts.push_back(c);
    };
    for (const auto& r : a.runs_) {
        note(r.start);
        if (r.end != kInfiniteDim) note(r.end + 1);
    }
    for (const auto& r : b.runs_) {
        note(r.start);
        if (r.end != kInfiniteDim) note(r.end + 1);
    }
    note(direct_len + 1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t c = 0; c < cuts.size(); ++c) {
        const std::int64_t seg_start = cuts[c];
        const std::int64_t seg_end = (c + 1 < cuts.size()) ? cuts[c + 1] - 1 : kInfiniteDim;
        const std::int64_t count =
            (seg_end == kInfiniteDim) ? kInfiniteDim : seg_end - seg_start + 1;
        for (const auto& ra : a.runs_) {
            if (ra.start > seg_start || ra.end < seg_start) continue;
            for (const auto& rb : b.runs_) {
                if (rb.start > seg_start || rb.end < seg_start) continue;
                const double ca = run_value_at(ra, seg_start);
                const double cb = run_value_at(rb, seg_start);
                total += ca * cb * geometric_sum(ra.ratio * rb.ratio, count);
            }
        }
    }
    return total;
}

}  // namespace ssg
