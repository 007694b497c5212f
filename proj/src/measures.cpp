#include "ssg/measures.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ssg/errors.hpp"

namespace ssg {

namespace {
constexpr double kPi = std::numbers::pi;

void require_spd(const Eigen::LLT<Eigen::MatrixXd>& llt, const char* where) {
    if (llt.info() != Eigen::Success)
        throw NotTransversal(std::string(where) + ": covariance not positive definite");
}
}  // namespace

double log_surface_constant(std::int64_t j) {
    if (j < 0) throw std::invalid_argument("surface constant needs j >= 0");
    const double h = 0.5 * static_cast<double>(j + 1);
    return std::log(2.0) + h * std::log(kPi) - std::lgamma(h);
}

double surface_constant(std::int64_t j) { return std::exp(log_surface_constant(j)); }

double constant_ratio(std::int64_t N, int k, int m) {
    if (N <= k + m + 2) throw std::invalid_argument("constant_ratio needs N > k + m + 2");
    return std::exp(log_surface_constant(N - 1 - k - m) - log_surface_constant(N - 1 - m) -
                    0.5 * k * std::log(static_cast<double>(N)));
}

SliceDensity::SliceDensity(std::int64_t N, int k, int m, double radius, Eigen::VectorXd mean_k,
                           Eigen::MatrixXd cov_k)
    : N_(N), k_(k), m_(m), radius_(radius), mean_k_(std::move(mean_k)), cov_k_(std::move(cov_k)) {
    if (N_ < k_ + m_ + 4)
        throw std::invalid_argument("SliceDensity needs N >= k + m + 4 (exponent >= 1)");
    if (radius_ <= 0.0) throw EmptySlice("SliceDensity: nonpositive radius");
    cov_llt_.compute(cov_k_);
    require_spd(cov_llt_, "SliceDensity");
    det_factor_ = cov_llt_.matrixL().determinant();
    log_norm_const_ = log_surface_constant(d() - k_ - m_) - log_surface_constant(d() - m_) -
                      k_ * std::log(radius_) - std::log(det_factor_);
}

double SliceDensity::quadratic_form(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd r = x - mean_k_;
    return r.dot(cov_llt_.solve(r));
}

double SliceDensity::box_half_width(int i) const {
    return radius_ * std::sqrt(cov_k_(i, i));
}

SliceDensity slice_density(const AffineConstraintSet& L, std::int64_t N) {
    const double sq = closest_point_sq_norm(L, N);
    const double rad2 = static_cast<double>(N) - sq;
    if (rad2 <= 0.0) throw EmptySlice("slice empty at N = " + std::to_string(N));
    const Eigen::VectorXd mean = closest_point(L, N).densify(L.k());
    return SliceDensity(N, L.k(), L.m(), std::sqrt(rad2), mean, marginal_covariance(L, N));
}

SliceDensity slice_density(const TruncatedSlice& S) {
    return SliceDensity(S.N(), S.k(), S.m(), S.radius(), S.mean_k(), S.cov_k());
}

double density_muN(const SliceDensity& D, const Eigen::VectorXd& x) {
    const double a2 = D.radius() * D.radius();
    const double u = D.quadratic_form(x) / a2;
    if (u >= 1.0) return 0.0;
    return std::exp(D.log_norm_const() + D.exponent() * std::log1p(-u));
}

double density_muInf(const GaussianLimit& G, const Eigen::VectorXd& x) {
    const auto k = G.mean.size();
    Eigen::LLT<Eigen::MatrixXd> llt(G.cov);
    require_spd(llt, "density_muInf");
    const Eigen::VectorXd r = x - G.mean;
    const double qf = r.dot(llt.solve(r));
    const double det_factor = llt.matrixL().determinant();
    return std::exp(-0.5 * qf - 0.5 * k * std::log(2.0 * kPi)) / det_factor;
}

std::complex<double> charfn_muInf(const GaussianLimit& G, const Eigen::VectorXd& t) {
    const double phase = t.dot(G.mean);
    const double decay = 0.5 * t.dot(G.cov * t);
    return std::exp(std::complex<double>(-decay, phase));
}

std::complex<double> charfn_muL(const AffineConstraintSet& L, const L2Vector& t) {
    if (!t.finite_support())
        throw std::invalid_argument("charfn_muL needs a finitely supported probe");
    const L2Vector z0 = closest_point(L, kInfiniteDim);
    const double phase = inner(t, z0);
    // |P_{ker Q} t|^2 with P_{ker Q} t = t - sum_a <t, u_a> u_a.
    const auto us = orthonormalized_directions(L, kInfiniteDim);
    L2Vector proj = t;
    for (const auto& u : us) proj.axpy(-inner(t, u), u);
    return std::exp(std::complex<double>(-0.5 * proj.squared_norm(), phase));
}

// --- TestFunction -----------------------------------------------------------

TestFunction::TestFunction(Kind kind, Eigen::VectorXd a, Eigen::VectorXd b, double s,
                           std::vector<int> powers)
    : kind_(kind), a_(std::move(a)), b_(std::move(b)), s_(s), powers_(std::move(powers)) {}

TestFunction TestFunction::cosine(Eigen::VectorXd t) {
    return TestFunction(Kind::CosineCharacter, std::move(t), {}, 0.0, {});
}

TestFunction TestFunction::sine(Eigen::VectorXd t) {
    return TestFunction(Kind::SineCharacter, std::move(t), {}, 0.0, {});
}

TestFunction TestFunction::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box indicator: lo/hi size mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw std::invalid_argument("box indicator: lo > hi");
    return TestFunction(Kind::BoxIndicator, std::move(lo), std::move(hi), 0.0, {});
}

TestFunction TestFunction::bump(Eigen::VectorXd center, double width) {
    if (width <= 0.0) throw std::invalid_argument("gaussian bump: width must be positive");
    return TestFunction(Kind::GaussianBump, std::move(center), {}, width, {});
}

TestFunction TestFunction::clamped_monomial(std::vector<int> powers, double clamp) {
    if (clamp <= 0.0) throw std::invalid_argument("clamped monomial: clamp must be positive");
    return TestFunction(Kind::ClampedMonomial, {}, {}, clamp, std::move(powers));
}

TestFunction TestFunction::constant(double c) {
    return TestFunction(Kind::Constant, {}, {}, c, {});
}

double TestFunction::operator()(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::CosineCharacter:
            return std::cos(a_.dot(x));
        case Kind::SineCharacter:
            return std::sin(a_.dot(x));
        case Kind::BoxIndicator:
            for (Eigen::Index i = 0; i < a_.size(); ++i)
                if (x[i] < a_[i] || x[i] > b_[i]) return 0.0;
            return 1.0;
        case Kind::GaussianBump:
            return std::exp(-(x - a_).squaredNorm() / (2.0 * s_ * s_));
        case Kind::ClampedMonomial: {
            double v = 1.0;
            for (std::size_t i = 0; i < powers_.size(); ++i)
                v *= std::pow(x[static_cast<Eigen::Index>(i)], powers_[i]);
            return std::clamp(v, -s_, s_);
        }
        case Kind::Constant:
            return s_;
    }
    return 0.0;
}

double TestFunction::bound() const {
    switch (kind_) {
        case Kind::CosineCharacter:
        case Kind::SineCharacter:
        case Kind::BoxIndicator:
        case Kind::GaussianBump:
            return 1.0;
        case Kind::ClampedMonomial:
            return s_;
        case Kind::Constant:
            return std::abs(s_);
    }
    return 0.0;
}

namespace {
Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> vec_to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}
}  // namespace

TestFunction TestFunction::from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "cosine_character") return cosine(vec_from_json(j.at("t")));
    if (kind == "sine_character") return sine(vec_from_json(j.at("t")));
    if (kind == "box_indicator") return box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
    if (kind == "gaussian_bump")
        return bump(vec_from_json(j.at("center")), j.at("width").get<double>());
    if (kind == "clamped_monomial")
        return clamped_monomial(j.at("powers").get<std::vector<int>>(),
                                j.at("clamp").get<double>());
    if (kind == "constant") return constant(j.at("value").get<double>());
    throw std::invalid_argument("unknown test function kind: " + kind);
}

nlohmann::json TestFunction::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case Kind::CosineCharacter:
            j["kind"] = "cosine_character";
            j["t"] = vec_to_std(a_);
            break;
        case Kind::SineCharacter:
            j["kind"] = "sine_character";
            j["t"] = vec_to_std(a_);
            break;
        case Kind::BoxIndicator:
            j["kind"] = "box_indicator";
            j["lo"] = vec_to_std(a_);
            j["hi"] = vec_to_std(b_);
            break;
        case Kind::GaussianBump:
            j["kind"] = "gaussian_bump";
            j["center"] = vec_to_std(a_);
            j["width"] = s_;
            break;
        case Kind::ClampedMonomial:
            j["kind"] = "clamped_monomial";
            j["powers"] = powers_;
            j["clamp"] = s_;
            break;
        case Kind::Constant:
            j["kind"] = "constant";
            j["value"] = s_;
            break;
    }
    return j;
}

std::optional<double> gaussian_expectation(const GaussianLimit& G, const TestFunction& phi) {
    switch (phi.kind()) {
        case TestFunction::Kind::Constant:
            return phi.scalar();
        case TestFunction::Kind::CosineCharacter:
            return charfn_muInf(G, phi.vec_a()).real();
        case TestFunction::Kind::SineCharacter:
            return charfn_muInf(G, phi.vec_a()).imag();
        case TestFunction::Kind::BoxIndicator: {
            // Factorizes only for diagonal covariance.
            const auto k = G.cov.rows();
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j)
                    if (i != j && std::abs(G.cov(i, j)) > 0.0) return std::nullopt;
            double prob = 1.0;
            for (Eigen::Index i = 0; i < k; ++i) {
                const double sigma = std::sqrt(G.cov(i, i));
                const double lo = (phi.vec_a()[i] - G.mean[i]) / (sigma * std::sqrt(2.0));
                const double hi = (phi.vec_b()[i] - G.mean[i]) / (sigma * std::sqrt(2.0));
                prob *= 0.5 * (std::erf(hi) - std::erf(lo));
            }
            return prob;
        }
        case TestFunction::Kind::GaussianBump: {
            // E exp(-|X - c|^2 / (2 s^2)) for X ~ N(mean, cov):
            // det(I + cov/s^2)^{-1/2} exp(-(mean-c)^T (cov + s^2 I)^{-1} (mean-c) / 2)
            const auto k = G.cov.rows();
            const double s2 = phi.scalar() * phi.scalar();
            const Eigen::MatrixXd A = G.cov + s2 * Eigen::MatrixXd::Identity(k, k);
            Eigen::LLT<Eigen::MatrixXd> llt(A);
            require_spd(llt, "gaussian_expectation(bump)");
            const Eigen::VectorXd r = G.mean - phi.vec_a();
            const double qf = r.dot(llt.solve(r));
            const Eigen::MatrixXd M =
                Eigen::MatrixXd::Identity(k, k) + G.cov / s2;
            return std::exp(-0.5 * qf) / std::sqrt(M.determinant());
        }
        case TestFunction::Kind::ClampedMonomial:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace ssg
