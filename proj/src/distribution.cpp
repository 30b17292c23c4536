#include "truncfit/distribution.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "truncfit/error.hpp"
#include "truncfit/rng.hpp"

namespace truncfit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 2> kBinomialNames{"n", "p"};
constexpr std::array<std::string_view, 1> kPoissonNames{"lambda"};
constexpr std::array<std::string_view, 2> kNormalNames{"m", "sigma"};
constexpr std::array<std::string_view, 2> kGammaNames{"a", "b"};
constexpr std::array<std::string_view, 2> kWeibullNames{"shape", "scale"};

bool is_integer(double x) noexcept { return std::isfinite(x) && x == std::floor(x); }

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::string_view family_name(Family family) {
    switch (family) {
        case Family::Binomial: return "binomial";
        case Family::Poisson: return "poisson";
        case Family::Normal: return "normal";
        case Family::Gamma: return "gamma";
        case Family::Weibull: return "weibull";
    }
    return "unknown";
}

std::size_t param_count(Family family) noexcept { return param_names(family).size(); }

std::span<const std::string_view> param_names(Family family) noexcept {
    switch (family) {
        case Family::Binomial: return kBinomialNames;
        case Family::Poisson: return kPoissonNames;
        case Family::Normal: return kNormalNames;
        case Family::Gamma: return kGammaNames;
        case Family::Weibull: return kWeibullNames;
    }
    return {};
}

std::size_t param_index(Family family, std::string_view name) {
    auto names = param_names(family);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw InvalidArgument("unknown parameter '" + std::string(name) + "' for family " +
                          std::string(family_name(family)));
}

bool is_positive_param(Family family, std::size_t i) noexcept {
    switch (family) {
        case Family::Binomial: return false;
        case Family::Poisson: return i == 0;
        case Family::Normal: return i == 1;
        case Family::Gamma:
        case Family::Weibull: return true;
    }
    return false;
}

bool params_valid(Family family, std::span<const double> p) noexcept {
    if (p.size() != param_count(family)) return false;
    for (double v : p) {
        if (!std::isfinite(v)) return false;
    }
    switch (family) {
        case Family::Binomial: return is_integer(p[0]) && p[0] >= 1.0 && p[1] > 0.0 && p[1] < 1.0;
        case Family::Poisson: return p[0] > 0.0;
        case Family::Normal: return p[1] > 0.0;
        case Family::Gamma:
        case Family::Weibull: return p[0] > 0.0 && p[1] > 0.0;
    }
    return false;
}

DistributionModel::DistributionModel(Family family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    if (!params_valid(family_, params_)) {
        std::ostringstream os;
        os << "invalid parameters for " << family_name(family_) << ":";
        for (double v : params_) os << ' ' << v;
        throw InvalidArgument(os.str());
    }
}

DistributionModel DistributionModel::with_param(std::size_t i, double value) const {
    auto p = params_;
    p.at(i) = value;
    return {family_, std::move(p)};
}

bool DistributionModel::is_discrete() const noexcept {
    return family_ == Family::Binomial || family_ == Family::Poisson;
}

SupportKind DistributionModel::support() const noexcept {
    switch (family_) {
        case Family::Binomial: return SupportKind::IntegerRange;
        case Family::Poisson: return SupportKind::NonNegativeIntegers;
        case Family::Normal: return SupportKind::RealLine;
        case Family::Gamma:
        case Family::Weibull: return SupportKind::NonNegativeReals;
    }
    return SupportKind::RealLine;
}

bool DistributionModel::in_support(double x) const noexcept {
    if (!std::isfinite(x)) return false;
    switch (family_) {
        case Family::Binomial: return is_integer(x) && x >= 0.0 && x <= params_[0];
        case Family::Poisson: return is_integer(x) && x >= 0.0;
        case Family::Normal: return true;
        case Family::Gamma:
        case Family::Weibull: return x >= 0.0;
    }
    return false;
}

double DistributionModel::log_density(double x) const noexcept {
    if (!in_support(x)) return kNegInf;
    const auto& p = params_;
    switch (family_) {
        case Family::Binomial:
            return log_choose(p[0], x) + x * std::log(p[1]) + (p[0] - x) * std::log1p(-p[1]);
        case Family::Poisson:
            return x * std::log(p[0]) - p[0] - std::lgamma(x + 1.0);
        case Family::Normal: {
            const double z = (x - p[0]) / p[1];
            return -0.5 * z * z - std::log(p[1]) - 0.5 * std::log(2.0 * std::numbers::pi);
        }
        case Family::Gamma: {
            const double a = p[0], b = p[1];
            if (x == 0.0) {
                if (a < 1.0) return std::numeric_limits<double>::infinity();
                return a == 1.0 ? -std::log(b) : kNegInf;
            }
            return (a - 1.0) * std::log(x) - x / b - a * std::log(b) - std::lgamma(a);
        }
        case Family::Weibull: {
            const double k = p[0], s = p[1];
            if (x == 0.0) {
                if (k < 1.0) return std::numeric_limits<double>::infinity();
                return k == 1.0 ? -std::log(s) : kNegInf;
            }
            const double z = x / s;
            return std::log(k / s) + (k - 1.0) * std::log(z) - std::pow(z, k);
        }
    }
    return kNegInf;
}

double DistributionModel::density(double x) const noexcept { return std::exp(log_density(x)); }

double DistributionModel::mean() const noexcept {
    const auto& p = params_;
    switch (family_) {
        case Family::Binomial: return p[0] * p[1];
        case Family::Poisson: return p[0];
        case Family::Normal: return p[0];
        case Family::Gamma: return p[0] * p[1];
        case Family::Weibull: return p[1] * std::tgamma(1.0 + 1.0 / p[0]);
    }
    return 0.0;
}

double DistributionModel::variance() const noexcept {
    const auto& p = params_;
    switch (family_) {
        case Family::Binomial: return p[0] * p[1] * (1.0 - p[1]);
        case Family::Poisson: return p[0];
        case Family::Normal: return p[1] * p[1];
        case Family::Gamma: return p[0] * p[1] * p[1];
        case Family::Weibull: {
            const double g1 = std::tgamma(1.0 + 1.0 / p[0]);
            const double g2 = std::tgamma(1.0 + 2.0 / p[0]);
            return p[1] * p[1] * (g2 - g1 * g1);
        }
    }
    return 0.0;
}

// Sampling ------------------------------------------------------------------

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

double Rng::gamma(double shape, double scale) {
    if (shape < 1.0) {
        const double boost = std::pow(uniform(), 1.0 / shape);
        return gamma(shape + 1.0, scale) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v * scale;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

namespace {

// Inverse CDF by sequential search from 0; the mass at each k is evaluated in
// log space so large rates do not underflow the first terms permanently.
double discrete_inverse_cdf(const DistributionModel& model, double u, double upper) {
    double cumulative = 0.0;
    double k = 0.0;
    for (;; k += 1.0) {
        cumulative += model.density(k);
        if (u <= cumulative || k >= upper) return k;
    }
}

}  // namespace

double draw(const DistributionModel& model, Rng& rng) {
    const auto& p = model.params();
    switch (model.family()) {
        case Family::Binomial:
            return discrete_inverse_cdf(model, rng.uniform(), p[0]);
        case Family::Poisson: {
            // Mass beyond mean + 40 sd (plus slack) is below double resolution.
            const double upper = std::ceil(p[0] + 40.0 * std::sqrt(p[0]) + 50.0);
            return discrete_inverse_cdf(model, rng.uniform(), upper);
        }
        case Family::Normal:
            return p[0] + p[1] * rng.normal();
        case Family::Gamma:
            return rng.gamma(p[0], p[1]);
        case Family::Weibull:
            return p[1] * std::pow(-std::log(rng.uniform()), 1.0 / p[0]);
    }
    return 0.0;
}

std::vector<double> sample(const DistributionModel& model, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw InvalidArgument("sample: count must be positive");
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(draw(model, rng));
    return out;
}

// Exponential-family form -----------------------------------------------------

bool has_exp_family_form(Family family, std::size_t i) noexcept {
    switch (family) {
        case Family::Binomial: return i == 1;
        case Family::Poisson: return i == 0;
        case Family::Normal: return i == 0;
        case Family::Gamma: return i == 1;
        case Family::Weibull: return false;
    }
    return false;
}

ExpFamilyForm::ExpFamilyForm(const DistributionModel& model, std::size_t free_param_index)
    : model_(model), free_index_(free_param_index) {
    if (!has_exp_family_form(model.family(), free_param_index)) {
        const auto names = param_names(model.family());
        const std::string pname =
            free_param_index < names.size() ? std::string(names[free_param_index]) : "#" + std::to_string(free_param_index);
        throw UnsupportedForm("no one-parameter exponential form for " +
                              std::string(family_name(model.family())) + " with free parameter " + pname);
    }
}

double ExpFamilyForm::log_base(double x) const {
    const auto& p = model_.params();
    switch (model_.family()) {
        case Family::Binomial: return log_choose(p[0], x);
        case Family::Poisson: return -std::lgamma(x + 1.0);
        case Family::Normal:
            return -0.5 * x * x / (p[1] * p[1]) - std::log(p[1]) - 0.5 * std::log(2.0 * std::numbers::pi);
        case Family::Gamma: return (p[0] - 1.0) * std::log(x) - std::lgamma(p[0]);
        case Family::Weibull: break;
    }
    return kNegInf;
}

double ExpFamilyForm::statistic(double x) const {
    switch (model_.family()) {
        case Family::Binomial:
        case Family::Poisson: return x;
        case Family::Normal: return x / (model_.param(1) * model_.param(1));
        case Family::Gamma: return -x;
        case Family::Weibull: break;
    }
    return 0.0;
}

double ExpFamilyForm::log_normalizer(double theta) const {
    const auto& p = model_.params();
    switch (model_.family()) {
        case Family::Binomial: return p[0] * std::log1p(std::exp(theta));
        case Family::Poisson: return std::exp(theta);
        case Family::Normal: return 0.5 * theta * theta / (p[1] * p[1]);
        case Family::Gamma: return -p[0] * std::log(theta);
        case Family::Weibull: break;
    }
    return 0.0;
}

double ExpFamilyForm::to_natural(double v) const {
    switch (model_.family()) {
        case Family::Binomial: return std::log(v / (1.0 - v));
        case Family::Poisson: return std::log(v);
        case Family::Normal: return v;
        case Family::Gamma: return 1.0 / v;
        case Family::Weibull: break;
    }
    return 0.0;
}

double ExpFamilyForm::from_natural(double theta) const {
    switch (model_.family()) {
        case Family::Binomial: return 1.0 / (1.0 + std::exp(-theta));
        case Family::Poisson: return std::exp(theta);
        case Family::Normal: return theta;
        case Family::Gamma: return 1.0 / theta;
        case Family::Weibull: break;
    }
    return 0.0;
}

double ExpFamilyForm::reconstruct_density(double x) const {
    if (!model_.in_support(x)) return 0.0;
    const double theta = natural_parameter();
    return std::exp(log_base(x) + theta * statistic(x) - log_normalizer(theta));
}

ExpFamilyForm exp_family_form(const DistributionModel& model, std::size_t free_param_index) {
    return ExpFamilyForm(model, free_param_index);
}

}  // namespace truncfit
