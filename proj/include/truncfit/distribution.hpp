#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace truncfit {

enum class Family { Binomial, Poisson, Normal, Gamma, Weibull };

enum class SupportKind { IntegerRange, NonNegativeIntegers, RealLine, NonNegativeReals };

std::string_view family_name(Family family);

/// A member of one of the supported parametric families.
///
/// Parameter order per family:
///   Binomial  {trials n, success probability p}
///   Poisson   {rate lambda}
///   Normal    {mean m, standard deviation sigma}
///   Gamma     {shape a, scale b}   density x^(a-1) exp(-x/b) / (b^a Gamma(a))
///   Weibull   {shape, scale}
class DistributionModel {
public:
    /// Throws InvalidArgument when the parameters are outside the family's space.
    DistributionModel(Family family, std::vector<double> params);

    static DistributionModel binomial(int trials, double p) { return {Family::Binomial, {double(trials), p}}; }
    static DistributionModel poisson(double lambda) { return {Family::Poisson, {lambda}}; }
    static DistributionModel normal(double mean, double sd) { return {Family::Normal, {mean, sd}}; }
    static DistributionModel gamma(double shape, double scale) { return {Family::Gamma, {shape, scale}}; }
    static DistributionModel weibull(double shape, double scale) { return {Family::Weibull, {shape, scale}}; }

    Family family() const noexcept { return family_; }
    const std::vector<double>& params() const noexcept { return params_; }
    double param(std::size_t i) const { return params_.at(i); }

    /// Copy with parameter i replaced; throws InvalidArgument if invalid.
    DistributionModel with_param(std::size_t i, double value) const;

    bool is_discrete() const noexcept;
    SupportKind support() const noexcept;
    bool in_support(double x) const noexcept;

    /// log f(x); -infinity off the support.
    double log_density(double x) const noexcept;
    double density(double x) const noexcept;

    double mean() const noexcept;
    double variance() const noexcept;

    bool operator==(const DistributionModel&) const = default;

private:
    Family family_;
    std::vector<double> params_;
};

/// Whether `params` form a valid parameter vector for `family`.
bool params_valid(Family family, std::span<const double> params) noexcept;

std::size_t param_count(Family family) noexcept;

/// Canonical parameter names as used in model literals ("n", "p", "lambda", ...).
std::span<const std::string_view> param_names(Family family) noexcept;

/// Index of a named parameter; throws InvalidArgument if the name is unknown.
std::size_t param_index(Family family, std::string_view name);

/// Whether parameter i is a scale, rate or standard deviation (strictly positive).
bool is_positive_param(Family family, std::size_t i) noexcept;

/// Deterministic draws of `count` variates; see Rng for the algorithms.
std::vector<double> sample(const DistributionModel& model, std::size_t count, std::uint64_t seed);

class Rng;
double draw(const DistributionModel& model, Rng& rng);

/// One-parameter exponential form f(x) = K(x) exp(theta T(x) - A(theta))
/// obtained by freeing one parameter and holding the rest fixed.
///
/// Supported: binomial p (theta = logit p), Poisson lambda (theta = log lambda),
/// normal mean with known sigma (theta = m, T = x/sigma^2), gamma scale with
/// known shape (theta = 1/b, T = -x).
class ExpFamilyForm {
public:
    ExpFamilyForm(const DistributionModel& model, std::size_t free_param_index);

    const DistributionModel& model() const noexcept { return model_; }
    std::size_t free_param_index() const noexcept { return free_index_; }

    double log_base(double x) const;     ///< log K(x)
    double statistic(double x) const;    ///< T(x)
    double log_normalizer(double theta) const;  ///< A(theta)

    double natural_parameter() const { return to_natural(model_.param(free_index_)); }
    double to_natural(double param_value) const;
    double from_natural(double theta) const;

    /// K(x) exp(theta T(x) - A(theta)) at the model's own theta.
    double reconstruct_density(double x) const;

private:
    DistributionModel model_;
    std::size_t free_index_;
};

ExpFamilyForm exp_family_form(const DistributionModel& model, std::size_t free_param_index);

/// Whether exp_family_form(model, i) would succeed.
bool has_exp_family_form(Family family, std::size_t free_param_index) noexcept;

}  // namespace truncfit
