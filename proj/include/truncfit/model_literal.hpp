#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "truncfit/distribution.hpp"

namespace truncfit {

/// A family with some parameters pinned and the rest left free.
///
/// Literal syntax: `binomial(n=10,p=0.3)`, `poisson(lambda=3)`,
/// `normal(m=0,sigma=1)`, `gamma(a=7,b=3)`, `weibull(shape=1.2,scale=1.5)`.
/// Case-insensitive, whitespace-tolerant. Omitted parameters are free.
struct ModelTemplate {
    Family family;
    std::vector<std::optional<double>> params;

    std::vector<std::size_t> free_indices() const;

    /// Model with free slots filled by a valid placeholder value.
    DistributionModel instantiate() const;
};

ModelTemplate parse_model_template(std::string_view text);

/// Parses a fully specified model; throws ParseError if a parameter is missing.
DistributionModel parse_model(std::string_view text);

/// Inverse of parse_model, e.g. "gamma(a=7,b=3)".
std::string format_model(const DistributionModel& model);

}  // namespace truncfit
