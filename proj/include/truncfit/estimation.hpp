#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "truncfit/distribution.hpp"
#include "truncfit/frequency_table.hpp"
#include "truncfit/optimizer.hpp"

namespace truncfit {

enum class Method { MinDv, AuxMoment, AuxML };

std::string_view method_name(Method method);

struct EstimationReport {
    Method method = Method::MinDv;
    std::vector<std::size_t> free_indices;
    std::vector<double> estimate;  ///< values of the free parameters, in free_indices order
    DistributionModel fitted = DistributionModel::poisson(1.0);
    /// MinDv: d_v at the estimate. AuxMoment: |moment residual|.
    /// AuxML: negative relative-frequency-weighted log-likelihood.
    double objective_at_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
    /// Largest per-coordinate |MinDv - Aux| difference, when both were run.
    std::optional<double> agreement_gap;
};

/// Bounds used when the caller gives none:
///   p in [1e-3, 1 - 1e-3], lambda in [1e-3, 10 max point],
///   m in [min - 3 span, max + 3 span], sigma / b / Weibull scale in [1e-3, 10 span],
///   shapes in [0.1, 100].
Interval default_bounds(Family family, std::size_t param_index, const FrequencyTable& table);

/// `config` with empty bounds filled from default_bounds.
OptimizerConfig resolve_config(const DistributionModel& tmpl, std::span<const std::size_t> free_indices,
                               const FrequencyTable& table, OptimizerConfig config);

/// Throws InvalidArgument unless 1 or 2 distinct free parameters are named
/// and each may vary (binomial trials are always fixed).
void check_free_indices(const DistributionModel& tmpl, std::span<const std::size_t> free_indices);

/// Minimum-d_v estimate of the free parameters of `tmpl`.
///
/// Requires positive counts and at least free_indices.size() + 1 points.
/// Parameter values where the model has no mass at some table point are
/// treated as infeasible; if all grid points are infeasible an OptimizerError
/// is thrown.
EstimationReport estimate_min_dv(const DistributionModel& tmpl, std::span<const std::size_t> free_indices,
                                 const FrequencyTable& table, const OptimizerConfig& config = {});

inline EstimationReport estimate_min_dv(const DistributionModel& tmpl, std::size_t free_index,
                                        const FrequencyTable& table, const OptimizerConfig& config = {}) {
    return estimate_min_dv(tmpl, std::span(&free_index, 1), table, config);
}

/// Midpoint-convexity check of each pair term
///   delta_ij(theta) = |C_ij exp(theta (T(y_i) - T(y_j))) - n_i / n_j|
/// in the natural parameter.
struct ConvexityViolation {
    std::size_t i = 0, j = 0;
    double theta1 = 0.0, theta2 = 0.0;
    double midpoint_value = 0.0;
    double chord_value = 0.0;
};

struct ConvexityReport {
    bool convex = true;
    std::size_t checks = 0;
    std::vector<ConvexityViolation> violations;
};

ConvexityReport convexity_probe(const ExpFamilyForm& form, const FrequencyTable& table,
                                std::span<const std::pair<double, double>> theta_pairs);

/// `count` uniform natural-parameter pairs in [lo, hi].
std::vector<std::pair<double, double>> random_theta_pairs(std::size_t count, Interval range, std::uint64_t seed);

}  // namespace truncfit
