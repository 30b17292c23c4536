#pragma once

#include <functional>
#include <span>
#include <vector>

#include "truncfit/distribution.hpp"
#include "truncfit/estimation.hpp"
#include "truncfit/frequency_table.hpp"

namespace truncfit {

/// Parent density restricted to a truncation's points and renormalized:
/// h(u_i) = f(u_i) / sum_j f(u_j).
struct AuxiliaryDistribution {
    std::vector<double> points;
    std::vector<double> values;

    double mean() const;
};

using DensityFunction = std::function<double(double)>;

/// Throws SupportMismatch if the model density is below 1e-300 at a point.
AuxiliaryDistribution auxiliary(const DistributionModel& model, std::span<const double> points);

/// Same construction for an arbitrary nonnegative mass function.
AuxiliaryDistribution auxiliary(const DensityFunction& density, std::span<const double> points);

/// Substitution estimate of one parameter: solves
///   sum_i T(u_i) h(u_i, theta) = sum_i T(u_i) n_i / n_t
/// by bisection, with T the sufficient statistic of the one-parameter
/// exponential form when there is one and the identity otherwise.
/// Throws NoRootError when the equation has no sign change in the bounds.
EstimationReport estimate_aux_moment(const DistributionModel& tmpl, std::size_t free_index,
                                     const FrequencyTable& table, const OptimizerConfig& config = {});

/// Maximizes sum_i (n_i / n_t) log h(u_i, theta) over one or two free
/// parameters with the grid-then-refine minimizer.
EstimationReport estimate_aux_ml(const DistributionModel& tmpl, std::span<const std::size_t> free_indices,
                                 const FrequencyTable& table, const OptimizerConfig& config = {});

inline EstimationReport estimate_aux_ml(const DistributionModel& tmpl, std::size_t free_index,
                                        const FrequencyTable& table, const OptimizerConfig& config = {}) {
    return estimate_aux_ml(tmpl, std::span(&free_index, 1), table, config);
}

/// Proportional allocation: predicted count n_t f(x) / sum_observed f(u_i)
/// for each missing point x.
std::vector<double> allocate_missing(const DistributionModel& model, const FrequencyTable& table,
                                     std::span<const double> missing_points);

/// Rejects continuous-family tables whose point spacings are not whole
/// multiples of a common class width (2% slack for rounded mid-classes).
void check_equal_widths(const DistributionModel& model, const FrequencyTable& table);

}  // namespace truncfit
