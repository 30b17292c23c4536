#pragma once

#include <cstddef>
#include <span>

#include "truncfit/distribution.hpp"
#include "truncfit/frequency_table.hpp"

namespace truncfit {

/// Distance of proportional variations.
///
/// Sum over ordered pairs (i, j), i != j, of |a_i/a_j - b_i/b_j|. Both
/// directions of each pair are included, so the distance is symmetric in
/// its two arguments; the i == j terms would only add zeros.
struct DvValue {
    double value = 0.0;
    std::size_t pair_count = 0;  ///< m (m - 1) for m support points
};

/// Distance between two empirical distributions on the same points.
DvValue dv_tables(const EmpiricalTruncated& p, const EmpiricalTruncated& q);

/// Distance between a table and a model evaluated at the table's points.
/// Model ratios are exp(log f_i - log f_j). Throws SupportMismatch when the
/// model density is below 1e-300 at a table point and InvalidArgument on a
/// zero count.
DvValue dv_model(const DistributionModel& model, const FrequencyTable& table);

/// Core kernel on precomputed log densities; no validation.
double dv_from_log_density(std::span<const double> log_density, std::span<const double> counts);

/// Fills `out` with log densities at `points`. Returns the index of the first
/// point whose density is below 1e-300, or points.size() if there is none.
std::size_t log_densities(const DistributionModel& model, std::span<const double> points, std::span<double> out);

/// Parts of the distance for an observed/unobserved split of the points:
/// pairs within the observed part, pairs within the unobserved part, and the
/// cross pairs in both directions.
struct DvDecomposition {
    double observed = 0.0;
    double unobserved = 0.0;
    double cross = 0.0;

    double total() const noexcept { return observed + unobserved + cross; }
};

DvDecomposition dv_decompose(const FrequencyTable& full_table, const Truncation& observed,
                             const DistributionModel& model);

}  // namespace truncfit
