#pragma once

#include <cstdint>

#include "truncfit/distribution.hpp"
#include "truncfit/frequency_table.hpp"

namespace truncfit {

struct GofResult {
    double observed_dv = 0.0;
    /// #{d_v^(i) < observed} / N
    double empirical_cdf_at_observed = 0.0;
    /// Empirical (1 - alpha) quantile of the simulated distances.
    double critical_value = 0.0;
    bool reject = false;
    std::size_t N = 0;
    double alpha = 0.0;
    /// Replicates redrawn because a cell came out empty.
    std::size_t resampled = 0;
};

/// Monte-Carlo goodness-of-fit test of a fully specified model.
///
/// Each of the N replicates has the table's total count (rounded) spread
/// over the table's own cells: for discrete models the observations are drawn
/// from the model conditioned on the table points; for continuous models
/// draws from the model are kept when they fall in a class of width
/// bin_width() (or the smallest point spacing) centred on a table point.
/// Replicates with an empty cell are redrawn; more than 10 N redraws throws
/// InvalidArgument. Replicate i uses Rng(seed, i), so the result does not
/// depend on `threads` (0 = hardware concurrency).
GofResult gof_test(const DistributionModel& model, const FrequencyTable& table, std::size_t N, double alpha,
                   std::uint64_t seed, unsigned threads = 0);

/// One replicate table as used by gof_test, without the empty-cell check.
FrequencyTable gof_replicate(const DistributionModel& model, const FrequencyTable& table, Rng& rng);

}  // namespace truncfit
