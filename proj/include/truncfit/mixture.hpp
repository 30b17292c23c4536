#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "truncfit/frequency_table.hpp"
#include "truncfit/optimizer.hpp"

namespace truncfit {

enum class MixtureSide { Left, Right, Undetermined };

std::string_view side_name(MixtureSide side);

/// A merged two-component normal sample cut into a left tail, a mixed
/// centre and a right tail.
///
/// The component placed on the left gives the right cut-off and vice versa:
/// with m1 on the left, sup_l = m_g - sigma2 and min_r = m_g + sigma1. When
/// the side is undetermined the left assignment is used.
struct MixtureSplit {
    double m_g = 0.0;
    double s_l = 0.0;  ///< standard deviation of the observations below m_g
    double s_r = 0.0;  ///< standard deviation of the observations above m_g
    double sup_l = 0.0;
    double min_r = 0.0;
    MixtureSide side_of_m1 = MixtureSide::Undetermined;
    std::vector<double> left_sample;   ///< observations below sup_l
    std::vector<double> right_sample;  ///< observations above min_r
    FrequencyTable left_table;
    FrequencyTable right_table;
};

/// Throws InvalidArgument if the sample has fewer than 20 values, a sigma is
/// not positive, or a tail has fewer than two observations.
MixtureSplit split_merged(std::span<const double> sample, double sigma1, double sigma2, std::size_t num_bins = 7);

struct TailMeanEstimate {
    double m_dv = 0.0;   ///< minimum-d_v estimate of the mean, sigma fixed
    double m_aux = 0.0;  ///< root of the auxiliary mean equation
    double tail_mean = 0.0;
    std::size_t rows = 0;
};

/// Mean of N(m, sigma) seen only on the table's points. m_aux solves
///   sum_i u_i exp(-(u_i - m)^2 / 2 sigma^2) / sum_i exp(-(u_i - m)^2 / 2 sigma^2) = tail_mean
/// by bisection; the left side is increasing in m.
TailMeanEstimate estimate_tail_mean(const FrequencyTable& tail, double tail_mean, double sigma,
                                    const OptimizerConfig& config = {});

struct MixtureInit {
    MixtureSplit split;
    TailMeanEstimate m1;
    TailMeanEstimate m2;
    /// Solves alpha m1 + (1 - alpha) m2 = m_g with the auxiliary estimates,
    /// clamped into [1e-6, 1 - 1e-6] when the solution falls outside (0, 1).
    double alpha = 0.5;
    bool alpha_clamped = false;
    std::vector<std::string> warnings;
};

/// Split, estimate each mean from the tail on its side, and recover alpha.
/// Rows with a count below `trim_min_count` are removed from both tails and
/// the tail means recomputed from the remaining observations; empty classes
/// are always removed.
MixtureInit estimate_mixture_init(std::span<const double> sample, double sigma1, double sigma2,
                                  std::size_t num_bins = 7, const OptimizerConfig& config = {},
                                  std::optional<double> trim_min_count = std::nullopt);

}  // namespace truncfit
