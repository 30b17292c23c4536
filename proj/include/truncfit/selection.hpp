#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "truncfit/auxiliary.hpp"
#include "truncfit/distribution.hpp"
#include "truncfit/estimation.hpp"
#include "truncfit/frequency_table.hpp"

namespace truncfit {

/// A competing model: fixed when `free_indices` is empty, otherwise fitted
/// by minimum d_v before ranking.
struct Candidate {
    std::string id;
    DistributionModel model;
    std::vector<std::size_t> free_indices;
};

struct RankedCandidate {
    std::string id;
    DistributionModel fitted;
    double dv = 0.0;  ///< +infinity when the candidate cannot explain the table
};

struct SelectionResult {
    std::vector<RankedCandidate> ranked;  ///< ascending d_v, ties in candidate order
    std::string winner;
};

SelectionResult select_model(std::span<const Candidate> candidates, const FrequencyTable& table,
                             const OptimizerConfig& config = {});

/// Index of the fully specified candidate with the largest auxiliary
/// log-likelihood sum_i n_i log h(u_i); nullopt when the top two agree to
/// within 1e-12 (relative).
std::optional<std::size_t> aux_likelihood_decide(std::span<const DensityFunction> candidates,
                                                 const FrequencyTable& table);
std::optional<std::size_t> aux_likelihood_decide(std::span<const DistributionModel> candidates,
                                                 const FrequencyTable& table);

/// Which raw observations survive truncation.
struct KeepPoints {
    std::vector<double> points;
};
/// Keep observations strictly above the cut-off (the data are cut on the left).
struct KeepAbove {
    double cutoff;
};
/// Keep observations strictly below the cut-off.
struct KeepBelow {
    double cutoff;
};
using TruncationRule = std::variant<KeepPoints, KeepAbove, KeepBelow>;

struct SelectionExperiment {
    DistributionModel generator;
    std::vector<Candidate> candidates;
    std::size_t correct_index = 0;  ///< candidate that corresponds to the generator
    std::size_t replications = 10000;
    std::size_t sample_size = 100;
    TruncationRule truncation = KeepPoints{};
    std::optional<std::size_t> num_bins;  ///< bin the truncated sample; otherwise tabulate values
    std::uint64_t seed = 1;
    OptimizerConfig config;
    unsigned threads = 0;  ///< 0 = hardware concurrency; results do not depend on it

    void validate() const;
};

struct ExperimentResult {
    double rate = 0.0;          ///< correct / scored
    std::size_t correct = 0;
    std::size_t scored = 0;
    std::size_t excluded = 0;   ///< fewer than two support points after truncation
};

/// Replication r draws from Rng(seed, r), so the outcome is reproducible and
/// independent of the thread count.
ExperimentResult run_selection_experiment(const SelectionExperiment& experiment);

/// Table for one replication of `experiment`; nullopt when excluded.
std::optional<FrequencyTable> replicate_table(const SelectionExperiment& experiment, std::size_t replication);

/// Presets: "paper1" (B(8,0.1) vs B(10,0.15), generator B(8,0.1), keep
/// {0,1,2,3}), "paper2" (same pair, generator B(10,0.15)), "weibull-gamma"
/// (W(1.2,1.5) vs G(2,0.5), n = 1000, keep above 1.25, 11 classes).
SelectionExperiment preset_experiment(const std::string& name, std::size_t replications, std::uint64_t seed);

/// Flat `key = value` config; see README for the keys.
SelectionExperiment parse_experiment_config(const std::string& text);

}  // namespace truncfit
