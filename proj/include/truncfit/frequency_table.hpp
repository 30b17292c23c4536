#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace truncfit {

/// Support points (values or class mid-points) with absolute frequencies.
///
/// Counts are real-valued; the total is the truncated sample size n_t. The
/// complete sample size is carried only when known (simulations) and is never
/// read by an estimator.
class FrequencyTable {
public:
    /// Throws InvalidArgument unless points are strictly increasing, the
    /// lengths match and are >= 1, counts are finite and nonnegative, and
    /// full_size (if given) is at least the total.
    FrequencyTable(std::vector<double> points, std::vector<double> counts,
                   std::optional<double> full_size = std::nullopt,
                   std::optional<double> bin_width = std::nullopt);

    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<double>& counts() const noexcept { return counts_; }
    double total() const noexcept { return total_; }
    std::optional<double> full_size() const noexcept { return full_size_; }
    /// Class width when the table came from equal-width binning.
    std::optional<double> bin_width() const noexcept { return bin_width_; }

    /// Percentage of the complete sample lost to truncation, 100 (n - n_t) / n.
    std::optional<double> truncation_proportion() const;

    /// Count-weighted mean of the points.
    double mean() const;

    /// Index of the point matching x (relative tolerance 1e-9), if any.
    std::optional<std::size_t> find(double x) const noexcept;

    FrequencyTable with_full_size(std::optional<double> n) const;
    FrequencyTable scaled(double factor) const;

    bool operator==(const FrequencyTable&) const = default;

private:
    std::vector<double> points_;
    std::vector<double> counts_;
    double total_ = 0.0;
    std::optional<double> full_size_;
    std::optional<double> bin_width_;
};

/// The set of retained support points.
struct Truncation {
    std::vector<double> kept_points;
};

/// Relative frequencies renormalized on a truncation's support.
struct EmpiricalTruncated {
    std::vector<double> points;
    std::vector<double> probs;
};

/// Equal-width classes over [min, max], last class closed on the right.
FrequencyTable bin_sample(std::span<const double> sample, std::size_t num_bins);

/// Equal-width classes over [lo, hi]; values outside are ignored.
FrequencyTable bin_sample(std::span<const double> sample, std::size_t num_bins, double lo, double hi);

/// One row per distinct value.
FrequencyTable tabulate(std::span<const double> sample);

/// Restricts to the kept points. full_size is dropped unless preserve_full_size.
FrequencyTable truncate(const FrequencyTable& table, const Truncation& trunc, bool preserve_full_size = false);

/// Truncation selecting 1-based rows, as the published tables number them.
Truncation rows(const FrequencyTable& table, std::initializer_list<std::size_t> one_based);

FrequencyTable drop_zero(const FrequencyTable& table);

EmpiricalTruncated empirical_truncated(const FrequencyTable& table);

/// CSV with header `point,count`; `#` comments and blank lines ignored.
FrequencyTable load_csv(const std::filesystem::path& path);
FrequencyTable parse_csv(const std::string& text);
void save_csv(const FrequencyTable& table, const std::filesystem::path& path);
std::string to_csv(const FrequencyTable& table);

/// One value per line (blank lines and `#` comments ignored).
std::vector<double> load_sample(const std::filesystem::path& path);

}  // namespace truncfit
