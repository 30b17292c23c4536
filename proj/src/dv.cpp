#include "truncfit/dv.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "truncfit/error.hpp"

namespace truncfit {

namespace {

constexpr double kMinDensity = 1e-300;
const double kLogMinDensity = std::log(kMinDensity);

void require_positive_counts(const FrequencyTable& table) {
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!(table.counts()[i] > 0.0)) {
            std::ostringstream os;
            os << "zero count at point " << table.points()[i] << "; apply drop_zero first";
            throw InvalidArgument(os.str());
        }
    }
}

std::vector<double> checked_log_densities(const DistributionModel& model, const FrequencyTable& table) {
    std::vector<double> ld(table.size());
    const auto bad = log_densities(model, table.points(), ld);
    if (bad != table.size()) {
        const double x = table.points()[bad];
        std::ostringstream os;
        os << family_name(model.family()) << " model has no mass at table point " << x;
        throw SupportMismatch(os.str(), x);
    }
    return ld;
}

}  // namespace

DvValue dv_tables(const EmpiricalTruncated& p, const EmpiricalTruncated& q) {
    if (p.points.size() != q.points.size()) throw InvalidArgument("dv_tables: point sets differ");
    const std::size_t m = p.points.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(p.points[i] - q.points[i]) > 1e-9 * std::max(1.0, std::abs(p.points[i]))) {
            throw InvalidArgument("dv_tables: point sets differ");
        }
        if (!(p.probs[i] > 0.0) || !(q.probs[i] > 0.0)) throw InvalidArgument("dv_tables: zero probability");
    }
    DvValue out;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            out.value += std::abs(p.probs[i] / p.probs[j] - q.probs[i] / q.probs[j]);
            ++out.pair_count;
        }
    }
    return out;
}

std::size_t log_densities(const DistributionModel& model, std::span<const double> points, std::span<double> out) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = model.log_density(points[i]);
        if (!(out[i] >= kLogMinDensity) || !std::isfinite(out[i])) return i;
    }
    return points.size();
}

double dv_from_log_density(std::span<const double> ld, std::span<const double> counts) {
    const std::size_t m = ld.size();
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            total += std::abs(std::exp(ld[i] - ld[j]) - counts[i] / counts[j]);
        }
    }
    return total;
}

DvValue dv_model(const DistributionModel& model, const FrequencyTable& table) {
    require_positive_counts(table);
    const auto ld = checked_log_densities(model, table);
    const std::size_t m = table.size();
    return {dv_from_log_density(ld, table.counts()), m * (m - 1)};
}

DvDecomposition dv_decompose(const FrequencyTable& full_table, const Truncation& observed,
                             const DistributionModel& model) {
    require_positive_counts(full_table);
    const std::size_t m = full_table.size();
    std::vector<bool> is_obs(m, false);
    std::size_t n_obs = 0;
    for (double x : observed.kept_points) {
        auto i = full_table.find(x);
        if (!i) throw InvalidArgument("observed point is not in the table");
        if (!is_obs[*i]) ++n_obs;
        is_obs[*i] = true;
    }
    if (n_obs == 0 || n_obs == m) throw InvalidArgument("observed part must be a proper nonempty subset");

    const auto ld = checked_log_densities(model, full_table);
    const auto& c = full_table.counts();
    DvDecomposition out;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const double term = std::abs(std::exp(ld[i] - ld[j]) - c[i] / c[j]);
            if (is_obs[i] && is_obs[j]) {
                out.observed += term;
            } else if (!is_obs[i] && !is_obs[j]) {
                out.unobserved += term;
            } else {
                out.cross += term;
            }
        }
    }
    return out;
}

}  // namespace truncfit
