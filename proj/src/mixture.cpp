#include "truncfit/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "truncfit/distribution.hpp"
#include "truncfit/error.hpp"
#include "truncfit/estimation.hpp"

namespace truncfit {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sd_of(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1));
}

MixtureSide locate_m1(double s_l, double s_r, double sigma1, double sigma2) {
    if (sigma1 == sigma2 || s_l == s_r) return MixtureSide::Undetermined;
    // the component with the smaller deviation sits on the side with the smaller spread
    const bool m1_narrower = sigma1 < sigma2;
    const bool left_narrower = s_l < s_r;
    return m1_narrower == left_narrower ? MixtureSide::Left : MixtureSide::Right;
}

struct PreparedTail {
    FrequencyTable table;
    double mean;
};

PreparedTail prepare_tail(const std::vector<double>& obs, const FrequencyTable& binned, double min_count,
                          const char* label, std::vector<std::string>& warnings) {
    const auto& counts = binned.counts();
    std::vector<bool> keep(binned.size());
    std::vector<double> points, kept_counts;
    for (std::size_t i = 0; i < binned.size(); ++i) {
        keep[i] = counts[i] > 0.0 && counts[i] >= min_count;
        if (keep[i]) {
            points.push_back(binned.points()[i]);
            kept_counts.push_back(counts[i]);
        } else if (counts[i] > 0.0) {
            std::ostringstream os;
            os << label << " tail: removed class at " << binned.points()[i] << " with count " << counts[i];
            warnings.push_back(os.str());
        }
    }
    if (points.size() < 2) throw InvalidArgument(std::string(label) + " tail keeps fewer than two classes");

    const double w = *binned.bin_width();
    const double lo = binned.points().front() - 0.5 * w;
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : obs) {
        const auto idx = std::min(static_cast<std::size_t>(std::floor((x - lo) / w)), binned.size() - 1);
        if (keep[idx]) {
            sum += x;
            ++n;
        }
    }
    return {FrequencyTable(std::move(points), std::move(kept_counts), std::nullopt, w), sum / double(n)};
}

}  // namespace

std::string_view side_name(MixtureSide side) {
    switch (side) {
        case MixtureSide::Left: return "left";
        case MixtureSide::Right: return "right";
        case MixtureSide::Undetermined: return "undetermined";
    }
    return "?";
}

MixtureSplit split_merged(std::span<const double> sample, double sigma1, double sigma2, std::size_t num_bins) {
    if (sample.size() < 20) throw InvalidArgument("mixture split needs at least 20 observations");
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw InvalidArgument("component deviations must be positive");
    if (num_bins == 0) throw InvalidArgument("number of classes must be positive");

    const double m_g = mean_of(sample);
    std::vector<double> below, above;
    for (double x : sample) {
        if (x < m_g) below.push_back(x);
        if (x > m_g) above.push_back(x);
    }
    const double s_l = sd_of(below);
    const double s_r = sd_of(above);
    const auto side = locate_m1(s_l, s_r, sigma1, sigma2);
    const double sigma_left = side == MixtureSide::Right ? sigma2 : sigma1;
    const double sigma_right = side == MixtureSide::Right ? sigma1 : sigma2;
    const double sup_l = m_g - sigma_right;
    const double min_r = m_g + sigma_left;

    std::vector<double> left, right;
    for (double x : sample) {
        if (x < sup_l) left.push_back(x);
        if (x > min_r) right.push_back(x);
    }
    if (left.size() < 2) throw InvalidArgument("left tail has fewer than two observations");
    if (right.size() < 2) throw InvalidArgument("right tail has fewer than two observations");

    auto left_table = bin_sample(left, num_bins);
    auto right_table = bin_sample(right, num_bins);
    return {m_g,   s_l,  s_r, sup_l, min_r, side, std::move(left), std::move(right), std::move(left_table),
            std::move(right_table)};
}

TailMeanEstimate estimate_tail_mean(const FrequencyTable& tail, double tail_mean, double sigma,
                                    const OptimizerConfig& config) {
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    if (tail.size() < 2) throw InvalidArgument("tail table needs at least two points");

    const auto tmpl = DistributionModel::normal(tail.mean(), sigma);
    const std::size_t free = 0;
    const auto cfg = resolve_config(tmpl, std::span(&free, 1), tail, config);

    TailMeanEstimate out;
    out.tail_mean = tail_mean;
    out.rows = tail.size();
    out.m_dv = estimate_min_dv(tmpl, free, tail, cfg).estimate[0];

    const auto& u = tail.points();
    const double two_var = 2.0 * sigma * sigma;
    auto g = [&](double m) {
        // shift by the largest exponent so the weights stay finite
        double top = -std::numeric_limits<double>::infinity();
        for (double x : u) top = std::max(top, -(x - m) * (x - m) / two_var);
        double num = 0.0, den = 0.0;
        for (double x : u) {
            const double w = std::exp(-(x - m) * (x - m) / two_var - top);
            num += x * w;
            den += w;
        }
        return num / den - tail_mean;
    };
    out.m_aux = find_root(g, cfg.bounds[0], cfg.grid_points).x;
    return out;
}

MixtureInit estimate_mixture_init(std::span<const double> sample, double sigma1, double sigma2,
                                  std::size_t num_bins, const OptimizerConfig& config,
                                  std::optional<double> trim_min_count) {
    MixtureInit init{split_merged(sample, sigma1, sigma2, num_bins), {}, {}, 0.5, false, {}};
    const auto& s = init.split;
    if (s.side_of_m1 == MixtureSide::Undetermined) {
        init.warnings.push_back("side of m1 undetermined; m1 is the left-tail mean and m2 the right-tail mean");
    }
    const double min_count = trim_min_count.value_or(0.0);
    const auto left = prepare_tail(s.left_sample, s.left_table, min_count, "left", init.warnings);
    const auto right = prepare_tail(s.right_sample, s.right_table, min_count, "right", init.warnings);

    const bool m1_right = s.side_of_m1 == MixtureSide::Right;
    const double sigma_left = m1_right ? sigma2 : sigma1;
    const double sigma_right = m1_right ? sigma1 : sigma2;
    auto left_est = estimate_tail_mean(left.table, left.mean, sigma_left, config);
    auto right_est = estimate_tail_mean(right.table, right.mean, sigma_right, config);
    init.m1 = m1_right ? right_est : left_est;
    init.m2 = m1_right ? left_est : right_est;

    const double d = init.m1.m_aux - init.m2.m_aux;
    if (d == 0.0) {
        init.alpha_clamped = true;
        init.warnings.push_back("equal mean estimates; mixing proportion set to 0.5");
        return init;
    }
    init.alpha = (s.m_g - init.m2.m_aux) / d;
    constexpr double eps = 1e-6;
    if (!(init.alpha > 0.0 && init.alpha < 1.0)) {
        std::ostringstream os;
        os << "mixing proportion " << init.alpha << " outside (0, 1); clamped";
        init.warnings.push_back(os.str());
        init.alpha = std::clamp(init.alpha, eps, 1.0 - eps);
        init.alpha_clamped = true;
    }
    return init;
}

}  // namespace truncfit
