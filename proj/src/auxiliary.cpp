#include "truncfit/auxiliary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "truncfit/dv.hpp"
#include "truncfit/error.hpp"

namespace truncfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_estimable(const FrequencyTable& table) {
    if (table.size() < 2) throw InvalidArgument("auxiliary estimation needs at least two support points");
    for (double c : table.counts()) {
        if (!(c > 0.0)) throw InvalidArgument("table has zero counts; apply drop_zero first");
    }
}

// h values from log densities, normalized against the largest term.
void normalize_from_log(std::span<const double> ld, std::span<double> h) {
    const double top = *std::max_element(ld.begin(), ld.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < ld.size(); ++i) {
        h[i] = std::exp(ld[i] - top);
        sum += h[i];
    }
    for (double& v : h) v /= sum;
}

}  // namespace

double AuxiliaryDistribution::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += points[i] * values[i];
    return s;
}

AuxiliaryDistribution auxiliary(const DistributionModel& model, std::span<const double> points) {
    if (points.empty()) throw InvalidArgument("auxiliary distribution needs at least one point");
    std::vector<double> ld(points.size());
    const auto bad = log_densities(model, points, ld);
    if (bad != points.size()) {
        std::ostringstream os;
        os << family_name(model.family()) << " model has no mass at point " << points[bad];
        throw SupportMismatch(os.str(), points[bad]);
    }
    AuxiliaryDistribution out{{points.begin(), points.end()}, std::vector<double>(points.size())};
    normalize_from_log(ld, out.values);
    return out;
}

AuxiliaryDistribution auxiliary(const DensityFunction& density, std::span<const double> points) {
    if (points.empty()) throw InvalidArgument("auxiliary distribution needs at least one point");
    AuxiliaryDistribution out{{points.begin(), points.end()}, {}};
    double sum = 0.0;
    for (double x : points) {
        const double v = density(x);
        if (!(v > 0.0)) {
            std::ostringstream os;
            os << "density has no mass at point " << x;
            throw SupportMismatch(os.str(), x);
        }
        out.values.push_back(v);
        sum += v;
    }
    for (double& v : out.values) v /= sum;
    return out;
}

void check_equal_widths(const DistributionModel& model, const FrequencyTable& table) {
    if (model.is_discrete() || table.size() < 3) return;
    const auto& y = table.points();
    double width = table.bin_width().value_or(kInf);
    if (!table.bin_width()) {
        for (std::size_t i = 1; i < y.size(); ++i) width = std::min(width, y[i] - y[i - 1]);
    }
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double k = (y[i] - y[i - 1]) / width;
        if (std::abs(k - std::round(k)) > 0.02 * std::max(1.0, std::round(k)) || std::round(k) < 1.0) {
            std::ostringstream os;
            os << "class intervals are not of equal width (gap " << y[i] - y[i - 1] << " vs width " << width << ")";
            throw InvalidArgument(os.str());
        }
    }
}

EstimationReport estimate_aux_moment(const DistributionModel& tmpl, std::size_t free_index,
                                     const FrequencyTable& table, const OptimizerConfig& config) {
    check_free_indices(tmpl, std::span(&free_index, 1));
    require_estimable(table);
    check_equal_widths(tmpl, table);
    const auto cfg = resolve_config(tmpl, std::span(&free_index, 1), table, config);

    const auto& y = table.points();
    const std::size_t m = y.size();
    for (double x : y) {
        if (!tmpl.in_support(x)) throw SupportMismatch("point outside the model support", x);
    }
    std::vector<double> stat(y);
    if (has_exp_family_form(tmpl.family(), free_index)) {
        const ExpFamilyForm form(tmpl, free_index);
        for (std::size_t i = 0; i < m; ++i) stat[i] = form.statistic(y[i]);
    }
    double target = 0.0;
    for (std::size_t i = 0; i < m; ++i) target += stat[i] * table.counts()[i];
    target /= table.total();

    std::vector<double> params = tmpl.params();
    std::vector<double> ld(m), h(m);
    const Family family = tmpl.family();
    std::size_t infeasible = 0;
    auto residual = [&](double theta) {
        params[free_index] = theta;
        if (!params_valid(family, params)) return std::numeric_limits<double>::quiet_NaN();
        const DistributionModel model(family, params);
        if (log_densities(model, y, ld) != m) {
            ++infeasible;
            return std::numeric_limits<double>::quiet_NaN();
        }
        normalize_from_log(ld, h);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += stat[i] * h[i];
        return s - target;
    };

    const auto root = find_root(residual, cfg.bounds[0], cfg.grid_points);

    EstimationReport report;
    report.method = Method::AuxMoment;
    report.free_indices = {free_index};
    report.estimate = {root.x};
    report.fitted = tmpl.with_param(free_index, root.x);
    report.objective_at_estimate = std::abs(residual(root.x));
    report.evaluations = root.evaluations + 1;
    report.converged = root.bracket_width < cfg.refine_tol;
    return report;
}

EstimationReport estimate_aux_ml(const DistributionModel& tmpl, std::span<const std::size_t> free,
                                 const FrequencyTable& table, const OptimizerConfig& config) {
    check_free_indices(tmpl, free);
    require_estimable(table);
    check_equal_widths(tmpl, table);
    if (table.size() < free.size() + 1) throw InvalidArgument("too few support points for the free parameters");
    const auto cfg = resolve_config(tmpl, free, table, config);

    const auto& y = table.points();
    const std::size_t m = y.size();
    std::vector<double> weight(m);
    for (std::size_t i = 0; i < m; ++i) weight[i] = table.counts()[i] / table.total();

    std::vector<double> params = tmpl.params();
    std::vector<double> ld(m);
    const Family family = tmpl.family();
    auto neg_loglik = [&](std::span<const double> x) {
        for (std::size_t k = 0; k < free.size(); ++k) params[free[k]] = x[k];
        if (!params_valid(family, params)) return kInf;
        const DistributionModel model(family, params);
        if (log_densities(model, y, ld) != m) return kInf;
        const double top = *std::max_element(ld.begin(), ld.end());
        double sum = 0.0;
        for (double v : ld) sum += std::exp(v - top);
        const double log_norm = top + std::log(sum);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s -= weight[i] * (ld[i] - log_norm);
        return s;
    };

    const auto r = minimize(neg_loglik, cfg);
    if (!std::isfinite(r.value)) throw OptimizerError("no feasible parameter value found");

    EstimationReport report;
    report.method = Method::AuxML;
    report.free_indices.assign(free.begin(), free.end());
    report.estimate = r.x;
    std::vector<double> fitted = tmpl.params();
    for (std::size_t k = 0; k < free.size(); ++k) fitted[free[k]] = r.x[k];
    report.fitted = DistributionModel(family, std::move(fitted));
    report.objective_at_estimate = r.value;
    report.evaluations = r.evaluations;
    report.converged = r.converged;
    return report;
}

std::vector<double> allocate_missing(const DistributionModel& model, const FrequencyTable& table,
                                     std::span<const double> missing_points) {
    std::vector<double> ld(table.size());
    const auto bad = log_densities(model, table.points(), ld);
    if (bad != table.size()) {
        throw SupportMismatch("model has no mass at an observed point", table.points()[bad]);
    }
    const double top = *std::max_element(ld.begin(), ld.end());
    double observed_mass = 0.0;
    for (double v : ld) observed_mass += std::exp(v - top);

    std::vector<double> out;
    out.reserve(missing_points.size());
    for (double x : missing_points) {
        const double lx = model.log_density(x);
        if (!(lx >= std::log(1e-300))) throw SupportMismatch("model has no mass at a missing point", x);
        out.push_back(table.total() * std::exp(lx - top) / observed_mass);
    }
    return out;
}

}  // namespace truncfit
