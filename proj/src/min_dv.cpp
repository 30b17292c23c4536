#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "truncfit/dv.hpp"
#include "truncfit/error.hpp"
#include "truncfit/estimation.hpp"
#include "truncfit/rng.hpp"

namespace truncfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view method_name(Method method) {
    switch (method) {
        case Method::MinDv: return "mindv";
        case Method::AuxMoment: return "aux-moment";
        case Method::AuxML: return "aux-ml";
    }
    return "unknown";
}

Interval default_bounds(Family family, std::size_t i, const FrequencyTable& table) {
    const double lo = table.points().front();
    const double hi = table.points().back();
    const double span = std::max(hi - lo, 1e-3);
    switch (family) {
        case Family::Binomial: return {1e-3, 1.0 - 1e-3};
        case Family::Poisson: return {1e-3, 10.0 * std::max(hi, 1.0)};
        case Family::Normal:
            if (i == 0) return {lo - 3.0 * span, hi + 3.0 * span};
            return {1e-3, 10.0 * span};
        case Family::Gamma:
        case Family::Weibull:
            if (i == 0) return {0.1, 100.0};
            return {1e-3, 10.0 * span};
    }
    return {0.0, 1.0};
}

void check_free_indices(const DistributionModel& tmpl, std::span<const std::size_t> free) {
    if (free.empty() || free.size() > 2) throw InvalidArgument("one or two free parameters are supported");
    if (free.size() == 2 && free[0] == free[1]) throw InvalidArgument("free parameters must be distinct");
    for (auto i : free) {
        if (i >= param_count(tmpl.family())) throw InvalidArgument("free parameter index out of range");
        if (tmpl.family() == Family::Binomial && i == 0) {
            throw InvalidArgument("the binomial number of trials cannot be estimated");
        }
    }
}

OptimizerConfig resolve_config(const DistributionModel& tmpl, std::span<const std::size_t> free,
                               const FrequencyTable& table, OptimizerConfig config) {
    if (config.bounds.empty()) {
        for (auto i : free) config.bounds.push_back(default_bounds(tmpl.family(), i, table));
    }
    config.validate(free.size());
    return config;
}

EstimationReport estimate_min_dv(const DistributionModel& tmpl, std::span<const std::size_t> free,
                                 const FrequencyTable& table, const OptimizerConfig& config) {
    check_free_indices(tmpl, free);
    if (table.size() < free.size() + 1) {
        std::ostringstream os;
        os << "minimum-distance estimation of " << free.size() << " parameter(s) needs at least "
           << free.size() + 1 << " support points, got " << table.size();
        throw InvalidArgument(os.str());
    }
    for (double c : table.counts()) {
        if (!(c > 0.0)) throw InvalidArgument("table has zero counts; apply drop_zero first");
    }
    const auto cfg = resolve_config(tmpl, free, table, config);

    const auto& points = table.points();
    const auto& counts = table.counts();
    std::vector<double> params = tmpl.params();
    std::vector<double> ld(points.size());
    const Family family = tmpl.family();

    auto objective = [&](std::span<const double> x) {
        for (std::size_t k = 0; k < free.size(); ++k) params[free[k]] = x[k];
        if (!params_valid(family, params)) return kInf;
        const DistributionModel model(family, params);
        if (log_densities(model, points, ld) != points.size()) return kInf;
        return dv_from_log_density(ld, counts);
    };

    const auto r = minimize(objective, cfg);
    if (!std::isfinite(r.value)) throw OptimizerError("no feasible parameter value found");

    EstimationReport report;
    report.method = Method::MinDv;
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

ConvexityReport convexity_probe(const ExpFamilyForm& form, const FrequencyTable& table,
                                std::span<const std::pair<double, double>> theta_pairs) {
    const auto& y = table.points();
    const auto& n = table.counts();
    const std::size_t m = y.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (!(n[i] > 0.0)) throw InvalidArgument("convexity_probe: zero count");
        if (!form.model().in_support(y[i])) throw SupportMismatch("convexity_probe: point outside support", y[i]);
    }
    std::vector<double> log_k(m), t(m);
    for (std::size_t i = 0; i < m; ++i) {
        log_k[i] = form.log_base(y[i]);
        t[i] = form.statistic(y[i]);
    }
    auto delta = [&](std::size_t i, std::size_t j, double theta) {
        return std::abs(std::exp(log_k[i] - log_k[j] + theta * (t[i] - t[j])) - n[i] / n[j]);
    };

    ConvexityReport report;
    for (const auto& [a, b] : theta_pairs) {
        const double mid = 0.5 * a + 0.5 * b;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                const double lhs = delta(i, j, mid);
                const double rhs = 0.5 * delta(i, j, a) + 0.5 * delta(i, j, b);
                ++report.checks;
                // Absolute slack 1e-9, scaled up for large ratio magnitudes.
                if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) {
                    report.convex = false;
                    report.violations.push_back({i, j, a, b, lhs, rhs});
                }
            }
        }
    }
    return report;
}

std::vector<std::pair<double, double>> random_theta_pairs(std::size_t count, Interval range, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double a = range.lo + (range.hi - range.lo) * rng.uniform();
        const double b = range.lo + (range.hi - range.lo) * rng.uniform();
        out.emplace_back(a, b);
    }
    return out;
}

}  // namespace truncfit
