#include "truncfit/gof.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "truncfit/auxiliary.hpp"
#include "truncfit/dv.hpp"
#include "truncfit/error.hpp"
#include "truncfit/rng.hpp"

namespace truncfit {

namespace {

constexpr std::size_t kMaxDrawsPerObservation = 10000;

std::size_t replicate_size(const FrequencyTable& table) {
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(table.total())));
}

double class_width(const FrequencyTable& table) {
    if (table.bin_width()) return *table.bin_width();
    const auto& u = table.points();
    double w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < u.size(); ++i) w = std::min(w, u[i] - u[i - 1]);
    if (!std::isfinite(w)) throw InvalidArgument("a single-point continuous table has no class width");
    return w;
}

std::vector<double> discrete_replicate(const std::vector<double>& cdf, std::size_t n, Rng& rng) {
    std::vector<double> counts(cdf.size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform() * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        counts[std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1)] += 1.0;
    }
    return counts;
}

std::vector<double> continuous_replicate(const DistributionModel& model, const std::vector<double>& points,
                                         double width, std::size_t n, Rng& rng) {
    std::vector<double> counts(points.size(), 0.0);
    const double half = 0.5 * width;
    std::size_t accepted = 0;
    for (std::size_t tries = 0; accepted < n; ++tries) {
        if (tries >= kMaxDrawsPerObservation * n) {
            throw InvalidArgument("model puts almost no mass in the table's classes");
        }
        const double x = draw(model, rng);
        auto it = std::lower_bound(points.begin(), points.end(), x);
        std::size_t best = points.size();
        if (it != points.end() && *it - x < half) best = it - points.begin();
        if (it != points.begin() && x - *(it - 1) <= half) best = (it - 1) - points.begin();
        if (best == points.size()) continue;
        counts[best] += 1.0;
        ++accepted;
    }
    return counts;
}

struct Sampler {
    const DistributionModel& model;
    const FrequencyTable& table;
    std::size_t n;
    std::vector<double> cdf;
    double width = 0.0;

    Sampler(const DistributionModel& m, const FrequencyTable& t) : model(m), table(t), n(replicate_size(t)) {
        if (model.is_discrete()) {
            const auto h = auxiliary(model, table.points());
            cdf.resize(h.values.size());
            std::partial_sum(h.values.begin(), h.values.end(), cdf.begin());
        } else {
            width = class_width(table);
        }
    }

    FrequencyTable operator()(Rng& rng) const {
        auto counts = model.is_discrete() ? discrete_replicate(cdf, n, rng)
                                          : continuous_replicate(model, table.points(), width, n, rng);
        return FrequencyTable(table.points(), std::move(counts), std::nullopt, table.bin_width());
    }
};

bool has_empty_cell(const FrequencyTable& t) {
    return std::any_of(t.counts().begin(), t.counts().end(), [](double c) { return c <= 0.0; });
}

}  // namespace

FrequencyTable gof_replicate(const DistributionModel& model, const FrequencyTable& table, Rng& rng) {
    return Sampler(model, table)(rng);
}

GofResult gof_test(const DistributionModel& model, const FrequencyTable& table, std::size_t N, double alpha,
                   std::uint64_t seed, unsigned threads) {
    if (N < 100) throw InvalidArgument("goodness-of-fit needs N >= 100 replicates");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (table.size() < 2) throw InvalidArgument("goodness-of-fit needs at least two table points");

    GofResult result;
    result.N = N;
    result.alpha = alpha;
    result.observed_dv = dv_model(model, table).value;

    const Sampler sampler(model, table);
    std::vector<double> ld(table.size());
    if (log_densities(model, table.points(), ld) != table.size()) {
        throw SupportMismatch("model has no mass at a table point", table.points().front());
    }

    const std::size_t cap = 10 * N;
    std::vector<double> distances(N);
    std::vector<std::size_t> redraws(N, 0);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> total_redraws{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;

    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < N && !failed; i = next++) {
                Rng rng(seed, i);
                auto rep = sampler(rng);
                while (has_empty_cell(rep)) {
                    ++redraws[i];
                    if (++total_redraws > cap) {
                        throw InvalidArgument("too many replicates with empty cells; the table's support is too "
                                              "sparse for this model");
                    }
                    rep = sampler(rng);
                }
                distances[i] = dv_from_log_density(ld, rep.counts());
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    unsigned nthreads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, N));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    result.resampled = std::accumulate(redraws.begin(), redraws.end(), std::size_t{0});

    const auto below = std::count_if(distances.begin(), distances.end(),
                                     [&](double d) { return d < result.observed_dv; });
    result.empirical_cdf_at_observed = double(below) / double(N);
    result.reject = result.empirical_cdf_at_observed > 1.0 - alpha;

    std::sort(distances.begin(), distances.end());
    const auto q = static_cast<std::size_t>(std::ceil((1.0 - alpha) * double(N))) - 1;
    result.critical_value = distances[std::min(q, N - 1)];
    return result;
}

}  // namespace truncfit
