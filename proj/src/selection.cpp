#include "truncfit/selection.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "truncfit/dv.hpp"
#include "truncfit/error.hpp"
#include "truncfit/model_literal.hpp"
#include "truncfit/rng.hpp"

namespace truncfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<std::size_t> decide(std::span<const double> scores) {
    if (scores.empty()) throw InvalidArgument("no candidates");
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) best = k;
    }
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (k == best) continue;
        const double tol = 1e-12 * std::max({1.0, std::abs(scores[k]), std::abs(scores[best])});
        if (std::abs(scores[k] - scores[best]) <= tol) return std::nullopt;
    }
    return best;
}

double aux_loglik(const AuxiliaryDistribution& h, const FrequencyTable& table) {
    double s = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) s += table.counts()[i] * std::log(h.values[i]);
    return s;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<double> parse_list(std::string_view s) {
    std::vector<double> out;
    std::string item;
    std::istringstream in{std::string(s)};
    while (std::getline(in, item, ',')) {
        auto t = trim(item);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(std::string(t), &used));
            if (used != t.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("invalid number '" + std::string(t) + "'");
        }
    }
    return out;
}

double parse_real(std::string_view s) {
    auto v = parse_list(s);
    if (v.size() != 1) throw ParseError("expected one number, got '" + std::string(s) + "'");
    return v[0];
}

std::size_t parse_count(std::string_view s) {
    const double v = parse_real(s);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
        throw ParseError("expected a nonnegative integer, got '" + std::string(s) + "'");
    }
    return static_cast<std::size_t>(v);
}

Candidate candidate_from_literal(const std::string& literal) {
    const auto tmpl = parse_model_template(literal);
    return {literal, tmpl.instantiate(), tmpl.free_indices()};
}

}  // namespace

SelectionResult select_model(std::span<const Candidate> candidates, const FrequencyTable& table,
                             const OptimizerConfig& config) {
    if (candidates.size() < 2) throw InvalidArgument("model selection needs at least two candidates");
    if (table.size() < 2) throw InvalidArgument("model selection needs at least two support points");
    for (double c : table.counts()) {
        if (!(c > 0.0)) throw InvalidArgument("table has zero counts; apply drop_zero first");
    }

    SelectionResult result;
    for (const auto& cand : candidates) {
        RankedCandidate r{cand.id, cand.model, kInf};
        try {
            if (cand.free_indices.empty()) {
                r.dv = dv_model(cand.model, table).value;
            } else {
                const auto fit = estimate_min_dv(cand.model, cand.free_indices, table, config);
                r.fitted = fit.fitted;
                r.dv = fit.objective_at_estimate;
            }
        } catch (const SupportMismatch&) {
            r.dv = kInf;
        } catch (const OptimizerError&) {
            r.dv = kInf;
        }
        result.ranked.push_back(std::move(r));
    }
    std::stable_sort(result.ranked.begin(), result.ranked.end(),
                     [](const RankedCandidate& a, const RankedCandidate& b) { return a.dv < b.dv; });
    result.winner = result.ranked.front().id;
    return result;
}

std::optional<std::size_t> aux_likelihood_decide(std::span<const DensityFunction> candidates,
                                                 const FrequencyTable& table) {
    std::vector<double> scores;
    for (const auto& f : candidates) scores.push_back(aux_loglik(auxiliary(f, table.points()), table));
    return decide(scores);
}

std::optional<std::size_t> aux_likelihood_decide(std::span<const DistributionModel> candidates,
                                                 const FrequencyTable& table) {
    std::vector<double> scores;
    for (const auto& m : candidates) scores.push_back(aux_loglik(auxiliary(m, table.points()), table));
    return decide(scores);
}

void SelectionExperiment::validate() const {
    if (replications < 1) throw InvalidArgument("experiment needs at least one replication");
    if (sample_size < 1) throw InvalidArgument("experiment sample size must be positive");
    if (candidates.size() < 2) throw InvalidArgument("experiment needs at least two candidates");
    if (correct_index >= candidates.size()) throw InvalidArgument("correct candidate index out of range");
    for (std::size_t a = 0; a < candidates.size(); ++a) {
        for (std::size_t b = a + 1; b < candidates.size(); ++b) {
            if (candidates[a].model == candidates[b].model &&
                candidates[a].free_indices == candidates[b].free_indices && candidates[a].id == candidates[b].id) {
                throw InvalidArgument("experiment candidates must be distinct");
            }
        }
    }
    if (num_bins && *num_bins == 0) throw InvalidArgument("number of bins must be positive");
}

std::optional<FrequencyTable> replicate_table(const SelectionExperiment& exp, std::size_t replication) {
    Rng rng(exp.seed, replication);
    std::vector<double> kept;
    kept.reserve(exp.sample_size);
    for (std::size_t k = 0; k < exp.sample_size; ++k) {
        const double x = draw(exp.generator, rng);
        const bool keep = std::visit(
            [x](const auto& rule) {
                using T = std::decay_t<decltype(rule)>;
                if constexpr (std::is_same_v<T, KeepPoints>) {
                    return std::find(rule.points.begin(), rule.points.end(), x) != rule.points.end();
                } else if constexpr (std::is_same_v<T, KeepAbove>) {
                    return x > rule.cutoff;
                } else {
                    return x < rule.cutoff;
                }
            },
            exp.truncation);
        if (keep) kept.push_back(x);
    }
    if (kept.empty()) return std::nullopt;
    FrequencyTable table = exp.num_bins ? bin_sample(kept, *exp.num_bins) : tabulate(kept);
    double nonzero = 0;
    for (double c : table.counts()) nonzero += c > 0.0 ? 1 : 0;
    if (nonzero < 2) return std::nullopt;
    return drop_zero(table);
}

ExperimentResult run_selection_experiment(const SelectionExperiment& exp) {
    exp.validate();
    // 1 = correct, 0 = wrong, -1 = excluded
    std::vector<signed char> outcome(exp.replications, -1);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        try {
            for (std::size_t r = next++; r < exp.replications && !failed; r = next++) {
                auto table = replicate_table(exp, r);
                if (!table) continue;
                const auto sel = select_model(exp.candidates, *table, exp.config);
                outcome[r] = sel.winner == exp.candidates[exp.correct_index].id &&
                                     std::isfinite(sel.ranked.front().dv)
                                 ? 1
                                 : 0;
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    unsigned threads = exp.threads ? exp.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, exp.replications));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult res;
    for (auto o : outcome) {
        if (o < 0) {
            ++res.excluded;
        } else {
            ++res.scored;
            res.correct += static_cast<std::size_t>(o);
        }
    }
    if (res.scored == 0) throw InvalidArgument("every replication was excluded by the truncation");
    res.rate = double(res.correct) / double(res.scored);
    return res;
}

SelectionExperiment preset_experiment(const std::string& name, std::size_t replications, std::uint64_t seed) {
    const auto b8 = DistributionModel::binomial(8, 0.1);
    const auto b10 = DistributionModel::binomial(10, 0.15);
    SelectionExperiment exp{b8, {}, 0, replications, 100, KeepPoints{{0, 1, 2, 3}}, std::nullopt, seed, {}, 0};
    if (name == "paper1") {
        exp.candidates = {{"binomial(n=8,p=0.1)", b8, {}}, {"binomial(n=10,p=0.15)", b10, {}}};
    } else if (name == "paper2") {
        exp.generator = b10;
        exp.candidates = {{"binomial(n=10,p=0.15)", b10, {}}, {"binomial(n=8,p=0.1)", b8, {}}};
    } else if (name == "weibull-gamma") {
        const auto w = DistributionModel::weibull(1.2, 1.5);
        exp.generator = w;
        exp.candidates = {{"weibull(shape=1.2,scale=1.5)", w, {}},
                          {"gamma(a=2,b=0.5)", DistributionModel::gamma(2.0, 0.5), {}}};
        exp.sample_size = 1000;
        exp.truncation = KeepAbove{1.25};
        exp.num_bins = 11;
    } else {
        throw InvalidArgument("unknown experiment preset '" + name + "'");
    }
    return exp;
}

SelectionExperiment parse_experiment_config(const std::string& text) {
    std::optional<DistributionModel> generator;
    std::vector<Candidate> candidates;
    SelectionExperiment exp{DistributionModel::poisson(1.0), {}, 0, 10000, 100, KeepPoints{}, std::nullopt, 1, {}, 0};
    bool has_rule = false;

    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto s = trim(raw);
        if (s.empty() || s.front() == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ParseError("line " + std::to_string(line) + ": expected key = value");
        const std::string key(trim(s.substr(0, eq)));
        const std::string value(trim(s.substr(eq + 1)));
        auto set_rule = [&](TruncationRule rule) {
            if (has_rule) throw ParseError("only one truncation rule may be given");
            exp.truncation = std::move(rule);
            has_rule = true;
        };
        if (key == "generator") {
            generator = parse_model(value);
        } else if (key == "candidate") {
            candidates.push_back(candidate_from_literal(value));
        } else if (key == "correct") {
            exp.correct_index = parse_count(value);
        } else if (key == "replications") {
            exp.replications = parse_count(value);
        } else if (key == "sample_size") {
            exp.sample_size = parse_count(value);
        } else if (key == "keep") {
            set_rule(KeepPoints{parse_list(value)});
        } else if (key == "keep_above" || key == "cutoff_right") {
            set_rule(KeepAbove{parse_real(value)});
        } else if (key == "keep_below" || key == "cutoff_left") {
            set_rule(KeepBelow{parse_real(value)});
        } else if (key == "bins") {
            exp.num_bins = parse_count(value);
        } else if (key == "seed") {
            const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), exp.seed);
            if (ec != std::errc{} || end != value.data() + value.size()) {
                throw ParseError("line " + std::to_string(line) + ": invalid seed '" + value + "'");
            }
        } else {
            throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    if (!generator) throw ParseError("experiment config needs a generator");
    if (!has_rule) throw ParseError("experiment config needs a truncation rule (keep, keep_above or keep_below)");
    exp.generator = *generator;
    exp.candidates = std::move(candidates);
    exp.validate();
    return exp;
}

}  // namespace truncfit
