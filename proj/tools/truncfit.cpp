#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "truncfit/auxiliary.hpp"
#include "truncfit/dv.hpp"
#include "truncfit/error.hpp"
#include "truncfit/estimation.hpp"
#include "truncfit/frequency_table.hpp"
#include "truncfit/gof.hpp"
#include "truncfit/mixture.hpp"
#include "truncfit/model_literal.hpp"
#include "truncfit/report.hpp"
#include "truncfit/reproduce.hpp"
#include "truncfit/selection.hpp"

#ifndef TRUNCFIT_DATA_DIR
#define TRUNCFIT_DATA_DIR "data"
#endif

using namespace truncfit;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kParse = 2, kInfeasible = 3, kOptimizer = 4 };

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used == 0 || used != item.size()) throw ParseError("invalid number '" + item + "' in list");
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("empty list");
    return out;
}

std::vector<Interval> parse_bounds(const std::string& text) {
    std::vector<Interval> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ParseError("bounds must look like lo:hi[,lo:hi]");
        const auto lo = parse_reals(item.substr(0, colon));
        const auto hi = parse_reals(item.substr(colon + 1));
        out.push_back({lo[0], hi[0]});
    }
    return out;
}

struct TableInput {
    std::string table;
    std::string sample;
    std::string keep;
    std::optional<double> cutoff_right;
    std::optional<double> cutoff_left;
    std::size_t bins = 0;
    bool drop_zero = false;

    void add_options(CLI::App* cmd) {
        auto* t = cmd->add_option("--table", table, "Frequency table CSV (point,count)");
        auto* s = cmd->add_option("--sample", sample, "Raw sample, one value per line");
        t->excludes(s);
        cmd->add_option("--keep", keep, "Comma-separated support points to keep");
        cmd->add_option("--cutoff-right", cutoff_right, "Keep raw observations above this value");
        cmd->add_option("--cutoff-left", cutoff_left, "Keep raw observations below this value");
        cmd->add_option("--bins", bins, "Bin the raw sample into this many equal-width classes");
        cmd->add_flag("--drop-zero", drop_zero, "Remove zero-count rows before fitting");
    }

    std::vector<std::filesystem::path> paths() const {
        return {table.empty() ? std::filesystem::path(sample) : std::filesystem::path(table)};
    }

    FrequencyTable load() const {
        if (table.empty() == sample.empty()) throw ParseError("give exactly one of --table or --sample");
        std::optional<FrequencyTable> t;
        if (!table.empty()) {
            if (cutoff_left || cutoff_right || bins) {
                throw ParseError("--cutoff-left, --cutoff-right and --bins apply to --sample only");
            }
            t = load_csv(table);
        } else {
            auto values = load_sample(sample);
            std::erase_if(values, [&](double x) {
                return (cutoff_right && !(x > *cutoff_right)) || (cutoff_left && !(x < *cutoff_left));
            });
            if (values.empty()) throw InvalidArgument("no observations survive the cut-offs");
            t = bins ? bin_sample(values, bins) : tabulate(values);
        }
        if (!keep.empty()) t = truncate(*t, Truncation{parse_reals(keep)});
        if (drop_zero) t = truncfit::drop_zero(*t);
        return *t;
    }
};

struct Output {
    std::string json_path;
    std::vector<std::string> argv;

    void write(ReportDocument doc) const {
        if (json_path.empty()) return;
        doc.command = argv;
        std::ofstream out(json_path);
        if (!out) throw InvalidArgument("cannot write " + json_path);
        out << doc.to_json().dump(2) << '\n';
    }
};

std::vector<std::size_t> resolve_free(const ModelTemplate& tmpl, const std::string& names) {
    if (names.empty()) return tmpl.free_indices();
    std::vector<std::size_t> out;
    std::stringstream ss(names);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        out.push_back(param_index(tmpl.family, item));
    }
    return out;
}

void print_report(const EstimationReport& r) {
    const auto names = param_names(r.fitted.family());
    std::cout << std::left << std::setw(11) << method_name(r.method);
    for (std::size_t k = 0; k < r.free_indices.size(); ++k) {
        std::cout << ' ' << names[r.free_indices[k]] << " = " << std::setprecision(8) << r.estimate[k];
    }
    std::cout << "   objective " << std::setprecision(6) << r.objective_at_estimate << "   evaluations "
              << r.evaluations << (r.converged ? "" : "   (not converged)") << '\n';
}

int run_estimate(const TableInput& in, const std::string& model_text, const std::string& free_names,
                 const std::string& method, const std::string& bounds, int grid, double credibility,
                 const Output& out) {
    const auto table = in.load();
    const auto tmpl = parse_model_template(model_text);
    const auto free = resolve_free(tmpl, free_names);
    auto model = tmpl.instantiate();
    OptimizerConfig cfg;
    cfg.grid_points = grid;
    if (!bounds.empty()) cfg.bounds = parse_bounds(bounds);

    ReportDocument doc;
    doc.input_digest = digest_files(in.paths());
    auto aux = [&] {
        if (method == "aux-ml" || free.size() > 1) return estimate_aux_ml(model, free, table, cfg);
        return estimate_aux_moment(model, free[0], table, cfg);
    };
    if (method == "mindv") {
        doc.reports.push_back(estimate_min_dv(model, free, table, cfg));
    } else if (method == "aux-moment" || method == "aux-ml") {
        if (method == "aux-moment" && free.size() > 1) {
            throw InvalidArgument("aux-moment estimates one parameter; use aux-ml for two");
        }
        doc.reports.push_back(aux());
    } else {
        auto d = estimate_min_dv(model, free, table, cfg);
        auto a = aux();
        double gap = 0.0, rel = 0.0;
        for (std::size_t k = 0; k < free.size(); ++k) {
            const double g = std::abs(d.estimate[k] - a.estimate[k]);
            gap = std::max(gap, g);
            rel = std::max(rel, g / std::max(std::abs(a.estimate[k]), 1e-12));
        }
        d.agreement_gap = a.agreement_gap = gap;
        doc.reports = {d, a};
        doc.result = {{"agreement_gap", gap}, {"relative_gap", rel}, {"credible", rel <= credibility},
                      {"credibility_threshold", credibility}};
    }

    std::cout << "table: " << table.size() << " points, n_t = " << table.total() << '\n';
    for (const auto& r : doc.reports) print_report(r);
    if (doc.reports.size() == 2) {
        const bool credible = doc.result.at("credible").get<bool>();
        std::cout << "agreement gap " << doc.result.at("agreement_gap").get<double>() << " ("
                  << 100.0 * doc.result.at("relative_gap").get<double>() << "%): "
                  << (credible ? "credible" : "methods disagree") << '\n';
        if (!credible) doc.warnings.push_back("the two methods disagree beyond the credibility threshold");
    }
    out.write(std::move(doc));
    return kOk;
}

int run_reproduce(std::vector<std::string> ids, const std::string& data_dir, bool fast, std::uint64_t seed,
                  const Output& out) {
    if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) {
        ids.clear();
        for (auto id : reproduce_ids()) ids.emplace_back(id);
    }
    ReproOptions opt{data_dir, fast, seed, 0};
    ReportDocument doc;
    doc.input_digest = digest_files(std::vector<std::filesystem::path>{std::filesystem::path(data_dir) /
                                                                       "expectations.json"});
    doc.result = Json::object();
    bool ok = true;
    for (const auto& id : ids) {
        const auto t = reproduce(id, opt);
        std::cout << format_table(t) << '\n';
        ok = ok && t.passed();
        Json checks = Json::array();
        for (const auto& c : t.checks) {
            checks.push_back({{"label", c.label}, {"expected", c.expected}, {"actual", c.actual},
                              {"tolerance", c.tolerance}, {"pass", c.pass()}});
        }
        doc.result[t.id] = {{"passed", t.passed()}, {"seconds", t.seconds}, {"checks", checks}};
        if (!t.passed()) doc.warnings.push_back(t.id + ": " + std::to_string(t.failures()) + " checks missed");
    }
    out.write(std::move(doc));
    return ok ? kOk : kFailure;
}

int run_simulate(const std::string& model_text, std::size_t count, std::uint64_t seed, std::optional<double> right,
                 std::optional<double> left, std::size_t bins, const std::string& keep, const std::string& path) {
    const auto model = parse_model(model_text);
    auto values = sample(model, count, seed);
    std::erase_if(values, [&](double x) { return (right && !(x > *right)) || (left && !(x < *left)); });
    std::ostringstream text;
    if (bins || !keep.empty()) {
        if (values.empty()) throw InvalidArgument("no observations survive the cut-offs");
        auto t = bins ? bin_sample(values, bins) : tabulate(values);
        if (!keep.empty()) t = truncate(t, Truncation{parse_reals(keep)});
        text << to_csv(t);
    } else {
        text << std::setprecision(17);
        for (double v : values) text << v << '\n';
    }
    if (path.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream f(path);
        if (!f) throw InvalidArgument("cannot write " + path);
        f << text.str();
    }
    return kOk;
}

int report_experiment(const SelectionExperiment& exp, const Output& out) {
    const auto r = run_selection_experiment(exp);
    std::cout << "replications " << exp.replications << ", scored " << r.scored << ", excluded " << r.excluded
              << '\n'
              << "correct selections " << r.correct << " (rate " << std::setprecision(4) << std::fixed << r.rate
              << ")\n";
    ReportDocument doc;
    doc.result = to_json(r);
    doc.result["generator"] = to_json(exp.generator);
    if (r.excluded) doc.warnings.push_back(std::to_string(r.excluded) + " replications excluded by truncation");
    out.write(std::move(doc));
    return kOk;
}

int run_select_table(const TableInput& in, const std::vector<std::string>& literals, const Output& out) {
    const auto table = in.load();
    std::vector<Candidate> cands;
    for (const auto& lit : literals) {
        const auto tmpl = parse_model_template(lit);
        cands.push_back({lit, tmpl.instantiate(), tmpl.free_indices()});
    }
    const auto res = select_model(cands, table);
    for (const auto& r : res.ranked) {
        std::cout << std::left << std::setw(32) << r.id << " d_v = " << std::setprecision(8) << r.dv << "   "
                  << format_model(r.fitted) << '\n';
    }
    std::cout << "winner: " << res.winner << '\n';
    ReportDocument doc;
    doc.input_digest = digest_files(in.paths());
    doc.result = to_json(res);
    out.write(std::move(doc));
    return kOk;
}

int run_gof(const TableInput& in, const std::string& model_text, std::size_t N, double alpha, std::uint64_t seed,
            const Output& out) {
    const auto table = in.load();
    const auto model = parse_model(model_text);
    const auto g = gof_test(model, table, N, alpha, seed);
    std::cout << "observed d_v " << g.observed_dv << "\nF(d_obs) " << g.empirical_cdf_at_observed << "  ("
              << g.N << " replicates, " << g.resampled << " redrawn)\n"
              << "critical value at alpha = " << alpha << ": " << g.critical_value << '\n'
              << (g.reject ? "reject" : "do not reject") << '\n';
    ReportDocument doc;
    doc.input_digest = digest_files(in.paths());
    doc.result = to_json(g);
    out.write(std::move(doc));
    return kOk;
}

int run_mixture(const std::string& path, double s1, double s2, std::size_t bins, std::optional<double> trim,
                const Output& out) {
    const auto values = load_sample(path);
    const auto m = estimate_mixture_init(values, s1, s2, bins, {}, trim);
    const bool undetermined = m.split.side_of_m1 == MixtureSide::Undetermined;
    std::cout << std::setprecision(6) << "m_g " << m.split.m_g << "  S_l " << m.split.s_l << "  S_r "
              << m.split.s_r << "  sup_l " << m.split.sup_l << "  min_r " << m.split.min_r << '\n'
              << "side of m1: " << side_name(m.split.side_of_m1) << '\n'
              << (undetermined ? "LeftMean " : "m1 ") << "aux " << m.m1.m_aux << "  d_v " << m.m1.m_dv
              << "  (tail mean " << m.m1.tail_mean << ", " << m.m1.rows << " classes)\n"
              << (undetermined ? "RightMean " : "m2 ") << "aux " << m.m2.m_aux << "  d_v " << m.m2.m_dv
              << "  (tail mean " << m.m2.tail_mean << ", " << m.m2.rows << " classes)\n"
              << "alpha " << m.alpha << (m.alpha_clamped ? " (clamped)" : "") << '\n';
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
    ReportDocument doc;
    doc.input_digest = digest_files(std::vector<std::filesystem::path>{path});
    doc.result = to_json(m);
    doc.warnings = m.warnings;
    out.write(std::move(doc));
    return kOk;
}

int run_allocate(const TableInput& in, const std::string& model_text, const std::string& missing,
                 const Output& out) {
    const auto table = in.load();
    const auto model = parse_model(model_text);
    const auto pts = parse_reals(missing);
    const auto alloc = allocate_missing(model, table, pts);
    Json rows = Json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::cout << pts[i] << ',' << std::setprecision(8) << alloc[i] << '\n';
        rows.push_back({{"point", pts[i]}, {"count", alloc[i]}});
    }
    ReportDocument doc;
    doc.input_digest = digest_files(in.paths());
    doc.result = {{"model", to_json(model)}, {"allocations", rows}};
    out.write(std::move(doc));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parameter estimation from truncated and grouped frequency data"};
    app.require_subcommand(1);
    Output out;
    out.argv.assign(argv, argv + argc);

    auto add_json = [&](CLI::App* c) { c->add_option("--json", out.json_path, "Write a JSON report to this path"); };

    TableInput est_in;
    std::string est_model, est_free, est_method = "both", est_bounds;
    int est_grid = 200;
    double est_cred = 0.05;
    auto* est = app.add_subcommand("estimate", "Estimate free parameters of a model");
    est_in.add_options(est);
    est->add_option("--model", est_model, "Model literal; omitted parameters are free")->required();
    est->add_option("--free", est_free, "Comma-separated names of the free parameters");
    est->add_option("--method", est_method, "mindv, aux-moment, aux-ml or both")
        ->check(CLI::IsMember({"mindv", "aux-moment", "aux-ml", "both"}));
    est->add_option("--bounds", est_bounds, "Search bounds lo:hi per free parameter");
    est->add_option("--grid", est_grid, "Grid points per dimension");
    est->add_option("--credibility", est_cred, "Relative agreement gap still called credible");
    add_json(est);

    std::vector<std::string> rep_ids;
    std::string data_dir = TRUNCFIT_DATA_DIR;
    bool rep_fast = false;
    std::uint64_t seed = 1;
    auto* rep = app.add_subcommand("reproduce", "Regenerate the published tables and compare");
    rep->add_option("ids", rep_ids, "T2 T4 T6 T7 T8 hartley mixture selection, or all");
    rep->add_option("--data-dir", data_dir, "Fixture directory");
    rep->add_flag("--fast", rep_fast, "1000 replications for the selection experiments");
    rep->add_option("--seed", seed, "Seed for the selection experiments");
    add_json(rep);

    std::string sim_model, sim_out, sim_keep;
    std::size_t sim_count = 100, sim_bins = 0;
    std::optional<double> sim_right, sim_left;
    auto* sim = app.add_subcommand("simulate", "Draw a seeded sample");
    sim->add_option("--model", sim_model, "Fully specified model literal")->required();
    sim->add_option("--count", sim_count, "Number of draws");
    sim->add_option("--seed", seed, "Random seed");
    sim->add_option("--cutoff-right", sim_right, "Keep draws above this value");
    sim->add_option("--cutoff-left", sim_left, "Keep draws below this value");
    sim->add_option("--bins", sim_bins, "Write a binned table instead of raw values");
    sim->add_option("--keep", sim_keep, "Tabulate and keep these support points");
    sim->add_option("--out", sim_out, "Output file (default stdout)");

    std::string sel_exp;
    std::vector<std::string> sel_cands;
    TableInput sel_in;
    std::size_t sel_reps = 10000;
    bool sel_fast = false;
    unsigned threads = 0;
    auto* sel = app.add_subcommand("select", "Model selection by minimum d_v");
    sel->add_option("--experiment", sel_exp, "Preset: paper1, paper2, weibull-gamma");
    sel->add_option("--candidate", sel_cands, "Candidate model literal (repeat); omitted parameters are fitted");
    sel_in.add_options(sel);
    sel->add_option("--replications", sel_reps, "Replications for a preset experiment");
    sel->add_flag("--fast", sel_fast, "1000 replications");
    sel->add_option("--seed", seed, "Random seed");
    sel->add_option("--threads", threads, "Worker threads (0 = all cores)");
    add_json(sel);

    std::string exp_config;
    auto* expc = app.add_subcommand("experiment", "Run a selection experiment from a key = value file");
    expc->add_option("--config", exp_config, "Experiment config file")->required();
    expc->add_option("--seed", seed, "Override the config seed");
    expc->add_option("--threads", threads, "Worker threads (0 = all cores)");
    add_json(expc);

    TableInput gof_in;
    std::string gof_model;
    std::size_t gof_n = 1000;
    double gof_alpha = 0.05;
    auto* gof = app.add_subcommand("gof", "Monte-Carlo goodness-of-fit test based on d_v");
    gof_in.add_options(gof);
    gof->add_option("--model", gof_model, "Fully specified model literal")->required();
    gof->add_option("-N,--replicates", gof_n, "Simulated replicates");
    gof->add_option("--alpha", gof_alpha, "Significance level");
    gof->add_option("--seed", seed, "Random seed");
    add_json(gof);

    std::string mix_sample;
    double sigma1 = 1.0, sigma2 = 1.0;
    std::size_t mix_bins = 7;
    std::optional<double> mix_trim;
    auto* mix = app.add_subcommand("mixture-init", "Initial values for a two-component normal mixture");
    mix->add_option("--sample", mix_sample, "Merged sample, one value per line")->required();
    mix->add_option("--sigma1", sigma1, "Known deviation of component 1")->required();
    mix->add_option("--sigma2", sigma2, "Known deviation of component 2")->required();
    mix->add_option("--bins", mix_bins, "Classes per tail");
    mix->add_option("--trim-min-count", mix_trim, "Drop tail classes with fewer observations");
    add_json(mix);

    TableInput alloc_in;
    std::string alloc_model, alloc_missing;
    auto* alloc = app.add_subcommand("allocate", "Proportional allocation of unobserved cells");
    alloc_in.add_options(alloc);
    alloc->add_option("--model", alloc_model, "Fully specified model literal")->required();
    alloc->add_option("--missing", alloc_missing, "Comma-separated unobserved points")->required();
    add_json(alloc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    try {
        if (*est) return run_estimate(est_in, est_model, est_free, est_method, est_bounds, est_grid, est_cred, out);
        if (*rep) return run_reproduce(rep_ids, data_dir, rep_fast, seed, out);
        if (*sim) return run_simulate(sim_model, sim_count, seed, sim_right, sim_left, sim_bins, sim_keep, sim_out);
        if (*sel) {
            if (!sel_exp.empty()) {
                auto exp = preset_experiment(sel_exp, sel_fast ? 1000 : sel_reps, seed);
                exp.threads = threads;
                return report_experiment(exp, out);
            }
            if (sel_cands.size() < 2) throw ParseError("give --experiment or at least two --candidate models");
            return run_select_table(sel_in, sel_cands, out);
        }
        if (*expc) {
            std::ifstream f(exp_config);
            if (!f) throw ParseError("cannot open " + exp_config);
            std::stringstream ss;
            ss << f.rdbuf();
            auto exp = parse_experiment_config(ss.str());
            if (expc->count("--seed")) exp.seed = seed;
            exp.threads = threads;
            return report_experiment(exp, out);
        }
        if (*gof) return run_gof(gof_in, gof_model, gof_n, gof_alpha, seed, out);
        if (*mix) return run_mixture(mix_sample, sigma1, sigma2, mix_bins, mix_trim, out);
        if (*alloc) return run_allocate(alloc_in, alloc_model, alloc_missing, out);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const SupportMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInfeasible;
    } catch (const UnsupportedForm& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInfeasible;
    } catch (const OptimizerError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOptimizer;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
