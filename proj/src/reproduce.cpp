#include "truncfit/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "truncfit/auxiliary.hpp"
#include "truncfit/error.hpp"
#include "truncfit/estimation.hpp"
#include "truncfit/mixture.hpp"
#include "truncfit/model_literal.hpp"
#include "truncfit/selection.hpp"

namespace truncfit {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::string_view kIds[] = {"T2", "T4", "T6", "T7", "T8", "hartley", "mixture", "selection"};

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

std::string list(const std::vector<double>& v) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '}';
    return os.str();
}

std::string row_list(const std::vector<std::size_t>& rows, const char* symbol) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < rows.size(); ++i) os << (i ? "," : "") << symbol << rows[i];
    os << '}';
    return os.str();
}

struct Context {
    const ReproOptions& opt;
    json expect;

    FrequencyTable table(const json& section) const {
        const auto path = opt.data_dir / section.at("table").get<std::string>();
        if (!fs::exists(path)) throw InvalidArgument("missing fixture " + path.string());
        return load_csv(path);
    }
};

FrequencyTable select_rows(const FrequencyTable& t, const std::vector<std::size_t>& one_based) {
    std::vector<double> kept;
    for (auto r : one_based) {
        if (r == 0 || r > t.size()) throw InvalidArgument("row " + std::to_string(r) + " is out of range");
        kept.push_back(t.points()[r - 1]);
    }
    return truncate(t, Truncation{kept});
}

void within(ReproTable& out, std::string label, double expected, double actual, double tol) {
    out.checks.push_back({std::move(label), expected, actual, tol, ReproCheck::Kind::Within});
}

void table2(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("T2");
    const auto full = c.table(e);
    const auto tmpl = parse_model_template(e.at("model").get<std::string>());
    const auto model = tmpl.instantiate();
    const auto free = tmpl.free_indices().at(0);
    const double tol = e.at("tolerance").get<double>();
    out.title = "Binomial(10, p) from truncations of Table 1";
    out.header = {"no", "keep", "n_t", "Q%", "p1 (min d_v)", "p2 (aux)", "paper p1", "paper p2"};
    int no = 0;
    for (const auto& row : e.at("rows")) {
        ++no;
        const auto keep = row.at("keep").get<std::vector<double>>();
        const auto t = truncate(full, Truncation{keep});
        const double q = 100.0 * (full.total() - t.total()) / full.total();
        const double p1 = estimate_min_dv(model, free, t).estimate[0];
        const double p2 = estimate_aux_moment(model, free, t).estimate[0];
        const double e1 = row.at("p1").get<double>(), e2 = row.at("p2").get<double>();
        out.rows.push_back({std::to_string(no), list(keep), fmt(t.total(), 0), fmt(q, 1), fmt(p1), fmt(p2),
                            fmt(e1), fmt(e2)});
        within(out, "row " + std::to_string(no) + " n_t", row.at("n_t").get<double>(), t.total(), 1e-9);
        within(out, "row " + std::to_string(no) + " p1", e1, p1, tol);
        within(out, "row " + std::to_string(no) + " p2", e2, p2, tol);
    }
}

void table4(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("T4");
    const auto full = c.table(e);
    const auto tmpl = parse_model_template(e.at("model").get<std::string>());
    const auto model = tmpl.instantiate();
    const auto free = tmpl.free_indices();
    const double tol = e.at("tolerance").get<double>();
    out.title = "Normal(m, sigma) jointly from truncations of Table 3";
    out.header = {"no", "rows", "n_t", "m1", "sigma1", "d_v", "paper m1", "paper sigma1"};
    int no = 0;
    for (const auto& row : e.at("rows")) {
        ++no;
        const auto rows = row.at("rows").get<std::vector<std::size_t>>();
        const auto t = select_rows(full, rows);
        const auto r = estimate_min_dv(model, free, t);
        const double em = row.at("m1").get<double>(), es = row.at("sigma1").get<double>();
        out.rows.push_back({std::to_string(no), row_list(rows, "y"), fmt(t.total(), 0), fmt(r.estimate[0]),
                            fmt(r.estimate[1]), fmt(r.objective_at_estimate, 5), fmt(em, 3), fmt(es, 3)});
        within(out, "row " + std::to_string(no) + " m1", em, r.estimate[0], tol);
        within(out, "row " + std::to_string(no) + " sigma1", es, r.estimate[1], tol);
    }
}

void table6(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("T6");
    const auto full = c.table(e);
    const auto tmpl = parse_model_template(e.at("model").get<std::string>());
    const auto model = tmpl.instantiate();
    const auto free = tmpl.free_indices().at(0);
    const double tol = e.at("tolerance").get<double>();
    out.title = "Gamma(7, b) from truncations of Table 5";
    out.header = {"no", "rows", "n_t", "b1 (min d_v)", "b2 (aux)", "paper b1", "paper b2"};
    int no = 0;
    for (const auto& row : e.at("rows")) {
        ++no;
        const auto rows = row.at("rows").get<std::vector<std::size_t>>();
        const auto t = select_rows(full, rows);
        const double b1 = estimate_min_dv(model, free, t).estimate[0];
        const double b2 = estimate_aux_moment(model, free, t).estimate[0];
        const double e1 = row.at("b1").get<double>(), e2 = row.at("b2").get<double>();
        out.rows.push_back({std::to_string(no), row_list(rows, "u"), fmt(t.total(), 0), fmt(b1), fmt(b2),
                            fmt(e1, 3), fmt(e2, 3)});
        within(out, "row " + std::to_string(no) + " b1", e1, b1, tol);
        within(out, "row " + std::to_string(no) + " b2", e2, b2, tol);
    }
}

void table7(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("T7");
    const std::vector<DensityFunction> g = {
        [](double x) { return (x == 1 || x == 2 || x == 3) ? x / 6.0 : 0.0; },
        [](double x) { return (x == 2 || x == 3 || x == 4) ? (x - 1) / 6.0 : 0.0; },
    };
    // alpha is the relative frequency of the value 2
    auto decide = [&](double alpha) {
        const FrequencyTable t({2.0, 3.0}, {alpha, 1.0 - alpha});
        return aux_likelihood_decide(g, t);
    };
    const double step = 1e-4;
    double lo = 0.0, hi = 0.0;
    std::size_t switches = 0;
    auto prev = decide(step);
    for (double a = 2 * step; a < 1.0 - step / 2; a += step) {
        auto d = decide(a);
        if (d != prev && d && prev) {
            ++switches;
            lo = a - step;
            hi = a;
        }
        if (d) prev = d;
    }
    const bool below_g2 = decide(lo) == std::optional<std::size_t>(1);
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (decide(mid) == std::optional<std::size_t>(1)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double threshold = 0.5 * (lo + hi);
    const double exact = -std::log(0.9) / std::log(4.0 / 3.0);
    const bool tie_at_exact = !decide(exact).has_value();

    out.title = "Auxiliary-likelihood decision between g1 and g2 on {2, 3}";
    out.header = {"quantity", "value"};
    out.rows = {{"switchover alpha", fmt(threshold, 6)},
                {"-log(9/10)/log(4/3)", fmt(exact, 6)},
                {"decision below", below_g2 ? "g2" : "g1"},
                {"decision above", decide(std::min(1.0, hi + step)) == std::optional<std::size_t>(0) ? "g1" : "g2"},
                {"at -log(9/10)/log(4/3)", tie_at_exact ? "indeterminate" : "decided"}};
    within(out, "threshold", e.at("threshold").get<double>(), threshold, e.at("tolerance").get<double>());
    within(out, "single switchover", 1.0, double(switches), 0.0);
    within(out, "g2 below threshold", 1.0, below_g2 ? 1.0 : 0.0, 0.0);
    within(out, "indeterminate at threshold", 1.0, tie_at_exact ? 1.0 : 0.0, 0.0);
}

void table8(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("T8");
    const int trials = e.at("trials").get<int>();
    const auto model = DistributionModel::binomial(trials, 0.5);
    const double tol = e.at("tolerance").get<double>();
    out.title = "Binomial(4, p): classical and auxiliary estimates per sample";
    out.header = {"sample", "counts 0..4", "x bar", "p hat", "p tilde", "paper p tilde"};
    int no = 0;
    for (const auto& s : e.at("samples")) {
        ++no;
        const auto counts = s.at("counts").get<std::vector<double>>();
        std::vector<double> pts(counts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = double(i);
        const FrequencyTable full(pts, counts);
        const double p_hat = full.mean() / trials;
        const double p = estimate_aux_moment(model, 1, drop_zero(full)).estimate[0];
        const double ep = s.at("p").get<double>();
        out.rows.push_back({std::to_string(no), list(counts), fmt(full.mean()), fmt(p_hat, 3), fmt(p), fmt(ep, 3)});
        within(out, "sample " + std::to_string(no) + " p hat", e.at("p_hat").get<double>(), p_hat,
               e.at("p_hat_tolerance").get<double>());
        within(out, "sample " + std::to_string(no) + " p tilde", ep, p, tol);
    }
}

void hartley(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("hartley");
    const auto t = c.table(e);
    const auto model = DistributionModel::poisson(1.0);
    const auto l2 = estimate_aux_moment(model, 0, t).estimate[0];
    const auto missing = e.at("missing").get<std::vector<double>>();
    const auto alloc = allocate_missing(model.with_param(0, l2), t, missing);
    const auto l1 = estimate_min_dv(model, 0, t).estimate[0];
    const auto trimmed = select_rows(t, [&] {
        std::vector<std::size_t> r(t.size() - 1);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = i + 1;
        return r;
    }());
    const auto l1t = estimate_min_dv(model, 0, trimmed).estimate[0];

    out.title = "Poisson fit to Hartley's truncated data";
    out.header = {"quantity", "value", "paper"};
    const auto& a = e.at("allocation");
    const auto av = a.at("values").get<std::vector<double>>();
    out.rows = {{"lambda2 (aux)", fmt(l2), fmt(e.at("lambda2").at("value").get<double>())},
                {"allocated n0", fmt(alloc.at(0), 3), fmt(av.at(0), 2)},
                {"allocated n1", fmt(alloc.at(1), 3), fmt(av.at(1), 2)},
                {"lambda1 (min d_v), all rows", fmt(l1), fmt(e.at("lambda1_full").at("value").get<double>())},
                {"lambda1 (min d_v), last row removed", fmt(l1t),
                 fmt(e.at("lambda1_trimmed").at("value").get<double>())}};
    auto chk = [&](const char* key, const char* label, double actual) {
        within(out, label, e.at(key).at("value").get<double>(), actual, e.at(key).at("tolerance").get<double>());
    };
    chk("lambda2", "lambda2", l2);
    within(out, "n0", av.at(0), alloc.at(0), a.at("tolerance").get<double>());
    within(out, "n1", av.at(1), alloc.at(1), a.at("tolerance").get<double>());
    chk("lambda1_full", "lambda1 full", l1);
    chk("lambda1_trimmed", "lambda1 trimmed", l1t);
}

void mixture(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("mixture");
    const double sigma = e.at("sigma").get<double>();
    out.title = "Tail-mean estimates for the two-component normal mixture";
    out.header = {"tail", "rows", "u bar", "m aux", "paper", "m d_v", "paper", "table mean", "m aux at table mean"};
    for (const char* side : {"left", "right"}) {
        const auto& s = e.at(side);
        const auto full = c.table(s);
        const double atol = s.at("aux_tolerance").get<double>();
        const double dtol = s.at("dv_tolerance").get<double>();
        const std::string name = std::string(side == std::string("left") ? "m1" : "m2");
        for (const char* variant : {"full", "trimmed"}) {
            const auto& v = s.at(variant);
            std::vector<std::size_t> rows;
            if (v.contains("rows")) {
                rows = v.at("rows").get<std::vector<std::size_t>>();
            } else {
                for (std::size_t i = 1; i <= full.size(); ++i) rows.push_back(i);
            }
            const auto t = select_rows(full, rows);
            const double ubar = v.at("tail_mean").get<double>();
            const auto est = estimate_tail_mean(t, ubar, sigma);
            const std::string label = name + " " + variant;
            const double table_mean = t.mean();
            std::vector<std::string> line = {side,
                                             row_list(rows, "u"),
                                             fmt(ubar),
                                             fmt(est.m_aux),
                                             fmt(v.at("m_aux").get<double>()),
                                             fmt(est.m_dv),
                                             "-",
                                             fmt(table_mean),
                                             fmt(estimate_tail_mean(t, table_mean, sigma).m_aux)};
            within(out, label + " aux", v.at("m_aux").get<double>(), est.m_aux, atol);
            if (v.contains("m_dv")) {
                line[6] = fmt(v.at("m_dv").get<double>());
                within(out, label + " d_v", v.at("m_dv").get<double>(), est.m_dv, dtol);
            }
            out.rows.push_back(std::move(line));
        }
    }
}

void selection(const Context& c, ReproTable& out) {
    const auto& e = c.expect.at("selection");
    const bool fast = c.opt.fast;
    const auto reps = e.at(fast ? "fast_replications" : "replications").get<std::size_t>();
    const double min_rate = e.at(fast ? "fast_min_rate" : "min_rate").get<double>();
    out.title = "Correct-selection rates by minimum d_v";
    out.header = {"experiment", "replications", "scored", "excluded", "rate"};
    for (const auto& name : e.at("experiments")) {
        auto exp = preset_experiment(name.get<std::string>(), reps, c.opt.seed);
        exp.threads = c.opt.threads;
        const auto r = run_selection_experiment(exp);
        out.rows.push_back({name.get<std::string>(), std::to_string(reps), std::to_string(r.scored),
                            std::to_string(r.excluded), fmt(r.rate)});
        out.checks.push_back({name.get<std::string>() + " rate", min_rate, r.rate, 0.0, ReproCheck::Kind::AtLeast});
    }
}

const std::map<std::string_view, std::function<void(const Context&, ReproTable&)>>& handlers() {
    static const std::map<std::string_view, std::function<void(const Context&, ReproTable&)>> h = {
        {"T2", table2},   {"T4", table4},         {"T6", table6},       {"T7", table7},
        {"T8", table8},   {"hartley", hartley},   {"mixture", mixture}, {"selection", selection},
    };
    return h;
}

}  // namespace

bool ReproCheck::pass() const {
    if (!std::isfinite(actual)) return false;
    if (kind == Kind::AtLeast) return actual >= expected;
    return std::abs(actual - expected) <= tolerance + 1e-12;
}

bool ReproTable::passed() const { return failures() == 0; }

std::size_t ReproTable::failures() const {
    return std::count_if(checks.begin(), checks.end(), [](const ReproCheck& c) { return !c.pass(); });
}

std::span<const std::string_view> reproduce_ids() { return kIds; }

ReproTable reproduce(std::string_view id, const ReproOptions& options) {
    const auto it = handlers().find(id);
    if (it == handlers().end()) throw InvalidArgument("unknown table id '" + std::string(id) + "'");
    const auto path = options.data_dir / "expectations.json";
    std::ifstream in(path);
    if (!in) throw InvalidArgument("missing fixture " + path.string());
    Context ctx{options, json::parse(in, nullptr, true, true)};

    ReproTable out;
    out.id = std::string(id);
    const auto start = std::chrono::steady_clock::now();
    it->second(ctx, out);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string format_table(const ReproTable& t) {
    std::vector<std::size_t> width(t.header.size(), 0);
    for (std::size_t k = 0; k < t.header.size(); ++k) width[k] = t.header[k].size();
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size() && k < width.size(); ++k) width[k] = std::max(width[k], r[k].size());
    }
    std::ostringstream os;
    os << t.id << ": " << t.title << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size() && k < width.size(); ++k) {
            os << (k ? "  " : "") << std::left << std::setw(int(width[k])) << cells[k];
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    for (const auto& c : t.checks) {
        if (c.pass()) continue;
        os << "  MISS " << c.label << ": got " << std::setprecision(6) << c.actual
           << (c.kind == ReproCheck::Kind::AtLeast ? ", need >= " : ", expected ") << c.expected;
        if (c.kind == ReproCheck::Kind::Within) os << " +/- " << c.tolerance;
        os << '\n';
    }
    os << (t.passed() ? "PASS" : "FAIL") << ' ' << t.id << " (" << t.checks.size() - t.failures() << '/'
       << t.checks.size() << " checks, " << std::fixed << std::setprecision(2) << t.seconds << " s)\n";
    return os.str();
}

}  // namespace truncfit
