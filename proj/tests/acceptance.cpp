// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "truncfit/auxiliary.hpp"
#include "truncfit/distribution.hpp"
#include "truncfit/dv.hpp"
#include "truncfit/estimation.hpp"
#include "truncfit/gof.hpp"
#include "truncfit/reproduce.hpp"
#include "truncfit/rng.hpp"

using namespace truncfit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const std::filesystem::path kData = TRUNCFIT_DATA_DIR;

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

Outcome from_tables(std::initializer_list<ReproTable> tables) {
    Outcome o{true, {}};
    std::size_t checks = 0, misses = 0;
    std::vector<std::string> missed;
    for (const auto& t : tables) {
        checks += t.checks.size();
        for (const auto& c : t.checks) {
            if (c.pass()) continue;
            ++misses;
            missed.push_back(c.label + " expected " + fmt(c.expected) + " got " + fmt(c.actual));
        }
    }
    o.pass = misses == 0;
    o.detail = std::to_string(checks - misses) + "/" + std::to_string(checks) + " checks";
    for (const auto& m : missed) o.detail += "; " + m;
    return o;
}

ReproTable repro(const char* id, bool fast = false) {
    ReproOptions opt;
    opt.data_dir = kData;
    opt.fast = fast;
    return reproduce(id, opt);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome exact_ratio() {
    Outcome o{true, {}};
    auto note = [&](bool ok, const std::string& what) {
        o.pass = o.pass && ok;
        o.detail += (o.detail.empty() ? "" : "; ") + what + (ok ? "" : " (miss)");
    };
    const FrequencyTable b({0, 1}, {7, 30});
    const double p1 = estimate_min_dv(DistributionModel::binomial(10, 0.5), 1, b).estimate[0];
    const double p2 = estimate_aux_moment(DistributionModel::binomial(10, 0.5), 1, b).estimate[0];
    note(std::abs(p1 - 0.3) <= 1e-5 && std::abs(p2 - 0.3) <= 1e-5, "binomial p " + fmt(p1, 8) + "/" + fmt(p2, 8));

    const FrequencyTable g({30.13, 60.02}, {79.93, 100});
    const double b1 = estimate_min_dv(DistributionModel::gamma(10, 1), 1, g).estimate[0];
    const double b2 = estimate_aux_moment(DistributionModel::gamma(10, 1), 1, g).estimate[0];
    note(b1 >= 4.95 && b1 <= 5.05 && b2 >= 4.95 && b2 <= 5.05, "gamma b " + fmt(b1) + "/" + fmt(b2));

    const auto joint = load_csv(kData / "gamma_joint.csv");
    const std::vector<std::size_t> both{0, 1};
    const auto j = estimate_min_dv(DistributionModel::gamma(1, 1), both, joint);
    note(std::abs(j.estimate[0] - 10.0454) <= 0.05 && std::abs(j.estimate[1] - 4.9739) <= 0.05,
         "joint gamma (" + fmt(j.estimate[0], 6) + ", " + fmt(j.estimate[1], 6) + ")");
    return o;
}

EmpiricalTruncated random_distribution(Rng& rng, std::size_t m) {
    std::vector<double> pts(m), c(m);
    for (std::size_t i = 0; i < m; ++i) {
        pts[i] = double(i);
        c[i] = 0.05 + rng.uniform();
    }
    return empirical_truncated(FrequencyTable(pts, c));
}

Outcome properties() {
    Outcome o{true, {}};
    auto note = [&](bool ok, const std::string& what) {
        o.pass = o.pass && ok;
        o.detail += (o.detail.empty() ? "" : "; ") + what + (ok ? " ok" : " FAILED");
    };

    Rng rng(10);
    bool symmetric = true, triangle = true;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t m = 2 + k % 7;
        const auto p = random_distribution(rng, m), q = random_distribution(rng, m), r = random_distribution(rng, m);
        symmetric = symmetric && dv_tables(p, q).value == dv_tables(q, p).value;
        triangle = triangle && dv_tables(p, r).value <= dv_tables(p, q).value + dv_tables(q, r).value + 1e-9;
    }
    note(symmetric, "symmetry");
    note(triangle, "triangle inequality");

    const auto t9 = load_csv(kData / "table9.csv");
    const auto t3 = load_csv(kData / "table3.csv");
    bool scale = true;
    for (double c : {0.01, 3.0, 1000.0}) {
        const auto s9 = t9.scaled(c);
        const auto s3 = t3.scaled(c);
        scale = scale && std::abs(estimate_min_dv(DistributionModel::poisson(1), 0, s9).estimate[0] -
                                  estimate_min_dv(DistributionModel::poisson(1), 0, t9).estimate[0]) <= 1e-10;
        scale = scale && std::abs(estimate_aux_moment(DistributionModel::poisson(1), 0, s9).estimate[0] -
                                  estimate_aux_moment(DistributionModel::poisson(1), 0, t9).estimate[0]) <= 1e-10;
        scale = scale && std::abs(estimate_min_dv(DistributionModel::normal(0, 1), 0, s3).estimate[0] -
                                  estimate_min_dv(DistributionModel::normal(0, 1), 0, t3).estimate[0]) <= 1e-10;
        scale = scale && std::abs(estimate_aux_moment(DistributionModel::normal(0, 1), 0, s3).estimate[0] -
                                  estimate_aux_moment(DistributionModel::normal(0, 1), 0, t3).estimate[0]) <= 1e-10;
    }
    note(scale, "count scaling");

    const auto t1 = load_csv(kData / "table1.csv");
    bool decomposition = true;
    for (int k = 0; k < 200; ++k) {
        std::vector<double> kept;
        for (double x : t1.points()) {
            if (rng.uniform() < 0.5) kept.push_back(x);
        }
        if (kept.empty() || kept.size() == t1.size()) continue;
        const auto m = DistributionModel::binomial(10, 0.1 + 0.4 * rng.uniform());
        const double full = dv_model(m, t1).value;
        decomposition = decomposition && std::abs(dv_decompose(t1, Truncation{kept}, m).total() - full) <= 1e-12 * full;
    }
    note(decomposition, "decomposition");

    struct Form {
        DistributionModel model;
        std::size_t index;
        const char* table;
        Interval range;
    };
    const Form forms[] = {{DistributionModel::poisson(3), 0, "table9.csv", {0.0, std::log(8.0)}},
                          {DistributionModel::normal(0, 1), 0, "table3.csv", {-2, 2}},
                          {DistributionModel::binomial(10, 0.3), 1, "table1.csv", {-3, 1}},
                          {DistributionModel::gamma(7, 3), 1, "table5.csv", {0.1, 1}}};
    std::size_t violations = 0, checks = 0;
    for (const auto& f : forms) {
        const auto r = convexity_probe(exp_family_form(f.model, f.index), load_csv(kData / f.table),
                                       random_theta_pairs(100, f.range, 3));
        violations += r.violations.size();
        checks += r.checks;
    }
    note(violations == 0, "convexity (" + std::to_string(violations) + "/" + std::to_string(checks) + " violations)");

    const auto t5 = load_csv(kData / "table5.csv");
    const auto t1k = truncate(t1, Truncation{{2, 3, 4, 5}});
    const double gaps[] = {
        std::abs(estimate_aux_moment(DistributionModel::binomial(10, 0.5), 1, t1k).estimate[0] -
                 estimate_aux_ml(DistributionModel::binomial(10, 0.5), 1, t1k).estimate[0]),
        std::abs(estimate_aux_moment(DistributionModel::poisson(1), 0, t9).estimate[0] -
                 estimate_aux_ml(DistributionModel::poisson(1), 0, t9).estimate[0]),
        std::abs(estimate_aux_moment(DistributionModel::normal(0, 1), 0, t3).estimate[0] -
                 estimate_aux_ml(DistributionModel::normal(0, 1), 0, t3).estimate[0]),
        std::abs(estimate_aux_moment(DistributionModel::gamma(7, 1), 1, t5).estimate[0] -
                 estimate_aux_ml(DistributionModel::gamma(7, 1), 1, t5).estimate[0]),
    };
    note(*std::max_element(std::begin(gaps), std::end(gaps)) <= 1e-5, "moment/ML coincidence");
    return o;
}

Outcome consistency() {
    const auto truth = DistributionModel::poisson(3);
    auto median_error = [&](std::size_t n) {
        std::vector<double> err;
        for (std::uint64_t r = 0; r < 200; ++r) {
            std::vector<double> kept;
            for (double x : sample(truth, n, 7000 + r)) {
                if (x <= 6) kept.push_back(x);
            }
            err.push_back(std::abs(estimate_min_dv(truth, 0, tabulate(kept)).estimate[0] - 3.0));
        }
        return median(err);
    };
    const double small = median_error(100), large = median_error(10000);
    return {large < small && large < 0.05, "median |lambda - 3|: n=100 " + fmt(small) + ", n=10000 " + fmt(large)};
}

Outcome gof_level() {
    const auto m = DistributionModel::poisson(3);
    int rejected = 0, runs = 0;
    for (std::uint64_t rep = 0; runs < 500; ++rep) {
        std::vector<double> kept;
        for (double x : sample(m, 400, 90000 + rep)) {
            if (x >= 1 && x <= 6) kept.push_back(x);
        }
        const auto t = tabulate(kept);
        if (t.size() != 6) continue;
        ++runs;
        rejected += gof_test(m, t, 200, 0.05, rep).reject ? 1 : 0;
    }
    const double rate = double(rejected) / runs;
    return {std::abs(rate - 0.05) <= 0.03, "rejection rate " + fmt(rate) + " over " + std::to_string(runs) + " tables"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"AC1", "Table 2 reproduction", 10, [] { return from_tables({repro("T2")}); }},
        {"AC2", "Table 6 reproduction", 30, [] { return from_tables({repro("T6")}); }},
        {"AC3", "Table 4 reproduction", 30, [] { return from_tables({repro("T4")}); }},
        {"AC4", "exact-ratio recovery", 5, exact_ratio},
        {"AC5", "Hartley data", 5, [] { return from_tables({repro("hartley")}); }},
        {"AC6", "Table 8 reproduction", 5, [] { return from_tables({repro("T8")}); }},
        {"AC7", "decision threshold", 1, [] { return from_tables({repro("T7")}); }},
        {"AC8", "mixture tail means", 5, [] { return from_tables({repro("mixture")}); }},
        {"AC9", "selection rates, 10000 replications", 1800, [] { return from_tables({repro("selection")}); }},
        {"AC9-fast", "selection rates, 1000 replications", 30,
         [] { return from_tables({repro("selection", true)}); }},
        {"AC10", "property suites", 600, properties},
        {"AC11", "consistency Monte-Carlo", 60, consistency},
        {"AC12", "goodness-of-fit level", 60, gof_level},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s %-9s %-38s %8.2fs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str(),
                    in_time ? "" : " (over time limit)");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
