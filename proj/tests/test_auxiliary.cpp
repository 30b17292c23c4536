#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "truncfit/auxiliary.hpp"
#include "truncfit/error.hpp"
#include "truncfit/mixture.hpp"
#include "truncfit/rng.hpp"

using namespace truncfit;

namespace {

// the two mass functions of the decision example
double g1(double x) { return (x == 1 || x == 2 || x == 3) ? x / 6.0 : 0.0; }
double g2(double x) { return (x == 2 || x == 3 || x == 4) ? (x - 1) / 6.0 : 0.0; }

struct FormCase {
    DistributionModel truth;
    std::size_t index;
    std::vector<double> points;
};

std::vector<FormCase> form_cases() {
    return {{DistributionModel::binomial(10, 0.3), 1, {2, 3, 4, 5}},
            {DistributionModel::poisson(3.1), 0, {2, 3, 4, 5, 6, 7, 9}},
            {DistributionModel::normal(0.4, 1), 0, {-1.5, -1, -0.5, 0, 0.5, 1}},
            {DistributionModel::gamma(7, 3), 1, {8, 11, 14, 17, 20, 23}}};
}

FrequencyTable noisy_table(const DistributionModel& m, const std::vector<double>& pts, Rng& rng) {
    std::vector<double> c;
    for (double x : pts) c.push_back(1000 * m.density(x) * (0.7 + 0.6 * rng.uniform()));
    return FrequencyTable(pts, c);
}

}  // namespace

TEST_SUITE("aux") {

TEST_CASE("auxiliary distribution of the decision example") {
    const std::vector<double> pts{2, 3};
    const auto h1 = auxiliary(DensityFunction(g1), pts);
    CHECK(h1.values[0] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(h1.values[1] == doctest::Approx(0.6).epsilon(1e-14));
    const auto h2 = auxiliary(DensityFunction(g2), pts);
    CHECK(h2.values[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(h2.values[1] == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(h1.mean() == doctest::Approx(2.6));

    const std::vector<double> one{3};
    CHECK(auxiliary(DistributionModel::poisson(2), one).values == std::vector<double>{1.0});

    const std::vector<double> off{2, 5};
    CHECK_THROWS_AS(auxiliary(DensityFunction(g1), off), SupportMismatch);
    const std::vector<double> half{2, 2.5};
    CHECK_THROWS_AS(auxiliary(DistributionModel::poisson(2), half), SupportMismatch);
    CHECK_THROWS_AS(auxiliary(DistributionModel::poisson(2), std::vector<double>{}), InvalidArgument);
}

TEST_CASE("auxiliary keeps the parent's variations") {
    for (const auto& c : form_cases()) {
        const auto h = auxiliary(c.truth, c.points);
        double s = 0.0;
        for (double v : h.values) s += v;
        CHECK(std::abs(s - 1.0) < 1e-12);
        for (std::size_t i = 0; i < h.points.size(); ++i) {
            for (std::size_t j = 0; j < h.points.size(); ++j) {
                const double want = c.truth.density(c.points[i]) / c.truth.density(c.points[j]);
                REQUIRE(std::abs(h.values[i] / h.values[j] - want) <= 1e-12 * want);
            }
        }
    }
}

TEST_CASE("moment estimator examples") {
    SUBCASE("binomial on a truncation of Table 1") {
        const auto t = truncate(test::load("table1.csv"), Truncation{{2, 3, 4, 5}});
        const auto r = estimate_aux_moment(DistributionModel::binomial(10, 0.5), 1, t);
        CHECK(std::abs(r.estimate[0] - 0.3) <= 0.001);
        CHECK(r.method == Method::AuxMoment);
        CHECK(r.objective_at_estimate < 1e-6);
    }
    SUBCASE("poisson on Table 9") {
        const auto r = estimate_aux_moment(DistributionModel::poisson(1), 0, test::load("table9.csv"));
        CHECK(std::abs(r.estimate[0] - 3.1149) <= 0.001);
    }
    SUBCASE("binomial(4) on a sparse sample") {
        const auto t = drop_zero(FrequencyTable({0, 1, 2, 3, 4}, {13, 0, 0, 0, 2}));
        const auto r = estimate_aux_moment(DistributionModel::binomial(4, 0.5), 1, t);
        CHECK(std::abs(r.estimate[0] - 0.385) <= 0.002);
    }
    SUBCASE("normal mean on the trimmed left tail") {
        const auto t = truncate(test::load("table10.csv"), rows(test::load("table10.csv"), {2, 3, 4, 5, 6}));
        const auto r = estimate_aux_moment(DistributionModel::normal(0, 1), 0, t);
        const auto direct = estimate_tail_mean(t, t.mean(), 1.0);
        CHECK(r.estimate[0] == doctest::Approx(direct.m_aux).epsilon(1e-6));
        // the tail's own mean sits a little above the printed 0.1734
        CHECK(std::abs(t.mean() - 0.1734) < 0.01);
        CHECK(std::abs(r.estimate[0] - 1.3011) < 0.03);
    }
}

TEST_CASE("maximum likelihood and moments coincide on exponential forms") {
    Rng rng(17);
    for (const auto& c : form_cases()) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto t = noisy_table(c.truth, c.points, rng);
            const auto start = c.truth.with_param(c.index, c.truth.param(c.index) * 0.8);
            const double mom = estimate_aux_moment(start, c.index, t).estimate[0];
            const double ml = estimate_aux_ml(start, c.index, t).estimate[0];
            CAPTURE(c.truth.param(c.index));
            CHECK(std::abs(mom - ml) <= 1e-5 * std::max(1.0, std::abs(mom)));
        }
    }
}

TEST_CASE("exact tables are recovered") {
    for (const auto& c : form_cases()) {
        std::vector<double> counts;
        for (double x : c.points) counts.push_back(500 * c.truth.density(x));
        const FrequencyTable t(c.points, counts);
        const auto start = c.truth.with_param(c.index, c.truth.param(c.index) * 0.6);
        const double truth = c.truth.param(c.index);
        const double tol = 10 * OptimizerConfig{}.refine_tol * std::max(1.0, std::abs(truth));
        CAPTURE(truth);
        CHECK(std::abs(estimate_aux_moment(start, c.index, t).estimate[0] - truth) <= tol);
        CHECK(std::abs(estimate_aux_ml(start, c.index, t).estimate[0] - truth) <= 1e-5 * std::max(1.0, truth));

        const std::vector<double> pair{c.points[0], c.points[1]};
        const FrequencyTable two(pair, {counts[0], counts[1]});
        CHECK(std::abs(estimate_aux_moment(start, c.index, two).estimate[0] - truth) <= tol);
    }
}

TEST_CASE("two-parameter auxiliary likelihood") {
    const auto truth = DistributionModel::normal(0.5, 1.4);
    const std::vector<double> pts{-2, -1, 0, 1, 2, 3};
    std::vector<double> c;
    for (double x : pts) c.push_back(800 * truth.density(x));
    const std::vector<std::size_t> free{0, 1};
    const auto r = estimate_aux_ml(DistributionModel::normal(0, 1), free, FrequencyTable(pts, c));
    CHECK(r.estimate[0] == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(r.estimate[1] == doctest::Approx(1.4).epsilon(1e-4));
    CHECK(r.method == Method::AuxML);
}

TEST_CASE("count scaling leaves the estimates unchanged") {
    const auto t = test::load("table9.csv");
    const auto m0 = estimate_aux_moment(DistributionModel::poisson(1), 0, t).estimate[0];
    const auto l0 = estimate_aux_ml(DistributionModel::poisson(1), 0, t).estimate[0];
    for (double c : {0.01, 3.0, 250.0}) {
        CHECK(std::abs(estimate_aux_moment(DistributionModel::poisson(1), 0, t.scaled(c)).estimate[0] - m0) <= 1e-10);
        CHECK(std::abs(estimate_aux_ml(DistributionModel::poisson(1), 0, t.scaled(c)).estimate[0] - l0) <= 1e-10);
    }
}

TEST_CASE("proportional allocation") {
    const auto t9 = test::load("table9.csv");
    const std::vector<double> missing{0, 1};
    const auto a = allocate_missing(DistributionModel::poisson(3.1149), t9, missing);
    REQUIRE(a.size() == 2);
    CHECK(std::abs(a[0] - 4.29) <= 0.05);
    CHECK(std::abs(a[1] - 13.38) <= 0.05);

    const auto m = DistributionModel::poisson(2.5);
    std::vector<double> pts{1, 2, 3}, c;
    for (double x : pts) c.push_back(300 * m.density(x));
    const std::vector<double> again{2};
    CHECK(allocate_missing(m, FrequencyTable(pts, c), again)[0] == doctest::Approx(c[1]).epsilon(1e-12));

    CHECK(allocate_missing(m, t9, std::vector<double>{}).empty());
    const std::vector<double> bad{1.5};
    CHECK_THROWS_AS(allocate_missing(m, t9, bad), SupportMismatch);
    CHECK_THROWS_AS(allocate_missing(DistributionModel::binomial(5, 0.5), t9, missing), SupportMismatch);
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(estimate_aux_moment(DistributionModel::poisson(1), 0, FrequencyTable({2}, {3})), InvalidArgument);
    CHECK_THROWS_AS(estimate_aux_moment(DistributionModel::poisson(1), 0, FrequencyTable({2, 3}, {0, 3})),
                    InvalidArgument);
    CHECK_THROWS_AS(estimate_aux_ml(DistributionModel::poisson(1), 0, FrequencyTable({2, 3}, {0, 3})),
                    InvalidArgument);

    // classes of width 1 and 2.5
    const FrequencyTable uneven({0, 1, 3.5}, {4, 5, 6});
    CHECK_THROWS_AS(estimate_aux_moment(DistributionModel::normal(0, 1), 0, uneven), InvalidArgument);
    CHECK_THROWS_AS(estimate_aux_ml(DistributionModel::normal(0, 1), 0, uneven), InvalidArgument);
    // a missing class is fine
    CHECK_NOTHROW(estimate_aux_moment(DistributionModel::normal(0, 1), 0, FrequencyTable({0, 1, 3}, {4, 5, 6})));

    OptimizerConfig narrow;
    narrow.bounds = {{0.9, 0.95}};
    const auto t = truncate(test::load("table1.csv"), Truncation{{2, 3, 4, 5}});
    CHECK_THROWS_AS(estimate_aux_moment(DistributionModel::binomial(10, 0.5), 1, t, narrow), NoRootError);
    CHECK_THROWS_AS(estimate_aux_moment(DistributionModel::binomial(5, 0.5), 1, test::load("table1.csv")),
                    SupportMismatch);
}

}  // TEST_SUITE
