#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "truncfit/auxiliary.hpp"
#include "truncfit/dv.hpp"
#include "truncfit/error.hpp"
#include "truncfit/rng.hpp"

using namespace truncfit;

namespace {

EmpiricalTruncated random_distribution(Rng& rng, const std::vector<double>& pts) {
    std::vector<double> c(pts.size());
    for (auto& x : c) x = 0.05 + rng.uniform();
    return empirical_truncated(FrequencyTable(pts, c));
}

std::vector<double> iota_points(std::size_t m) {
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = double(i);
    return p;
}

}  // namespace

TEST_SUITE("dv") {

TEST_CASE("hand-computed values") {
    const EmpiricalTruncated p{{0, 1}, {0.5, 0.5}};
    const EmpiricalTruncated q{{0, 1}, {1.0 / 3, 2.0 / 3}};
    const auto d = dv_tables(p, q);
    CHECK(d.value == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(d.pair_count == 2);
    CHECK(dv_tables(p, p).value == 0.0);
}

TEST_CASE("zero distance at the exact ratio") {
    const FrequencyTable t({0, 1}, {7, 30});
    CHECK(dv_model(DistributionModel::binomial(10, 0.3), t).value < 1e-12);
    const auto h = auxiliary(DistributionModel::binomial(10, 0.3), t.points());
    CHECK(dv_tables(empirical_truncated(t), EmpiricalTruncated{h.points, h.values}).value < 1e-12);
}

TEST_CASE("table generated from the model") {
    const auto m = DistributionModel::poisson(3.3);
    std::vector<double> pts{1, 2, 3, 4, 6}, c;
    for (double x : pts) c.push_back(1000 * m.density(x));
    const auto d = dv_model(m, FrequencyTable(pts, c));
    CHECK(d.value < 1e-12);
    CHECK(d.pair_count == 20);
}

TEST_CASE("dv_model equals dv_tables against the restricted model") {
    const auto t = truncate(test::load("table1.csv"), Truncation{{2, 3, 4, 5}});
    const auto m = DistributionModel::binomial(10, 0.31);
    const auto h = auxiliary(m, t.points());
    CHECK(dv_model(m, t).value ==
          doctest::Approx(dv_tables(empirical_truncated(t), EmpiricalTruncated{h.points, h.values}).value)
              .epsilon(1e-12));
}

TEST_CASE("errors") {
    const auto t1 = test::load("table1.csv");
    try {
        dv_model(DistributionModel::binomial(5, 0.3), t1);
        FAIL("expected SupportMismatch");
    } catch (const SupportMismatch& e) {
        CHECK(e.point() == 6);
        CHECK(std::string(e.what()).find('6') != std::string::npos);
    }
    CHECK_THROWS_AS(dv_model(DistributionModel::normal(0, 1), FrequencyTable({0, 60}, {1, 1})), SupportMismatch);
    CHECK_THROWS_AS(dv_model(DistributionModel::poisson(2), FrequencyTable({0, 1}, {0, 1})), InvalidArgument);
    CHECK_THROWS_AS(dv_tables(EmpiricalTruncated{{0, 1}, {0.5, 0.5}}, EmpiricalTruncated{{0, 2}, {0.5, 0.5}}),
                    InvalidArgument);
    CHECK_THROWS_AS(dv_tables(EmpiricalTruncated{{0, 1}, {1.0, 0.0}}, EmpiricalTruncated{{0, 1}, {0.5, 0.5}}),
                    InvalidArgument);
}

TEST_CASE("symmetry is exact") {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = iota_points(2 + trial % 9);
        const auto p = random_distribution(rng, pts);
        const auto q = random_distribution(rng, pts);
        REQUIRE(dv_tables(p, q).value == dv_tables(q, p).value);
    }
}

TEST_CASE("triangle inequality") {
    Rng rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto pts = iota_points(2 + trial % 7);
        const auto p = random_distribution(rng, pts);
        const auto q = random_distribution(rng, pts);
        const auto r = random_distribution(rng, pts);
        REQUIRE(dv_tables(p, r).value <= dv_tables(p, q).value + dv_tables(q, r).value + 1e-9);
    }
}

TEST_CASE("identity of variations") {
    Rng rng(3);
    const auto pts = iota_points(5);
    const auto p = random_distribution(rng, pts);
    // proportional counts give the same distribution and zero distance
    std::vector<double> scaled;
    for (double x : p.probs) scaled.push_back(37.5 * x);
    const auto same = empirical_truncated(FrequencyTable(pts, scaled));
    CHECK(dv_tables(p, same).value < 1e-12);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(same.probs[i] == doctest::Approx(p.probs[i]).epsilon(1e-12));
    // a change in one cell gives a positive distance
    auto other = scaled;
    other[2] *= 1.001;
    CHECK(dv_tables(p, empirical_truncated(FrequencyTable(pts, other))).value > 0.0);
}

TEST_CASE("count scaling leaves dv_model unchanged") {
    const auto t = test::load("table3.csv");
    const auto m = DistributionModel::normal(0.1, 1.1);
    const double base = dv_model(m, t).value;
    for (double c : {1e-3, 0.37, 2.0, 1e4}) {
        CHECK(std::abs(dv_model(m, t.scaled(c)).value - base) <= 1e-12 * base);
    }
}

TEST_CASE("decomposition") {
    const auto t1 = test::load("table1.csv");
    const auto m = DistributionModel::binomial(10, 0.3);

    const auto d = dv_decompose(t1, Truncation{{2, 3, 4, 5}}, m);
    CHECK(std::abs(d.total() - dv_model(m, t1).value) < 1e-12 * dv_model(m, t1).value);
    CHECK(d.observed == doctest::Approx(dv_model(m, truncate(t1, Truncation{{2, 3, 4, 5}})).value));
    CHECK(d.unobserved == doctest::Approx(dv_model(m, truncate(t1, Truncation{{0, 1, 6, 7}})).value));

    const auto one_out = dv_decompose(t1, Truncation{{0, 1, 2, 3, 4, 5, 6}}, m);
    CHECK(one_out.unobserved == 0.0);

    std::vector<double> c;
    for (double x : t1.points()) c.push_back(500 * m.density(x));
    const auto exact = dv_decompose(FrequencyTable(t1.points(), c), Truncation{{1, 2}}, m);
    CHECK(exact.observed < 1e-12);
    CHECK(exact.unobserved < 1e-12);
    CHECK(exact.cross < 1e-12);

    CHECK_THROWS_AS(dv_decompose(t1, Truncation{t1.points()}, m), InvalidArgument);
}

TEST_CASE("decomposition identity on random splits") {
    Rng rng(4);
    const auto t = test::load("table5.csv");
    const auto m = DistributionModel::gamma(7, 3.1);
    const double full = dv_model(m, t).value;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> kept;
        for (double x : t.points()) {
            if (rng.uniform() < 0.5) kept.push_back(x);
        }
        if (kept.empty() || kept.size() == t.size()) continue;
        const auto d = dv_decompose(t, Truncation{kept}, m);
        REQUIRE(std::abs(d.total() - full) <= 1e-12 * full);
    }
}

}  // TEST_SUITE
