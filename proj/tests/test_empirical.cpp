#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "overlapkit/empirical.hpp"
#include "overlapkit/rng.hpp"

using namespace overlapkit;

namespace {
using Rows = std::vector<std::vector<std::vector<double>>>;
inline overlapkit::GroupedDataset make_data(Rows groups) {
    return overlapkit::GroupedDataset(std::move(groups));
}
}  // namespace

TEST_CASE("ecdf basic counts") {
    Sample s({1, 2, 3});
    CHECK(s.ecdf(2) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(s.ecdf(0.5) == 0.0);
    CHECK(s.ecdf(3) == 1.0);
    CHECK(s.ecdf(100) == 1.0);
    Sample t({1, 3});
    CHECK(t.ecdf(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ecdf rejects non-finite t") {
    Sample s({1, 2});
    CHECK_THROWS_AS(s.ecdf(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(s.ecdf(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("sample validates input") {
    CHECK_THROWS_AS(Sample({}), std::invalid_argument);
    CHECK_THROWS_AS(Sample({1.0, std::numeric_limits<double>::quiet_NaN()}),
                    std::invalid_argument);
}

TEST_CASE("quantile inf convention") {
    Sample s3({1, 2, 3});
    CHECK(s3.quantile(0.5) == 2);
    Sample s4({1, 2, 3, 4});
    CHECK(s4.quantile(0.5) == 2);
    Sample s1({5});
    CHECK(s1.quantile(1.0) == 5);
    CHECK_THROWS_AS(s3.quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(s3.quantile(1.0 + 1e-9), std::domain_error);
}

TEST_CASE("ecdf/quantile Galois-style inequalities on random samples") {
    RngStream rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v;
        const std::size_t n = 2 + rng.next_below(9);
        for (std::size_t i = 0; i < n; ++i) v.push_back(rng.next_uniform());
        Sample s(v);
        for (int j = 1; j <= 20; ++j) {
            const double u = j / 20.0;
            CHECK(s.ecdf(s.quantile(u)) >= u - 1e-15);
        }
        for (double x : s.sorted()) CHECK(s.quantile(s.ecdf(x)) <= x);
        // monotone nondecreasing ecdf
        double prev = -1;
        for (double t = -0.1; t <= 1.1; t += 0.05) {
            const double f = s.ecdf(t);
            CHECK(f >= prev);
            prev = f;
        }
    }
}

TEST_CASE("midranks") {
    CHECK(midranks({10, 20, 30}) == std::vector<double>{1, 2, 3});
    CHECK(midranks({10, 10, 30}) == std::vector<double>{1.5, 1.5, 3});
    CHECK(midranks({7, 7, 7}) == std::vector<double>{2, 2, 2});
    // sum of midranks = n(n+1)/2
    RngStream rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> v;
        const std::size_t n = 1 + rng.next_below(12);
        for (std::size_t i = 0; i < n; ++i)
            v.push_back(static_cast<double>(rng.next_below(5)));  // force ties
        const auto r = midranks(v);
        double sum = 0;
        for (double x : r) sum += x;
        CHECK(sum == doctest::Approx(n * (n + 1) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("weight schemes") {
    auto p = WeightScheme::proportional({2, 6});
    CHECK(p.weights[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.weights[1] == doctest::Approx(0.75).epsilon(1e-15));
    auto e = WeightScheme::equal(4);
    for (double w : e.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
    auto c = WeightScheme::custom({0.3, 0.7});
    CHECK(c.mode == WeightScheme::Mode::custom);
    CHECK_THROWS_AS(WeightScheme::custom({0.3, 0.3}), std::invalid_argument);
    CHECK_THROWS_AS(WeightScheme::custom({-0.5, 1.5}), std::invalid_argument);
}

TEST_CASE("grouped dataset invariants") {
    GroupedDataset data = make_data({{{1, 2}, {3, 4}}, {{5, 6}, {7, 8}, {9, 10}}});
    CHECK(data.k() == 2);
    CHECK(data.d() == 2);
    CHECK(data.total_size() == 5);
    CHECK(data.group_size(1) == 3);
    CHECK(data.group_labels()[0] == "group1");
    CHECK(data.component_labels()[1] == "comp2");
    CHECK_FALSE(data.has_ties());
    CHECK(data.component(1, 1).sorted() == std::vector<double>{6, 8, 10});

    // n_i < 2 rejected
    CHECK_THROWS_AS(make_data({{{1, 2}}}), std::invalid_argument);
    // inconsistent row widths rejected
    CHECK_THROWS_AS(make_data({{{1, 2}, {3}}}), std::invalid_argument);
    // non-finite rejected
    CHECK_THROWS_AS(
        make_data({{{1.0}, {std::numeric_limits<double>::infinity()}}}),
        std::invalid_argument);
    // empty rejected
    CHECK_THROWS_AS(make_data({}), std::invalid_argument);

    GroupedDataset tied = make_data({{{1.0}, {1.0}}});
    CHECK(tied.has_ties());
}
