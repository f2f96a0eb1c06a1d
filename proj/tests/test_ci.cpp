#include <doctest.h>

#include <cmath>
#include <vector>

#include "overlapkit/ci.hpp"
#include "overlapkit/inference.hpp"
#include "overlapkit/rng.hpp"

using namespace overlapkit;

namespace {

OverlapMatrix make_est(std::size_t k, std::size_t d, const std::vector<double>& entries) {
    OverlapMatrix est;
    est.k = k;
    est.d = d;
    est.entries = entries;
    return est;
}

CovarianceEstimate make_cov(Matrix sigma_star, std::size_t total_n) {
    CovarianceEstimate cov;
    const std::size_t p = sigma_star.rows;
    cov.sigma_star = sigma_star;
    cov.correlation = Matrix::identity(p);
    cov.component_sd.resize(p);
    cov.degenerate.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        cov.component_sd[i] = std::sqrt(sigma_star(i, i) / total_n);
        cov.degenerate[i] = sigma_star(i, i) <= 0;
        for (std::size_t j = 0; j < p; ++j)
            if (i != j && sigma_star(i, i) > 0 && sigma_star(j, j) > 0)
                cov.correlation(i, j) = sigma_star(i, j) /
                                        std::sqrt(sigma_star(i, i) * sigma_star(j, j));
    }
    return cov;
}

ReplicateMatrix gaussian_replicates(std::size_t b, const std::vector<double>& center,
                                    double sd, std::uint64_t seed) {
    ReplicateMatrix rep;
    rep.b = b;
    rep.kd = center.size();
    RngStream rng(seed);
    for (std::size_t i = 0; i < b; ++i)
        for (double c : center) rep.rows.push_back(c + sd * rng.next_normal());
    return rep;
}

}  // namespace

TEST_CASE("bonferroni sci arithmetic") {
    // all replicates equal to the estimate: zero width at the estimate
    ReplicateMatrix flat;
    flat.b = 50;
    flat.kd = 2;
    for (std::size_t i = 0; i < flat.b; ++i) {
        flat.rows.push_back(0.4);
        flat.rows.push_back(0.7);
    }
    auto est = make_est(1, 2, {0.4, 0.7});
    auto set = bonferroni_sci(est, flat, 100, 0.05);
    CHECK(set.lower[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(set.upper[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(set.lower[1] == doctest::Approx(0.7).epsilon(1e-12));

    // hand-built kd=1 case: quantiles of sqrt(N)(I* - I) are +-1 at N=100
    // (replicates at 0.4 and 0.6 around 0.5, extreme Bonferroni levels)
    ReplicateMatrix two;
    two.b = 2;
    two.kd = 1;
    two.rows = {0.4, 0.6};
    auto single = bonferroni_sci(make_est(1, 1, {0.5}), two, 100, 0.05);
    CHECK(single.lower[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(single.upper[0] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("mvt sci") {
    McParams mc{100000, 23, 5e-4};
    // kd=1: plain z interval
    auto cov1 = make_cov(Matrix::identity(1), 100);
    auto est1 = make_est(1, 1, {0.5});
    auto s1 = mvt_sci(est1, cov1, 100, 0.05, mc);
    CHECK(std::abs((s1.upper[0] - 0.5) - 1.959964 * 0.1) <= 0.002);

    // identity correlation kd=2: I_s +- 2.2365 * sd_s
    auto cov2 = make_cov(Matrix::identity(2), 100);
    auto s2 = mvt_sci(make_est(1, 2, {0.5, 0.6}), cov2, 100, 0.05, mc);
    CHECK(std::abs((s2.upper[0] - 0.5) - 2.2365 * 0.1) <= 0.002);
    CHECK(std::abs((s2.upper[1] - 0.6) - 2.2365 * 0.1) <= 0.002);

    // zero-sd component: zero width, flagged in notes
    Matrix part(2, 2);
    part(0, 0) = 1.0;
    auto s3 = mvt_sci(make_est(1, 2, {0.5, 0.6}), make_cov(part, 100), 100, 0.05, mc);
    CHECK(s3.lower[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(s3.upper[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK_FALSE(s3.notes.empty());
    CHECK(s3.upper[0] > s3.lower[0]);
}

TEST_CASE("ellipse projection sci") {
    // kd=1, sigma_star=1, N=100: half-width sqrt(3.841459/100)
    auto cov1 = make_cov(Matrix::identity(1), 100);
    auto s1 = ellipse_projection_sci(make_est(1, 1, {0.5}), cov1, 100, 0.05);
    CHECK(s1.upper[0] - 0.5 == doctest::Approx(0.19600).epsilon(1e-4));

    // zero sigma_star: zero width
    Matrix zero(2, 2);
    auto s0 = ellipse_projection_sci(make_est(1, 2, {0.3, 0.7}), make_cov(zero, 100), 100,
                                     0.05);
    CHECK(s0.lower[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s0.upper[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("nesting: ellipse >= mvt widths on random nondegenerate covariances") {
    McParams mc{60000, 31, 1e-3};
    RngStream rng(3131);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t p = 2 + rng.next_below(3);
        // random PSD: A A^T + small ridge
        Matrix a(p, p);
        for (auto& v : a.a) v = 2 * rng.next_uniform() - 1;
        Matrix sig(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                for (std::size_t t = 0; t < p; ++t) sig(i, j) += a(i, t) * a(j, t);
                if (i == j) sig(i, j) += 0.05;
            }
        std::vector<double> e(p, 0.5);
        auto est = make_est(1, p, e);
        auto cov = make_cov(sig, 200);
        auto mvt = mvt_sci(est, cov, 200, 0.05, mc);
        auto ell = ellipse_projection_sci(est, cov, 200, 0.05);
        for (std::size_t c = 0; c < p; ++c) {
            const double wm = mvt.raw_upper[c] - mvt.raw_lower[c];
            const double we = ell.raw_upper[c] - ell.raw_lower[c];
            const double wz =
                2 * 1.959964 * cov.component_sd[c];  // unadjusted z interval
            CHECK(we >= wm - 1e-3);
            CHECK(wm >= wz - 1e-2);
        }
    }
}

TEST_CASE("interval sets contain the estimate, ordered, clipped") {
    RngStream rng(17);
    auto rep = gaussian_replicates(400, {0.05, 0.95, 0.5}, 0.04, 77);
    auto est = make_est(3, 1, {0.05, 0.95, 0.5});
    auto cov = bootstrap_covariance(rep, 60);
    McParams mc{50000, 7, 1e-3};
    IntervalSet sets[3] = {bonferroni_sci(est, rep, 60, 0.05),
                           mvt_sci(est, cov, 60, 0.05, mc),
                           ellipse_projection_sci(est, cov, 60, 0.05)};
    for (const auto& s : sets) {
        CHECK(s.covers(est.entries));
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(s.lower[c] <= s.upper[c]);
            CHECK(s.lower[c] >= 0.0);
            CHECK(s.upper[c] <= 1.0);
            CHECK(s.raw_lower[c] <= s.raw_upper[c]);
        }
        // boundary components must have been clipped here
        CHECK(s.mean_length() >= 0.0);
    }
    // the extreme components generate raw bounds outside [0,1]
    CHECK(sets[2].raw_lower[0] < 0.0);
    CHECK(sets[2].raw_upper[1] > 1.0);
}

TEST_CASE("ellipse region membership and duality with the wald test") {
    RngStream rng(616);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t p = 2 + rng.next_below(3);
        Matrix a(p, p);
        for (auto& v : a.a) v = 2 * rng.next_uniform() - 1;
        Matrix sig(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t t = 0; t < p; ++t) sig(i, j) += a(i, t) * a(j, t);
        std::vector<double> e;
        for (std::size_t i = 0; i < p; ++i) e.push_back(0.35 + 0.3 * rng.next_uniform());
        auto est = make_est(1, p, e);
        auto cov = make_cov(sig, 120);
        auto region = ellipse_region(est, cov, 120, 0.05);
        CHECK(ellipse_contains(region, e));  // center

        const auto wald = wald_test(est, cov, 120, 0.05);
        const std::vector<double> half(p, 0.5);
        CHECK(ellipse_contains(region, half) == (wald.p_value >= 0.05));

        // projection intervals contain every coordinate of contained points
        auto proj = ellipse_projection_sci(est, cov, 120, 0.05);
        std::vector<double> probe = e;
        probe[0] += 0.9 * (proj.raw_upper[0] - e[0]);
        if (ellipse_contains(region, probe))
            for (std::size_t c = 0; c < p; ++c) {
                CHECK(probe[c] >= proj.raw_lower[c] - 1e-12);
                CHECK(probe[c] <= proj.raw_upper[c] + 1e-12);
            }

        CHECK_THROWS_AS(ellipse_contains(region, std::vector<double>(p + 1, 0.5)),
                        std::invalid_argument);
    }
}

TEST_CASE("boundary membership is closed along an eigenvector") {
    auto est = make_est(1, 2, {0.5, 0.5});
    Matrix sig = Matrix::identity(2);
    sig(0, 0) = 4.0;
    auto region = ellipse_region(est, make_cov(sig, 100), 100, 0.05);
    // along e1: N v^2 / 4 = threshold at the boundary
    const double r = std::sqrt(region.threshold * 4.0 / 100.0);
    std::vector<double> boundary{0.5 + r, 0.5};
    std::vector<double> outside{0.5 + 1.0001 * r, 0.5};
    CHECK(ellipse_contains(region, boundary));
    CHECK_FALSE(ellipse_contains(region, outside));
}
