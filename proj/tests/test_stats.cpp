#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "sfde/errors.hpp"
#include "sfde/rng.hpp"
#include "sfde/stats.hpp"

using namespace sfde;

TEST_CASE("ols recovers exact power laws to machine precision") {
    SUBCASE("synthetic error table") {
        const std::vector<std::array<double, 2>> pts = {
            {std::log2(8.0), std::log2(0.1)},
            {std::log2(32.0), std::log2(0.05)},
            {std::log2(128.0), std::log2(0.025)},
        };
        const auto fit = fit_ols(pts);
        CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(fit.rate() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(fit.slope_stderr == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
    SUBCASE("random exact lines") {
        for (int t = 0; t < 5; ++t) {
            const double slope = -1.0 + 0.3 * t;
            const double intercept = 2.0 - t;
            std::vector<std::array<double, 2>> pts;
            for (int k = 3; k < 10; ++k) {
                pts.push_back({static_cast<double>(k), intercept + slope * k});
            }
            const auto fit = fit_ols(pts);
            CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-13));
            CHECK(fit.intercept == doctest::Approx(intercept).epsilon(1e-12));
            CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(fit_ols(std::vector<std::array<double, 2>>{{1.0, 1.0}}),
                        InvalidParameterError);
        CHECK_THROWS_AS(
            fit_ols(std::vector<std::array<double, 2>>{{1.0, 1.0}, {1.0, 2.0}}),
            InvalidParameterError);
    }
}

TEST_CASE("q_norm is exact on degenerate samples") {
    const std::vector<double> same(17, 0.37);
    CHECK(q_norm(same, 3.0) == 0.37);
    std::vector<double> powers(9, std::pow(0.37, 3.0));
    CHECK(q_norm_from_powers(powers, 3.0) == std::pow(powers[0], 1.0 / 3.0));
    const std::vector<double> mixed = {1.0, 3.0};
    CHECK(q_norm(mixed, 2.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("bootstrap CI brackets the point estimate and is deterministic") {
    std::vector<double> powers;
    for (int i = 0; i < 400; ++i) {
        const double z = rng::standard_normal(77, 0, static_cast<std::uint64_t>(i), 0, 5);
        powers.push_back(std::pow(std::fabs(z) + 0.1, 2.0));
    }
    const double point = q_norm_from_powers(powers, 2.0);
    const auto ci = bootstrap_qnorm_ci(powers, 2.0, 500, 42, 0);
    CHECK(ci.lo <= point);
    CHECK(point <= ci.hi);
    const auto ci2 = bootstrap_qnorm_ci(powers, 2.0, 500, 42, 0);
    CHECK(ci.lo == ci2.lo);
    CHECK(ci.hi == ci2.hi);
    const auto ci3 = bootstrap_qnorm_ci(powers, 2.0, 500, 43, 0);
    CHECK(ci.lo != ci3.lo);
}

TEST_CASE("bootstrap CI width shrinks with the sample size") {
    int shrank = 0;
    for (int seed = 0; seed < 20; ++seed) {
        std::vector<double> small_sample, large_sample;
        for (int i = 0; i < 1600; ++i) {
            const double z = rng::standard_normal(static_cast<std::uint64_t>(seed), 1,
                                                  static_cast<std::uint64_t>(i), 0, 5);
            const double v = std::pow(std::fabs(z) + 0.1, 2.0);
            if (i < 200) small_sample.push_back(v);
            large_sample.push_back(v);
        }
        const auto ci_small = bootstrap_qnorm_ci(small_sample, 2.0, 400,
                                                 static_cast<std::uint64_t>(seed), 1);
        const auto ci_large = bootstrap_qnorm_ci(large_sample, 2.0, 400,
                                                 static_cast<std::uint64_t>(seed), 2);
        if (ci_large.hi - ci_large.lo < ci_small.hi - ci_small.lo) ++shrank;
    }
    CHECK(shrank >= 19);  // 95% level across 20 seeds
}

TEST_CASE("mean and stddev basics") {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    CHECK(sample_mean(v) == doctest::Approx(2.5));
    CHECK(sample_stddev(v) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
    CHECK(sample_stddev(std::vector<double>{7.0}) == 0.0);
}
