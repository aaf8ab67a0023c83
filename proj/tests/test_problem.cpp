#include <doctest.h>

#include <cmath>

#include "sfde/errors.hpp"
#include "sfde/problem.hpp"

using namespace sfde;

namespace {

ProblemSpec cubic_drift_problem(double sign) {
    ProblemSpec p;
    p.dim_state = 1;
    p.dim_noise = 1;
    p.horizon = 1.0;
    p.delay = 0.0;
    p.coefficients.drift = [sign](double, const PathView& x, std::span<double> out) {
        const double v = x.back_values()[0];
        out[0] = sign * v * v * v;
    };
    p.coefficients.diffusion = [](double, const PathView&, std::span<double> out) {
        out[0] = 0.0;
    };
    const double v0[1] = {0.0};
    p.initial_segment = PiecewiseLinearPath::single_point(0.0, v0);
    p.constants = {1.0, 1.0, 2.0, 0.0, 0.5};
    return p;
}

}  // namespace

TEST_CASE("eval_drift examples") {
    SUBCASE("zero functional") {
        auto p = cubic_drift_problem(0.0);
        const auto path = PiecewiseLinearPath::constant(0.0, 1.0, std::vector<double>{3.0});
        CHECK(eval_drift(p, 0.5, path.view())[0] == 0.0);
        CHECK(eval_diffusion(p, 0.5, path.view())[0] == 0.0);
    }
    SUBCASE("point delay drift on a constant path") {
        const auto p = builtin_problem("point_delay_linear", {{"delay", 0.5}});
        const auto path =
            PiecewiseLinearPath::constant(-0.5, 1.0, std::vector<double>{1.0});
        CHECK(eval_drift(p, 0.7, path.view())[0] == doctest::Approx(-0.5).epsilon(1e-15));
    }
    SUBCASE("running max drift reads the path supremum") {
        const auto p = builtin_problem("running_max_drift", {{"delay", 0.5}});
        const PiecewiseLinearPath path({-0.5, 0.0, 1.0}, {0.0, 2.0, 0.0}, 1);
        // at t = 1: -x(1) + 0.25 * sup = 0 + 0.25 * 2
        CHECK(eval_drift(p, 1.0, path.view())[0] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("path must cover [-tau, t]") {
        const auto p = builtin_problem("point_delay_linear", {{"delay", 0.5}});
        const auto path = PiecewiseLinearPath::constant(0.0, 1.0, std::vector<double>{1.0});
        CHECK_THROWS_AS(eval_drift(p, 0.5, path.view()), OutOfDomainError);
    }
}

TEST_CASE("non-anticipation is structural: future changes are invisible") {
    const auto p = builtin_problem("running_max_drift", {});
    // both paths share knots up to t = 0.5 and diverge strictly after
    const PiecewiseLinearPath a({-0.5, 0.0, 0.5, 0.75, 1.0}, {1, 1, 2, 3, 4}, 1);
    const PiecewiseLinearPath b({-0.5, 0.0, 0.5, 0.75, 1.0}, {1, 1, 2, 100, -50}, 1);
    const auto da = eval_drift(p, 0.5, a.view());
    const auto db = eval_drift(p, 0.5, b.view());
    CHECK(da[0] == db[0]);  // bit identical
    const auto sa = eval_diffusion(p, 0.5, a.view());
    const auto sb = eval_diffusion(p, 0.5, b.view());
    CHECK(sa[0] == sb[0]);
}

TEST_CASE("validate_growth flags superlinear drift") {
    ProblemSpec p = cubic_drift_problem(1.0);
    p.coefficients.drift = [](double, const PathView& x, std::span<double> out) {
        const double v = x.back_values()[0];
        out[0] = v * v;
    };
    const PiecewiseLinearPath path({0.0, 1.0}, {10.0, 10.0}, 1);
    const std::vector<PiecewiseLinearPath> paths{path};
    const std::vector<double> times{0.5};
    const auto report = validate_growth(p, paths, times);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].condition == "drift_growth");
    CHECK(report.violations[0].lhs == doctest::Approx(100.0));
    CHECK(report.violations[0].rhs == doctest::Approx(std::sqrt(101.0)));
}

TEST_CASE("validate_monotonicity sign cases") {
    const std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
    SUBCASE("-x^3 is one-sided monotone for any c") {
        const auto p = cubic_drift_problem(-1.0);
        const auto rnd = sample_random_paths(1, 0.0, 1.0, 8, 5, 6);
        std::vector<std::pair<PiecewiseLinearPath, PiecewiseLinearPath>> pairs;
        for (std::size_t i = 0; i + 1 < rnd.size(); i += 2) pairs.emplace_back(rnd[i], rnd[i + 1]);
        CHECK(validate_monotonicity(p, pairs, times).clean());
    }
    SUBCASE("identical paths always pass") {
        const auto p = cubic_drift_problem(1.0);
        const auto rnd = sample_random_paths(1, 0.0, 1.0, 2, 6, 6);
        std::vector<std::pair<PiecewiseLinearPath, PiecewiseLinearPath>> pairs{{rnd[0], rnd[0]}};
        CHECK(validate_monotonicity(p, pairs, times).clean());
    }
    SUBCASE("+x^3 with separated constant paths violates c = 1") {
        const auto p = cubic_drift_problem(1.0);
        std::vector<std::pair<PiecewiseLinearPath, PiecewiseLinearPath>> pairs{
            {PiecewiseLinearPath::constant(0.0, 1.0, std::vector<double>{2.0}),
             PiecewiseLinearPath::constant(0.0, 1.0, std::vector<double>{0.0})}};
        const auto report = validate_monotonicity(p, pairs, times);
        REQUIRE(!report.clean());
        CHECK(report.violations[0].lhs == doctest::Approx(32.0));
        CHECK(report.violations[0].rhs == doctest::Approx(4.0));
    }
}

TEST_CASE("every builtin passes its declared assumptions on 100 random pairs") {
    const std::vector<double> times{0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
    for (const std::string& name : builtin_names()) {
        CAPTURE(name);
        const auto p = builtin_problem(name, {});
        const auto rnd = sample_random_paths(p.dim_state, p.delay, p.horizon, 200, 2025, 9);
        std::vector<PiecewiseLinearPath> singles(rnd.begin(), rnd.begin() + 100);
        std::vector<std::pair<PiecewiseLinearPath, PiecewiseLinearPath>> pairs;
        for (int i = 0; i < 100; ++i) pairs.emplace_back(rnd[i], rnd[100 + i]);
        CHECK(validate_growth(p, singles, times).clean());
        CHECK(validate_monotonicity(p, pairs, times).clean());
    }
}

TEST_CASE("distributed delay: constant path integrates the kernel exactly") {
    const auto p = builtin_problem("distributed_delay",
                                   {{"decay", 0.0}, {"kernel_gain", 1.0}, {"initial_value", 0.0}});
    const double value = 2.5;
    const double t = 0.8;
    const double tau = p.delay;
    const auto path = PiecewiseLinearPath::constant(-tau, p.horizon, std::vector<double>{value});
    const double drift = eval_drift(p, t, path.view())[0];
    // same trapezoid rule applied to the kernel alone; truncation inserts a
    // knot at t, so integrate over {-tau, 0(initial seg end), t}
    const auto kernel_path = truncate_path(path.view(), -tau, t);
    double kernel_integral = 0.0;
    for (std::size_t i = 1; i < kernel_path.knot_count(); ++i) {
        const double t0 = kernel_path.knots()[i - 1];
        const double t1 = kernel_path.knots()[i];
        kernel_integral += 0.5 * (t1 - t0) * (std::exp(-(t - t0)) + std::exp(-(t - t1)));
    }
    CHECK(drift == doctest::Approx(value * kernel_integral).epsilon(1e-14));
}

TEST_CASE("gbm oracle closed form") {
    const auto p = builtin_problem("gbm_oracle", {{"mu", 0.05}, {"sigma", 0.2}, {"x0", 1.0}});
    REQUIRE(p.oracle);
    const auto w = PiecewiseLinearPath::constant(0.0, 1.0, std::vector<double>{0.0});
    std::vector<double> out(1);
    p.oracle(1.0, w.view(), out);
    CHECK(out[0] == doctest::Approx(1.0304545339535169).epsilon(1e-15));
}

TEST_CASE("builtin error handling") {
    CHECK_THROWS_AS(builtin_problem("no_such_problem", {}), UnknownProblemError);
    CHECK_THROWS_AS(builtin_problem("gbm_oracle", {{"volatility", 0.2}}), InvalidParameterError);
    CHECK_THROWS_AS(builtin_problem("gbm_oracle", {{"delay", 0.5}}), InvalidParameterError);
    CHECK_THROWS_AS(builtin_problem("point_delay_linear", {{"epsilon", 2.0}}),
                    InvalidParameterError);
}

TEST_CASE("problem invariants are validated") {
    ProblemSpec p = cubic_drift_problem(1.0);
    p.delay = 0.5;  // initial segment no longer matches [-delay, 0]
    CHECK_THROWS_AS(p.validate(), InvalidParameterError);
    p = cubic_drift_problem(1.0);
    p.constants.p = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidParameterError);
}
