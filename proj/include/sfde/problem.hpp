#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfde/path.hpp"

namespace sfde {

// Coefficient functionals of a path-dependent SDE. Both receive the solution
// path restricted to [-tau, t]; the evaluation API truncates before the
// functional ever sees the path, so two paths agreeing up to t produce
// bit-identical output. Functionals must be pure: no hidden state, same
// input -> same output.
using DriftFn = std::function<void(double t, const PathView& x, std::span<double> out)>;
// Row-major d x m matrix output, Frobenius norm convention.
using DiffusionFn = std::function<void(double t, const PathView& x, std::span<double> out)>;
// Exact solution, when one exists: (t, Brownian path on the fine grid) -> state.
using ExactSolutionFn =
    std::function<void(double t, const PathView& brownian, std::span<double> out)>;

struct CoefficientFunctional {
    DriftFn drift;
    DiffusionFn diffusion;
};

// Constants of the growth / monotonicity / temporal-regularity assumptions:
// c, a in [1,inf), p in [2,inf), beta in [0,inf), epsilon in (0,1].
struct AssumptionConstants {
    double c = 1.0;
    double a = 1.0;
    double p = 2.0;
    double beta = 0.0;
    double epsilon = 0.5;
};

struct ProblemSpec {
    int dim_state = 1;
    int dim_noise = 1;
    double horizon = 1.0;
    double delay = 0.0;
    CoefficientFunctional coefficients;
    PiecewiseLinearPath initial_segment;  // deterministic xi on exactly [-delay, 0]
    AssumptionConstants constants;
    ExactSolutionFn oracle;  // may be empty
    std::string name = "custom";
    std::map<std::string, double> params;

    void validate() const;  // throws InvalidParameterError on any broken invariant
};

// Truncate to [-tau, t], then apply the functional. OutOfDomain if the path
// does not cover [-tau, t] or t is outside [0, T].
void eval_drift_into(const ProblemSpec& p, double t, const PathView& x, std::span<double> out);
void eval_diffusion_into(const ProblemSpec& p, double t, const PathView& x, std::span<double> out);
std::vector<double> eval_drift(const ProblemSpec& p, double t, const PathView& x);
std::vector<double> eval_diffusion(const ProblemSpec& p, double t, const PathView& x);

// Sampled assumption checks. A clean report is evidence, not proof.
struct AssumptionViolation {
    int sample = 0;          // path or pair index
    std::string condition;   // "drift_growth", "diffusion_growth", "monotonicity"
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ValidationReport {
    std::vector<AssumptionViolation> violations;
    long checks = 0;
    bool clean() const { return violations.empty(); }
};

// ||mu(t,x)|| <= c sup_{[-tau,t]}(a+||x||^2)^(1/2) and
// ||sigma(t,x)||_F^2 <= c sup_{[-tau,t]}(a+||x||^2).
ValidationReport validate_growth(const ProblemSpec& p,
                                 std::span<const PiecewiseLinearPath> sample_paths,
                                 std::span<const double> times);

// 2<mu(t,x1)-mu(t,x0), x1(t)-x0(t)> + (p-1)(1+eps)||sigma(t,x1)-sigma(t,x0)||_F^2
//   <= c sup_{[-tau,T]} ||x1-x0||^2.
ValidationReport validate_monotonicity(
    const ProblemSpec& p,
    std::span<const std::pair<PiecewiseLinearPath, PiecewiseLinearPath>> path_pairs,
    std::span<const double> times);

// Built-in problem library. Throws UnknownProblemError for unknown names and
// InvalidParameterError for unknown parameter keys.
ProblemSpec builtin_problem(std::string_view name,
                            const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_names();

// Seeded random piecewise-linear paths covering [-tau, T]; deterministic in
// (seed, index). Used by the sampled validators and tests.
std::vector<PiecewiseLinearPath> sample_random_paths(int dim, double tau, double horizon,
                                                     int count, std::uint64_t seed,
                                                     int interior_knots = 14);

}  // namespace sfde
