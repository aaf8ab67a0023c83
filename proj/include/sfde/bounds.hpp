#pragma once

#include <optional>

namespace sfde::bounds {

// Closed-form a-priori bounds, all evaluated and returned as natural
// logarithms: the exponential factors (e.g. exp(230*T*p*c)) overflow double
// for moderate parameters, so nothing here ever forms the plain value.
// Internal accumulation uses long double so that differences of evaluations
// sharing all but one input cancel cleanly.

// E[sup X^p] bound for processes with running-supremum affine growth,
// exponent p in (0,1):
//   log E[sup H^p] - log(1-p) - (1+p) log p + alpha_integral / ((1-p)^{1/p} p).
double ms_gronwall_log_bound(double p, double alpha_integral, double log_sup_h_p);

// Inputs of the p >= 1 path-dependent Gronwall bound. alpha_integral and
// lambda_integral are time integrals over [0, horizon]; the horizon also
// enters through the integral of (p-1)*(lambda+1).
struct GronwallInputs {
    double p = 2.0;
    double q = 1.0;  // 0 < q < p
    double horizon = 0.0;
    double alpha_integral = 0.0;
    double lambda_integral = 0.0;
    double log_rhs_expectation = 0.0;  // log E[(V(0,X_0)^p + int beta^p lambda + gamma^p)^{q/p}]

    static GronwallInputs constant_rates(double p, double q, double horizon, double alpha_rate,
                                         double lambda_rate, double log_rhs_expectation);
};

double gronwall_log_bound(const GronwallInputs& in);

// Shared parameter set of the explicit SFDE bounds. `log_a_plus_sup_xi_sq`
// is log(a + sup_{[-tau,0]} ||xi||^2) for the deterministic initial segment.
struct TheoremThreeParams {
    double q = 2.0;
    double p = 4.0;
    double horizon = 1.0;
    double c = 1.0;
    double a = 1.0;
    double epsilon = 0.5;
    double beta = 0.0;
    double mesh = 0.0;  // |delta_1|, in (0, horizon]
    double log_a_plus_sup_xi_sq = 0.0;
};

// (i)  log 7 + 38 T q^2 c + (q/2) log(a + sup||xi||^2),  q >= 2.
double moment_log_bound(const TheoremThreeParams& params);

// (ii) log(7cq) + 39 T q c + (1/2) log(a + sup||xi||^2) + (1/2) log(gap),
//      q >= 2, 0 <= gap <= T. gap = 0 gives -inf.
double increment_log_bound(const TheoremThreeParams& params, double gap);

// Chained whole-horizon modulus bound:
// log(84cq) + 39Tqc + (1/2)log(a+sup||xi||^2) + (1/2)log(gap) + (1/q)log ceil(T/gap).
double chained_modulus_log_bound(const TheoremThreeParams& params, double gap);

// (iii) full strong-error bound, 1 <= q < p; scales with the mesh as
// mesh^{q/2} * ceil(T/mesh)^{q/(2p)}, i.e. the q-norm decays like
// n^{1/(2p) - 1/2} on uniform grids.
double strong_error_log_bound(const TheoremThreeParams& params);

// ceil(T/mesh) with an exactness guard: ratios within 1e-9 of an integer are
// snapped to it first, so uniform-grid float division cannot produce an
// off-by-one ceiling.
double ceil_with_guard(double ratio);

// exp(log_value) when it fits a double, otherwise empty.
std::optional<double> exp_if_representable(double log_value);

}  // namespace sfde::bounds
