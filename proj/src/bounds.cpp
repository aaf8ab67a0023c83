#include "sfde/bounds.hpp"

#include <cmath>
#include <limits>

#include "sfde/errors.hpp"

namespace sfde::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// -[(q/p + 1) log(q/p) + log(1 - q/p)]  and  1/[(q/p)(1 - q/p)^{p/q}],
// the two places the ratio q/p enters every p > q bound.
long double log_prefactor(long double q_over_p) {
    return -((q_over_p + 1.0L) * std::log(q_over_p) + std::log(1.0L - q_over_p));
}

long double exp_denominator(long double q_over_p) {
    return q_over_p * std::pow(1.0L - q_over_p, 1.0L / q_over_p);
}

void require(bool ok, const char* msg) {
    if (!ok) throw InvalidParameterError(msg);
}

}  // namespace

double ms_gronwall_log_bound(double p, double alpha_integral, double log_sup_h_p) {
    require(p > 0.0 && p < 1.0, "ms_gronwall_log_bound: p must lie in (0,1)");
    require(alpha_integral >= 0.0, "ms_gronwall_log_bound: alpha integral must be >= 0");
    const long double lp = p;
    const long double bound = static_cast<long double>(log_sup_h_p) - std::log(1.0L - lp) -
                              (1.0L + lp) * std::log(lp) +
                              static_cast<long double>(alpha_integral) /
                                  (std::pow(1.0L - lp, 1.0L / lp) * lp);
    return static_cast<double>(bound);
}

GronwallInputs GronwallInputs::constant_rates(double p, double q, double horizon,
                                              double alpha_rate, double lambda_rate,
                                              double log_rhs_expectation) {
    GronwallInputs in;
    in.p = p;
    in.q = q;
    in.horizon = horizon;
    in.alpha_integral = alpha_rate * horizon;
    in.lambda_integral = lambda_rate * horizon;
    in.log_rhs_expectation = log_rhs_expectation;
    return in;
}

double gronwall_log_bound(const GronwallInputs& in) {
    require(in.q > 0.0 && in.q < in.p, "gronwall_log_bound: need 0 < q < p");
    require(in.alpha_integral >= 0.0 && in.lambda_integral >= 0.0 && in.horizon >= 0.0,
            "gronwall_log_bound: integrals and horizon must be >= 0");
    const long double p = in.p;
    const long double qp = static_cast<long double>(in.q) / p;
    // int_0^T (p*alpha + (p-1)*(lambda+1)) ds
    const long double growth_integral =
        p * static_cast<long double>(in.alpha_integral) +
        (p - 1.0L) * (static_cast<long double>(in.lambda_integral) +
                      static_cast<long double>(in.horizon));
    const long double bound = static_cast<long double>(in.log_rhs_expectation) +
                              growth_integral / exp_denominator(qp) + log_prefactor(qp);
    return static_cast<double>(bound);
}

double moment_log_bound(const TheoremThreeParams& params) {
    require(params.q >= 2.0, "moment_log_bound: q must be >= 2");
    require(params.horizon >= 0.0 && params.c >= 1.0, "moment_log_bound: need T >= 0, c >= 1");
    const long double bound =
        std::log(7.0L) +
        38.0L * params.horizon * static_cast<long double>(params.q) * params.q * params.c +
        0.5L * params.q * static_cast<long double>(params.log_a_plus_sup_xi_sq);
    return static_cast<double>(bound);
}

double increment_log_bound(const TheoremThreeParams& params, double gap) {
    require(params.q >= 2.0, "increment_log_bound: q must be >= 2");
    require(params.c >= 1.0 && params.horizon >= 0.0, "increment_log_bound: need c >= 1, T >= 0");
    require(gap >= 0.0 && gap <= params.horizon, "increment_log_bound: gap must lie in [0, T]");
    if (gap == 0.0) return -kInf;
    const long double bound =
        std::log(7.0L * params.c * params.q) +
        39.0L * params.horizon * static_cast<long double>(params.q) * params.c +
        0.5L * static_cast<long double>(params.log_a_plus_sup_xi_sq) +
        0.5L * std::log(static_cast<long double>(gap));
    return static_cast<double>(bound);
}

double chained_modulus_log_bound(const TheoremThreeParams& params, double gap) {
    require(params.q >= 2.0, "chained_modulus_log_bound: q must be >= 2");
    require(params.c >= 1.0 && params.horizon > 0.0,
            "chained_modulus_log_bound: need c >= 1, T > 0");
    require(gap > 0.0 && gap <= params.horizon,
            "chained_modulus_log_bound: gap must lie in (0, T]");
    const long double windows = ceil_with_guard(params.horizon / gap);
    const long double bound =
        std::log(84.0L * params.c * params.q) +
        39.0L * params.horizon * static_cast<long double>(params.q) * params.c +
        0.5L * static_cast<long double>(params.log_a_plus_sup_xi_sq) +
        0.5L * std::log(static_cast<long double>(gap)) +
        std::log(windows) / static_cast<long double>(params.q);
    return static_cast<double>(bound);
}

double strong_error_log_bound(const TheoremThreeParams& params) {
    require(params.q >= 1.0 && params.q < params.p, "strong_error_log_bound: need 1 <= q < p");
    require(params.p >= 2.0, "strong_error_log_bound: p must be >= 2");
    require(params.c >= 1.0 && params.a >= 1.0, "strong_error_log_bound: need c, a >= 1");
    require(params.epsilon > 0.0 && params.epsilon <= 1.0,
            "strong_error_log_bound: epsilon must lie in (0,1]");
    require(params.beta >= 0.0, "strong_error_log_bound: beta must be >= 0");
    require(params.horizon > 0.0, "strong_error_log_bound: horizon must be > 0");
    require(params.mesh > 0.0 && params.mesh <= params.horizon,
            "strong_error_log_bound: mesh must lie in (0, T]");

    const long double q = params.q;
    const long double p = params.p;
    const long double T = params.horizon;
    const long double c = params.c;
    const long double eps = params.epsilon;
    const long double beta_max = std::max<long double>(params.beta, 1.0L);
    const long double beta_sq_max =
        std::max<long double>(static_cast<long double>(params.beta) * params.beta, 1.0L);
    const long double qp = q / p;

    const long double brace_log =
        std::log(c + eps + (eps * p - eps + p) / eps * c) + std::log(202300.0L) +
        2.0L * std::log(c) + 2.0L * std::log(p) + 230.0L * T * p * c * beta_sq_max +
        std::log(static_cast<long double>(params.mesh)) +
        std::log(ceil_with_guard(params.horizon / params.mesh)) / p;

    const long double bound = T * p * (c + eps) / exp_denominator(qp) + log_prefactor(qp) +
                              qp * std::log(T) +
                              q * beta_max *
                                  static_cast<long double>(params.log_a_plus_sup_xi_sq) +
                              0.5L * q * brace_log;
    return static_cast<double>(bound);
}

double ceil_with_guard(double ratio) {
    require(ratio > 0.0, "ceil_with_guard: ratio must be > 0");
    const double nearest = std::round(ratio);
    if (nearest >= 1.0 && std::fabs(ratio - nearest) <= 1e-9 * std::max(1.0, std::fabs(ratio))) {
        return nearest;
    }
    return std::ceil(ratio);
}

std::optional<double> exp_if_representable(double log_value) {
    if (log_value == -kInf) return 0.0;
    // log(DBL_MAX) ~ 709.78; stay a hair under to avoid the overflow edge.
    if (log_value < 709.0) return std::exp(log_value);
    return std::nullopt;
}

}  // namespace sfde::bounds
