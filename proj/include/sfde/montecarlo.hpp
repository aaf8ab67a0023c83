#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sfde/bounds.hpp"
#include "sfde/problem.hpp"
#include "sfde/stats.hpp"

namespace sfde {

// Ensemble estimators. Execution contract: trajectory i always uses RNG
// stream i and lands in slot i; reductions run serially in index order
// afterwards, so results are byte-identical for any thread count.
// threads == 1 selects the plain serial loop (the reference
// implementation), threads == 0 uses the OpenMP default team.

enum class ErrorReference {
    FineProxy,  // error measured against the n_fine run on the same Brownian path
    Oracle,     // error measured against the problem's exact-solution map
};

struct ErrorStudyConfig {
    std::vector<int> coarse_ns;
    int n_fine = 0;
    int num_paths = 0;  // M
    double q = 2.0;
    std::uint64_t seed = 0;
    int bootstrap_resamples = 1000;
    ErrorReference reference = ErrorReference::FineProxy;
    int threads = 0;

    void validate(const ProblemSpec& problem) const;
};

struct StudyPerN {
    int n = 0;
    double q_norm = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int aborted = 0;
    double log_bound = 0.0;        // strong_error_log_bound at mesh T/n (NaN if q >= p)
    double proxy_q_norm = 0.0;     // secondary proxy error (NaN unless reference == Oracle)
};

struct StudyResult {
    std::vector<StudyPerN> per_n;
    std::optional<RateFit> fit;     // empty when degenerate
    bool degenerate_errors = false; // some resolution had q-norm 0 (exact scheme)
};

// Strong error in L^q against the configured reference: per trajectory the
// sup over coarse knots k = 1..n of ||Y^n_k - ref(t_k)||, then the q-norm
// across the ensemble, a seeded bootstrap CI, and the log-log rate fit.
// Throws TooManyAbortsError when > 1% of trajectories go non-finite.
StudyResult strong_error_study(const ProblemSpec& problem, const ErrorStudyConfig& config);

struct MomentEstimate {
    double estimate = 0.0;  // mean of (sup of a + ||X||^2 over [-tau,T])^{q/2}
    double stderr_ = 0.0;
    double log_bound = 0.0;
    double log_margin = 0.0;  // log_bound - log(estimate)
    int aborted = 0;
};

MomentEstimate sup_moment_estimate(const ProblemSpec& problem, int n, int num_paths, double q,
                                   std::uint64_t seed, int threads = 0);

struct ModulusEstimate {
    double q_norm = 0.0;  // q-norm over the ensemble of modulus(h) on [0,T]
    double stderr_ = 0.0; // delta-method stderr of the q-norm
    // Single-window bound at gap h; indicative only, the empirical modulus
    // sups over all window positions.
    double log_increment_bound = 0.0;
    double margin_increment = 0.0;
    // Window-chained whole-horizon bound at gap h; the comparable one.
    double log_chained_bound = 0.0;
    double margin_chained = 0.0;
    int aborted = 0;
};

ModulusEstimate modulus_estimate(const ProblemSpec& problem, int n, int num_paths, double h,
                                 double q, std::uint64_t seed, int threads = 0);

struct GronwallCheckReport {
    std::string scenario;
    double lhs_log = 0.0;
    double rhs_log = 0.0;
    double margin = 0.0;  // rhs_log - lhs_log
    bool holds = false;
};

// G1: deterministic X_t = int_0^t alpha * sup_{r<=s} X_r ds + H with constant
// alpha, H > 0; LHS integrated by forward Euler with a running supremum.
struct GronwallG1Scenario {
    double alpha = 1.0;
    double h_const = 1.0;
    double p = 0.5;  // in (0,1)
    double horizon = 1.0;
    int integration_steps = 1 << 20;
};

GronwallCheckReport gronwall_check_g1(const GronwallG1Scenario& scenario);

// G2: an SFDE with V(t,x) = a + ||x||^2; the growth assumption yields the
// supremum-affine condition with rates alpha = lambda = 3qc, beta = sup xi^2,
// gamma = 0, so the p >= 1 bound applies with (p, q) <- (q, q/2).
struct GronwallG2Scenario {
    double q = 2.0;  // >= 1
    int n = 512;
    int num_paths = 1000;
    std::uint64_t seed = 0;
    int threads = 0;
};

GronwallCheckReport gronwall_check_g2(const ProblemSpec& problem,
                                      const GronwallG2Scenario& scenario);

}  // namespace sfde
