#include "sfde/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "sfde/errors.hpp"
#include "sfde/solver.hpp"

namespace sfde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Map over trajectory indices. threads == 1 runs the plain serial loop (the
// reference implementation); otherwise OpenMP with per-index output slots,
// so scheduling cannot affect results. Exceptions are captured and rethrown
// after the region.
template <typename Body>
void for_each_index(int count, int threads, Body&& body) {
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::mutex error_mutex;
    std::string first_error;
    bool failed = false;
    const auto guarded = [&](int i) {
        try {
            body(i);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!failed) {
                failed = true;
                first_error = e.what();
            }
        }
    };
    if (threads > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int i = 0; i < count; ++i) guarded(i);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < count; ++i) guarded(i);
    }
    if (failed) throw Error("ensemble worker failed: " + first_error);
}

double sup_xi_norm_sq(const ProblemSpec& problem) {
    const auto& xi = problem.initial_segment;
    return xi.sup_shifted_norm_sq(0.0, xi.front_time(), xi.back_time());
}

bounds::TheoremThreeParams theorem_params(const ProblemSpec& problem, double q, double mesh) {
    bounds::TheoremThreeParams params;
    params.q = q;
    params.p = problem.constants.p;
    params.horizon = problem.horizon;
    params.c = problem.constants.c;
    params.a = problem.constants.a;
    params.epsilon = problem.constants.epsilon;
    params.beta = problem.constants.beta;
    params.mesh = mesh;
    params.log_a_plus_sup_xi_sq = std::log(problem.constants.a + sup_xi_norm_sq(problem));
    return params;
}

// sup over coarse knots k = 1..n of the distance to the fine skeleton at the
// shared times (fine index k * ratio).
double sup_knot_error_vs_fine(const Trajectory& coarse, const Trajectory& fine, int ratio) {
    const int n = coarse.grid.n_steps();
    const int d = coarse.dim;
    double best = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double* a = coarse.skeleton.data() + static_cast<std::size_t>(k) * d;
        const double* b = fine.skeleton.data() + static_cast<std::size_t>(k) * ratio * d;
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double e = a[j] - b[j];
            s += e * e;
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

double sup_knot_error_vs_oracle(const Trajectory& coarse, const ExactSolutionFn& oracle,
                                const PathView& brownian, std::vector<double>& buf) {
    const int n = coarse.grid.n_steps();
    const int d = coarse.dim;
    buf.resize(static_cast<std::size_t>(d));
    double best = 0.0;
    for (int k = 1; k <= n; ++k) {
        oracle(coarse.grid[static_cast<std::size_t>(k)], brownian, buf);
        const double* a = coarse.skeleton.data() + static_cast<std::size_t>(k) * d;
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double e = a[j] - buf[static_cast<std::size_t>(j)];
            s += e * e;
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

std::vector<double> finite_values(std::span<const double> slots, int* aborted) {
    std::vector<double> kept;
    kept.reserve(slots.size());
    int bad = 0;
    for (double v : slots) {
        if (std::isnan(v)) {
            ++bad;
        } else {
            kept.push_back(v);
        }
    }
    *aborted = bad;
    return kept;
}

void check_abort_fraction(int aborted, int total) {
    if (100L * aborted > total) {
        throw TooManyAbortsError("more than 1% of trajectories aborted (" +
                                 std::to_string(aborted) + " of " + std::to_string(total) + ")");
    }
}

}  // namespace

void ErrorStudyConfig::validate(const ProblemSpec& problem) const {
    problem.validate();
    if (coarse_ns.empty()) throw InvalidParameterError("study: coarse_ns must be non-empty");
    for (std::size_t i = 0; i < coarse_ns.size(); ++i) {
        if (coarse_ns[i] < 1 || n_fine % coarse_ns[i] != 0) {
            throw InvalidParameterError("study: every coarse n must divide n_fine");
        }
        if (i > 0 && coarse_ns[i] <= coarse_ns[i - 1]) {
            throw InvalidParameterError("study: coarse_ns must be strictly increasing");
        }
    }
    if (n_fine < 8 * *std::max_element(coarse_ns.begin(), coarse_ns.end())) {
        throw InvalidParameterError("study: n_fine must be >= 8 * max(coarse_ns)");
    }
    if (num_paths < 2) throw InvalidParameterError("study: num_paths must be >= 2");
    if (!(q >= 1.0)) throw InvalidParameterError("study: q must be >= 1");
    if (bootstrap_resamples < 1) throw InvalidParameterError("study: bootstrap_resamples >= 1");
    if (threads < 0) throw InvalidParameterError("study: threads must be >= 0");
    if (reference == ErrorReference::Oracle && !problem.oracle) {
        throw InvalidParameterError("study: oracle reference requested but problem has none");
    }
}

StudyResult strong_error_study(const ProblemSpec& problem, const ErrorStudyConfig& config) {
    config.validate(problem);
    const int M = config.num_paths;
    const std::size_t R = config.coarse_ns.size();
    const bool oracle_mode = config.reference == ErrorReference::Oracle;

    // slot (r, i): error of resolution r on trajectory i; NaN marks an abort.
    std::vector<double> primary(R * static_cast<std::size_t>(M), kNaN);
    std::vector<double> proxy(oracle_mode ? R * static_cast<std::size_t>(M) : 0, kNaN);

    for_each_index(M, config.threads, [&](int i) {
        CoupledOutcome outcome = simulate_coupled_core(
            problem, config.n_fine, config.coarse_ns, config.seed,
            static_cast<std::uint64_t>(i));
        PiecewiseLinearPath w;
        if (oracle_mode) w = outcome.skeleton.cumulative_path();
        std::vector<double> buf;
        for (std::size_t r = 0; r < R; ++r) {
            if (outcome.coarse_abort_steps[r].has_value()) continue;
            const Trajectory& coarse = outcome.run.coarse[r];
            const int ratio = config.n_fine / config.coarse_ns[r];
            const std::size_t slot = r * static_cast<std::size_t>(M) + static_cast<std::size_t>(i);
            if (oracle_mode) {
                primary[slot] =
                    sup_knot_error_vs_oracle(coarse, problem.oracle, w.view(), buf);
                if (!outcome.fine_abort_step.has_value()) {
                    proxy[slot] = sup_knot_error_vs_fine(coarse, outcome.run.fine, ratio);
                }
            } else if (!outcome.fine_abort_step.has_value()) {
                primary[slot] = sup_knot_error_vs_fine(coarse, outcome.run.fine, ratio);
            }
        }
    });

    StudyResult result;
    result.per_n.resize(R);
    std::vector<std::array<double, 2>> fit_points;
    bool fit_ok = true;
    for (std::size_t r = 0; r < R; ++r) {
        StudyPerN& row = result.per_n[r];
        row.n = config.coarse_ns[r];
        const auto slots = std::span<const double>(primary).subspan(
            r * static_cast<std::size_t>(M), static_cast<std::size_t>(M));
        const std::vector<double> errors = finite_values(slots, &row.aborted);
        check_abort_fraction(row.aborted, M);
        std::vector<double> powers(errors.size());
        for (std::size_t i = 0; i < errors.size(); ++i) powers[i] = std::pow(errors[i], config.q);
        row.q_norm = q_norm_from_powers(powers, config.q);
        const BootstrapCI ci =
            bootstrap_qnorm_ci(powers, config.q, config.bootstrap_resamples, config.seed,
                               static_cast<std::uint64_t>(row.n));
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        try {
            row.log_bound = bounds::strong_error_log_bound(
                theorem_params(problem, config.q, problem.horizon / row.n));
        } catch (const InvalidParameterError&) {
            row.log_bound = kNaN;
        }
        if (oracle_mode) {
            const auto proxy_slots = std::span<const double>(proxy).subspan(
                r * static_cast<std::size_t>(M), static_cast<std::size_t>(M));
            int proxy_aborted = 0;
            const std::vector<double> proxy_errors = finite_values(proxy_slots, &proxy_aborted);
            row.proxy_q_norm = proxy_errors.empty() ? kNaN : q_norm(proxy_errors, config.q);
        } else {
            row.proxy_q_norm = kNaN;
        }
        // q-norms at or below float-association noise carry no rate signal
        if (row.q_norm > 1e-14) {
            fit_points.push_back({std::log2(static_cast<double>(row.n)), std::log2(row.q_norm)});
        } else {
            fit_ok = false;
        }
    }
    if (fit_ok && fit_points.size() >= 2) {
        result.fit = fit_ols(fit_points);
    } else {
        result.degenerate_errors = !fit_ok;
    }
    return result;
}

MomentEstimate sup_moment_estimate(const ProblemSpec& problem, int n, int num_paths, double q,
                                   std::uint64_t seed, int threads) {
    problem.validate();
    if (!(q >= 2.0)) throw InvalidParameterError("sup_moment_estimate: q must be >= 2");
    if (n < 1 || num_paths < 1) {
        throw InvalidParameterError("sup_moment_estimate: n and num_paths must be >= 1");
    }
    std::vector<double> slots(static_cast<std::size_t>(num_paths), kNaN);
    const double a = problem.constants.a;
    for_each_index(num_paths, threads, [&](int i) {
        const BrownianSkeleton skel = BrownianSkeleton::generate(
            problem.dim_noise, n, problem.horizon, seed, static_cast<std::uint64_t>(i));
        const EulerOutcome out = euler_run(problem, skel.grid, skel.increments);
        if (!out.ok()) return;
        const auto& path = out.trajectory.interpolant;
        const double sup = path.sup_shifted_norm_sq(a, path.front_time(), path.back_time());
        slots[static_cast<std::size_t>(i)] = std::pow(sup, 0.5 * q);
    });
    MomentEstimate est;
    const std::vector<double> kept = finite_values(slots, &est.aborted);
    check_abort_fraction(est.aborted, num_paths);
    if (kept.empty()) throw TooManyAbortsError("sup_moment_estimate: all trajectories aborted");
    est.estimate = sample_mean(kept);
    est.stderr_ = sample_stddev(kept) / std::sqrt(static_cast<double>(kept.size()));
    est.log_bound = bounds::moment_log_bound(theorem_params(problem, q, problem.horizon / n));
    est.log_margin = est.log_bound - std::log(est.estimate);
    return est;
}

ModulusEstimate modulus_estimate(const ProblemSpec& problem, int n, int num_paths, double h,
                                 double q, std::uint64_t seed, int threads) {
    problem.validate();
    if (!(q >= 2.0)) throw InvalidParameterError("modulus_estimate: q must be >= 2");
    if (!(h > 0.0 && h <= problem.horizon)) {
        throw InvalidParameterError("modulus_estimate: h must lie in (0, horizon]");
    }
    if (n < 1 || num_paths < 1) {
        throw InvalidParameterError("modulus_estimate: n and num_paths must be >= 1");
    }
    std::vector<double> slots(static_cast<std::size_t>(num_paths), kNaN);
    for_each_index(num_paths, threads, [&](int i) {
        const BrownianSkeleton skel = BrownianSkeleton::generate(
            problem.dim_noise, n, problem.horizon, seed, static_cast<std::uint64_t>(i));
        const EulerOutcome out = euler_run(problem, skel.grid, skel.increments);
        if (!out.ok()) return;
        const auto& path = out.trajectory.interpolant;
        slots[static_cast<std::size_t>(i)] =
            std::pow(path.modulus(h, 0.0, path.back_time()), q);
    });
    ModulusEstimate est;
    const std::vector<double> powers = finite_values(slots, &est.aborted);
    check_abort_fraction(est.aborted, num_paths);
    if (powers.empty()) throw TooManyAbortsError("modulus_estimate: all trajectories aborted");
    est.q_norm = q_norm_from_powers(powers, q);
    const double mean_power = sample_mean(powers);
    const double se_mean = sample_stddev(powers) / std::sqrt(static_cast<double>(powers.size()));
    est.stderr_ = (mean_power > 0.0)
                      ? se_mean * (1.0 / q) * std::pow(mean_power, 1.0 / q - 1.0)
                      : 0.0;
    const auto params = theorem_params(problem, q, problem.horizon / n);
    est.log_increment_bound = bounds::increment_log_bound(params, h);
    est.log_chained_bound = bounds::chained_modulus_log_bound(params, h);
    const double log_qn = std::log(est.q_norm);
    est.margin_increment = est.log_increment_bound - log_qn;
    est.margin_chained = est.log_chained_bound - log_qn;
    return est;
}

GronwallCheckReport gronwall_check_g1(const GronwallG1Scenario& s) {
    if (!(s.p > 0.0 && s.p < 1.0) || !(s.alpha >= 0.0) || !(s.h_const > 0.0) ||
        !(s.horizon >= 0.0) || s.integration_steps < 1) {
        throw InvalidScenarioError("gronwall G1: need p in (0,1), alpha >= 0, H > 0, T >= 0");
    }
    // X' = alpha * running_sup(X), X(0) = H; forward Euler.
    double x = s.h_const;
    double running_sup = x;
    const double dt = s.horizon / s.integration_steps;
    for (int k = 0; k < s.integration_steps; ++k) {
        x += dt * s.alpha * running_sup;
        running_sup = std::max(running_sup, x);
    }
    GronwallCheckReport report;
    report.scenario = "G1";
    report.lhs_log = s.p * std::log(running_sup);
    report.rhs_log = bounds::ms_gronwall_log_bound(s.p, s.alpha * s.horizon,
                                                   s.p * std::log(s.h_const));
    report.margin = report.rhs_log - report.lhs_log;
    report.holds = report.lhs_log <= report.rhs_log;
    return report;
}

GronwallCheckReport gronwall_check_g2(const ProblemSpec& problem,
                                      const GronwallG2Scenario& s) {
    problem.validate();
    if (!(s.q >= 1.0) || s.n < 1 || s.num_paths < 1) {
        throw InvalidScenarioError("gronwall G2: need q >= 1, n >= 1, num_paths >= 1");
    }
    std::vector<double> slots(static_cast<std::size_t>(s.num_paths), kNaN);
    const double a = problem.constants.a;
    for_each_index(s.num_paths, s.threads, [&](int i) {
        const BrownianSkeleton skel = BrownianSkeleton::generate(
            problem.dim_noise, s.n, problem.horizon, s.seed, static_cast<std::uint64_t>(i));
        const EulerOutcome out = euler_run(problem, skel.grid, skel.increments);
        if (!out.ok()) return;
        const auto& path = out.trajectory.interpolant;
        slots[static_cast<std::size_t>(i)] =
            std::pow(path.sup_shifted_norm_sq(a, 0.0, path.back_time()), 0.5 * s.q);
    });
    int aborted = 0;
    const std::vector<double> kept = finite_values(slots, &aborted);
    check_abort_fraction(aborted, s.num_paths);
    if (kept.empty()) throw TooManyAbortsError("gronwall G2: all trajectories aborted");

    const double q = s.q;
    const double c = problem.constants.c;
    const double T = problem.horizon;
    const auto& xi = problem.initial_segment;
    const double xi0_norm_sq = [&] {
        double v = 0.0;
        const auto row = xi.view().back_values();
        for (double x : row) v += x * x;
        return v;
    }();
    const double sup_xi_sq = sup_xi_norm_sq(problem);
    // log E[(V(0,X_0)^q + int beta^q lambda)^{1/2}] for the deterministic xi:
    // logsumexp of q log(a + ||xi_0||^2) and log(3Tqc) + q log(sup||xi||^2).
    const double l1 = q * std::log(a + xi0_norm_sq);
    const double l2 = (sup_xi_sq > 0.0 && T > 0.0)
                          ? std::log(3.0 * T * q * c) + q * std::log(sup_xi_sq)
                          : -std::numeric_limits<double>::infinity();
    const double lmax = std::max(l1, l2);
    const double log_rhs_expectation =
        0.5 * (lmax + std::log(std::exp(l1 - lmax) + std::exp(l2 - lmax)));

    const auto inputs = bounds::GronwallInputs::constant_rates(
        q, 0.5 * q, T, 3.0 * q * c, 3.0 * q * c, log_rhs_expectation);
    GronwallCheckReport report;
    report.scenario = "G2";
    report.lhs_log = std::log(sample_mean(kept));
    report.rhs_log = bounds::gronwall_log_bound(inputs);
    report.margin = report.rhs_log - report.lhs_log;
    report.holds = report.lhs_log <= report.rhs_log;
    return report;
}

}  // namespace sfde
