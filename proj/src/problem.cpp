#include "sfde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "sfde/errors.hpp"
#include "sfde/rng.hpp"

namespace sfde {

namespace {

double vec_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double frobenius_sq(std::span<const double> m) {
    double s = 0.0;
    for (double x : m) s += x * x;
    return s;
}

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_param_keys(const std::map<std::string, double>& params,
                      const std::set<std::string>& allowed) {
    for (const auto& [key, value] : params) {
        (void)value;
        if (!allowed.contains(key)) {
            throw InvalidParameterError("unknown problem parameter: " + key);
        }
    }
}

PiecewiseLinearPath constant_initial_segment(double tau, double value) {
    const double v[1] = {value};
    if (tau == 0.0) return PiecewiseLinearPath::single_point(0.0, v);
    return PiecewiseLinearPath::constant(-tau, 0.0, v);
}

// Drift-only Euler on a uniform grid; reference integrator for the
// zero-noise builtin's oracle.
PiecewiseLinearPath drift_only_euler(const DriftFn& drift, const PiecewiseLinearPath& xi,
                                     double horizon, int n) {
    const TimeGrid grid = TimeGrid::uniform(n, horizon);
    const int d = xi.dim();
    const std::size_t k0 = xi.knot_count();
    std::vector<double> times(xi.knots().begin(), xi.knots().end());
    times.resize(k0 + static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) times[k0 + static_cast<std::size_t>(k) - 1] = grid[k];
    std::vector<double> values(xi.values().begin(), xi.values().end());
    values.resize(times.size() * static_cast<std::size_t>(d));

    PathCache cache;
    cache.reset(d);
    for (std::size_t i = 0; i < k0; ++i) {
        cache.append_row(std::span<const double>(values).subspan(i * d, d));
    }
    std::vector<double> mu(d);
    std::vector<double> y(xi.values().end() - d, xi.values().end());
    for (int k = 0; k < n; ++k) {
        const std::size_t knots = k0 + static_cast<std::size_t>(k);
        const PathView view(std::span<const double>(times).first(knots),
                            std::span<const double>(values).first(knots * d), d, &cache);
        drift(grid[k], view, mu);
        const double dt = grid[k + 1] - grid[k];
        double* row = values.data() + knots * d;
        for (int j = 0; j < d; ++j) {
            y[j] += mu[j] * dt;
            row[j] = y[j];
        }
        cache.append_row(std::span<const double>(row, d));
    }
    return PiecewiseLinearPath(std::move(times), std::move(values), d);
}

const std::set<std::string> kCommonKeys = {"horizon", "delay", "c", "a", "p", "beta", "epsilon"};

std::set<std::string> with_common(std::initializer_list<const char*> extra) {
    std::set<std::string> s = kCommonKeys;
    for (const char* k : extra) s.insert(k);
    return s;
}

void apply_constant_overrides(ProblemSpec& spec, const std::map<std::string, double>& params) {
    spec.constants.c = get_param(params, "c", spec.constants.c);
    spec.constants.a = get_param(params, "a", spec.constants.a);
    spec.constants.p = get_param(params, "p", spec.constants.p);
    spec.constants.beta = get_param(params, "beta", spec.constants.beta);
    spec.constants.epsilon = get_param(params, "epsilon", spec.constants.epsilon);
}

void record_params(ProblemSpec& spec, std::initializer_list<std::pair<const char*, double>> kv) {
    for (const auto& [k, v] : kv) spec.params[k] = v;
}

}  // namespace

void ProblemSpec::validate() const {
    if (dim_state < 1 || dim_noise < 1) {
        throw InvalidParameterError("problem: dimensions must be >= 1");
    }
    if (!(horizon > 0.0)) throw InvalidParameterError("problem: horizon must be > 0");
    if (!(delay >= 0.0)) throw InvalidParameterError("problem: delay must be >= 0");
    if (!coefficients.drift || !coefficients.diffusion) {
        throw InvalidParameterError("problem: drift and diffusion functionals are required");
    }
    if (initial_segment.dim() != dim_state) {
        throw DimensionMismatchError("problem: initial segment dim != state dim");
    }
    if (initial_segment.front_time() != -delay || initial_segment.back_time() != 0.0) {
        throw InvalidParameterError("problem: initial segment domain must be exactly [-delay, 0]");
    }
    const AssumptionConstants& k = constants;
    if (!(k.c >= 1.0) || !(k.a >= 1.0) || !(k.p >= 2.0) || !(k.beta >= 0.0) ||
        !(k.epsilon > 0.0 && k.epsilon <= 1.0)) {
        throw InvalidParameterError(
            "problem: constants must satisfy c,a >= 1, p >= 2, beta >= 0, epsilon in (0,1]");
    }
}

namespace {

void eval_functional(const ProblemSpec& p, double t, const PathView& x, std::span<double> out,
                     bool drift) {
    if (!(t >= 0.0 && t <= p.horizon)) {
        throw OutOfDomainError("coefficient evaluation: t outside [0, horizon]");
    }
    const double lo = -p.delay;
    if (x.front_time() > lo || x.back_time() < t) {
        throw OutOfDomainError("coefficient evaluation: path does not cover [-delay, t]");
    }
    const std::size_t want = static_cast<std::size_t>(p.dim_state) *
                             (drift ? 1u : static_cast<std::size_t>(p.dim_noise));
    if (out.size() != want) throw DimensionMismatchError("coefficient evaluation: bad output size");
    if (x.front_time() == lo && x.back_time() == t) {
        (drift ? p.coefficients.drift : p.coefficients.diffusion)(t, x, out);
        return;
    }
    const PiecewiseLinearPath restricted = truncate_path(x, lo, t);
    (drift ? p.coefficients.drift : p.coefficients.diffusion)(t, restricted.view(), out);
}

}  // namespace

void eval_drift_into(const ProblemSpec& p, double t, const PathView& x, std::span<double> out) {
    eval_functional(p, t, x, out, true);
}

void eval_diffusion_into(const ProblemSpec& p, double t, const PathView& x, std::span<double> out) {
    eval_functional(p, t, x, out, false);
}

std::vector<double> eval_drift(const ProblemSpec& p, double t, const PathView& x) {
    std::vector<double> out(static_cast<std::size_t>(p.dim_state));
    eval_drift_into(p, t, x, out);
    return out;
}

std::vector<double> eval_diffusion(const ProblemSpec& p, double t, const PathView& x) {
    std::vector<double> out(static_cast<std::size_t>(p.dim_state) *
                            static_cast<std::size_t>(p.dim_noise));
    eval_diffusion_into(p, t, x, out);
    return out;
}

ValidationReport validate_growth(const ProblemSpec& p,
                                 std::span<const PiecewiseLinearPath> sample_paths,
                                 std::span<const double> times) {
    p.validate();
    ValidationReport report;
    const double c = p.constants.c;
    const double a = p.constants.a;
    std::vector<double> mu(static_cast<std::size_t>(p.dim_state));
    std::vector<double> sigma(static_cast<std::size_t>(p.dim_state) *
                              static_cast<std::size_t>(p.dim_noise));
    for (int idx = 0; idx < static_cast<int>(sample_paths.size()); ++idx) {
        const PiecewiseLinearPath& path = sample_paths[static_cast<std::size_t>(idx)];
        for (double t : times) {
            eval_drift_into(p, t, path.view(), mu);
            eval_diffusion_into(p, t, path.view(), sigma);
            const double sup = path.sup_shifted_norm_sq(a, -p.delay, t);
            report.checks += 2;
            const double mu_lhs = vec_norm(mu);
            const double mu_rhs = c * std::sqrt(sup);
            if (mu_lhs > mu_rhs) {
                report.violations.push_back({idx, "drift_growth", t, mu_lhs, mu_rhs});
            }
            const double sig_lhs = frobenius_sq(sigma);
            const double sig_rhs = c * sup;
            if (sig_lhs > sig_rhs) {
                report.violations.push_back({idx, "diffusion_growth", t, sig_lhs, sig_rhs});
            }
        }
    }
    return report;
}

ValidationReport validate_monotonicity(
    const ProblemSpec& p,
    std::span<const std::pair<PiecewiseLinearPath, PiecewiseLinearPath>> path_pairs,
    std::span<const double> times) {
    p.validate();
    ValidationReport report;
    const int d = p.dim_state;
    const std::size_t dm = static_cast<std::size_t>(d) * static_cast<std::size_t>(p.dim_noise);
    std::vector<double> mu1(d), mu0(d), s1(dm), s0(dm), x1t(d), x0t(d);
    for (int idx = 0; idx < static_cast<int>(path_pairs.size()); ++idx) {
        const auto& [p1, p0] = path_pairs[static_cast<std::size_t>(idx)];
        const double sup_diff = sup_norm_diff(p1.view(), p0.view(), -p.delay, p.horizon);
        const double rhs = p.constants.c * sup_diff * sup_diff;
        for (double t : times) {
            eval_drift_into(p, t, p1.view(), mu1);
            eval_drift_into(p, t, p0.view(), mu0);
            eval_diffusion_into(p, t, p1.view(), s1);
            eval_diffusion_into(p, t, p0.view(), s0);
            p1.eval(t, x1t);
            p0.eval(t, x0t);
            double inner = 0.0;
            for (int j = 0; j < d; ++j) inner += (mu1[j] - mu0[j]) * (x1t[j] - x0t[j]);
            double sig_diff_sq = 0.0;
            for (std::size_t j = 0; j < dm; ++j) {
                const double e = s1[j] - s0[j];
                sig_diff_sq += e * e;
            }
            const double lhs =
                2.0 * inner + (p.constants.p - 1.0) * (1.0 + p.constants.epsilon) * sig_diff_sq;
            ++report.checks;
            if (lhs > rhs) {
                report.violations.push_back({idx, "monotonicity", t, lhs, rhs});
            }
        }
    }
    return report;
}

namespace {

ProblemSpec make_point_delay_linear(const std::map<std::string, double>& params) {
    check_param_keys(params, with_common({"decay", "delay_gain", "diffusion_scale",
                                          "initial_value"}));
    ProblemSpec spec;
    spec.name = "point_delay_linear";
    spec.horizon = get_param(params, "horizon", 1.0);
    spec.delay = get_param(params, "delay", 0.5);
    const double decay = get_param(params, "decay", 1.0);
    const double delay_gain = get_param(params, "delay_gain", 0.5);
    const double diffusion_scale = get_param(params, "diffusion_scale", 0.2);
    const double initial_value = get_param(params, "initial_value", 1.0);
    const double tau = spec.delay;
    spec.coefficients.drift = [decay, delay_gain, tau](double t, const PathView& x,
                                                       std::span<double> out) {
        const double lo = x.front_time();
        double arg = t - tau;
        if (arg < lo) arg = lo;
        out[0] = -decay * x.back_values()[0] + delay_gain * x.eval_scalar(arg);
    };
    spec.coefficients.diffusion = [diffusion_scale](double, const PathView& x,
                                                    std::span<double> out) {
        out[0] = diffusion_scale * x.back_values()[0];
    };
    spec.initial_segment = constant_initial_segment(tau, initial_value);
    spec.constants = {3.0, 1.0, 4.0, 0.5, 0.5};
    apply_constant_overrides(spec, params);
    record_params(spec, {{"decay", decay},
                         {"delay_gain", delay_gain},
                         {"diffusion_scale", diffusion_scale},
                         {"initial_value", initial_value}});
    return spec;
}

ProblemSpec make_running_max_drift(const std::map<std::string, double>& params) {
    check_param_keys(params,
                     with_common({"decay", "max_gain", "diffusion_scale", "initial_value"}));
    ProblemSpec spec;
    spec.name = "running_max_drift";
    spec.horizon = get_param(params, "horizon", 1.0);
    spec.delay = get_param(params, "delay", 0.5);
    const double decay = get_param(params, "decay", 1.0);
    const double max_gain = get_param(params, "max_gain", 0.25);
    const double diffusion_scale = get_param(params, "diffusion_scale", 0.2);
    const double initial_value = get_param(params, "initial_value", 1.0);
    spec.coefficients.drift = [decay, max_gain](double, const PathView& x, std::span<double> out) {
        const double running_max = x.max_coordinate(0, x.front_time(), x.back_time());
        out[0] = -decay * x.back_values()[0] + max_gain * running_max;
    };
    spec.coefficients.diffusion = [diffusion_scale](double, const PathView& x,
                                                    std::span<double> out) {
        out[0] = diffusion_scale * x.back_values()[0];
    };
    spec.initial_segment = constant_initial_segment(spec.delay, initial_value);
    spec.constants = {3.0, 1.0, 4.0, 0.5, 0.5};
    apply_constant_overrides(spec, params);
    record_params(spec, {{"decay", decay},
                         {"max_gain", max_gain},
                         {"diffusion_scale", diffusion_scale},
                         {"initial_value", initial_value}});
    return spec;
}

ProblemSpec make_distributed_delay(const std::map<std::string, double>& params) {
    check_param_keys(params, with_common({"decay", "kernel_gain", "kernel_rate",
                                          "diffusion_scale", "initial_value"}));
    ProblemSpec spec;
    spec.name = "distributed_delay";
    spec.horizon = get_param(params, "horizon", 1.0);
    spec.delay = get_param(params, "delay", 0.5);
    const double decay = get_param(params, "decay", 1.0);
    const double kernel_gain = get_param(params, "kernel_gain", 0.25);
    const double kernel_rate = get_param(params, "kernel_rate", 1.0);
    const double diffusion_scale = get_param(params, "diffusion_scale", 0.2);
    const double initial_value = get_param(params, "initial_value", 1.0);
    // Exact per-segment trapezoid of exp(-rate*(t-s)) * x(s) over the knot
    // partition of [-tau, t]; deterministic and resolution-independent for a
    // fixed knot set. O(knots) per evaluation.
    spec.coefficients.drift = [decay, kernel_gain, kernel_rate](double t, const PathView& x,
                                                                std::span<double> out) {
        double acc = 0.0;
        double prev_t = x.knot_time(0);
        double prev_f = std::exp(-kernel_rate * (t - prev_t)) * x.knot_values(0)[0];
        for (std::size_t i = 1; i < x.knot_count(); ++i) {
            const double ti = x.knot_time(i);
            const double fi = std::exp(-kernel_rate * (t - ti)) * x.knot_values(i)[0];
            acc += 0.5 * (ti - prev_t) * (prev_f + fi);
            prev_t = ti;
            prev_f = fi;
        }
        out[0] = -decay * x.back_values()[0] + kernel_gain * acc;
    };
    spec.coefficients.diffusion = [diffusion_scale](double, const PathView& x,
                                                    std::span<double> out) {
        out[0] = diffusion_scale * x.back_values()[0];
    };
    spec.initial_segment = constant_initial_segment(spec.delay, initial_value);
    spec.constants = {3.0, 1.0, 4.0, 1.0, 0.5};
    apply_constant_overrides(spec, params);
    record_params(spec, {{"decay", decay},
                         {"kernel_gain", kernel_gain},
                         {"kernel_rate", kernel_rate},
                         {"diffusion_scale", diffusion_scale},
                         {"initial_value", initial_value}});
    return spec;
}

ProblemSpec make_gbm_oracle(const std::map<std::string, double>& params) {
    check_param_keys(params, with_common({"mu", "sigma", "x0"}));
    ProblemSpec spec;
    spec.name = "gbm_oracle";
    spec.horizon = get_param(params, "horizon", 1.0);
    spec.delay = get_param(params, "delay", 0.0);
    if (spec.delay != 0.0) {
        throw InvalidParameterError("gbm_oracle: delay must be 0");
    }
    const double mu = get_param(params, "mu", 0.05);
    const double sigma = get_param(params, "sigma", 0.2);
    const double x0 = get_param(params, "x0", 1.0);
    spec.coefficients.drift = [mu](double, const PathView& x, std::span<double> out) {
        out[0] = mu * x.back_values()[0];
    };
    spec.coefficients.diffusion = [sigma](double, const PathView& x, std::span<double> out) {
        out[0] = sigma * x.back_values()[0];
    };
    spec.initial_segment = constant_initial_segment(0.0, x0);
    spec.oracle = [mu, sigma, x0](double t, const PathView& w, std::span<double> out) {
        out[0] = x0 * std::exp((mu - 0.5 * sigma * sigma) * t + sigma * w.eval_scalar(t));
    };
    spec.constants = {1.0, 1.0, 4.0, 0.5, 0.5};
    apply_constant_overrides(spec, params);
    record_params(spec, {{"mu", mu}, {"sigma", sigma}, {"x0", x0}});
    return spec;
}

ProblemSpec make_zero_noise_delay_ode(const std::map<std::string, double>& params) {
    check_param_keys(params,
                     with_common({"decay", "delay_gain", "initial_value", "oracle_steps"}));
    ProblemSpec spec;
    spec.name = "zero_noise_delay_ode";
    spec.horizon = get_param(params, "horizon", 1.0);
    spec.delay = get_param(params, "delay", 0.5);
    const double decay = get_param(params, "decay", 1.0);
    const double delay_gain = get_param(params, "delay_gain", 0.5);
    const double initial_value = get_param(params, "initial_value", 1.0);
    const int oracle_steps = static_cast<int>(get_param(params, "oracle_steps", 65536.0));
    if (oracle_steps < 1) throw InvalidParameterError("zero_noise_delay_ode: oracle_steps >= 1");
    const double tau = spec.delay;
    spec.coefficients.drift = [decay, delay_gain, tau](double t, const PathView& x,
                                                       std::span<double> out) {
        const double lo = x.front_time();
        double arg = t - tau;
        if (arg < lo) arg = lo;
        out[0] = -decay * x.back_values()[0] + delay_gain * x.eval_scalar(arg);
    };
    spec.coefficients.diffusion = [](double, const PathView&, std::span<double> out) {
        out[0] = 0.0;
    };
    spec.initial_segment = constant_initial_segment(tau, initial_value);
    auto reference = std::make_shared<PiecewiseLinearPath>(drift_only_euler(
        spec.coefficients.drift, spec.initial_segment, spec.horizon, oracle_steps));
    spec.oracle = [reference](double t, const PathView&, std::span<double> out) {
        out[0] = reference->eval_scalar(t);
    };
    spec.constants = {3.0, 1.0, 4.0, 0.5, 0.5};
    apply_constant_overrides(spec, params);
    record_params(spec, {{"decay", decay},
                         {"delay_gain", delay_gain},
                         {"initial_value", initial_value},
                         {"oracle_steps", static_cast<double>(oracle_steps)}});
    return spec;
}

}  // namespace

ProblemSpec builtin_problem(std::string_view name, const std::map<std::string, double>& params) {
    ProblemSpec spec;
    if (name == "point_delay_linear") {
        spec = make_point_delay_linear(params);
    } else if (name == "running_max_drift") {
        spec = make_running_max_drift(params);
    } else if (name == "distributed_delay") {
        spec = make_distributed_delay(params);
    } else if (name == "gbm_oracle") {
        spec = make_gbm_oracle(params);
    } else if (name == "zero_noise_delay_ode") {
        spec = make_zero_noise_delay_ode(params);
    } else {
        throw UnknownProblemError("unknown builtin problem: " + std::string(name));
    }
    spec.validate();
    return spec;
}

std::vector<std::string> builtin_names() {
    return {"point_delay_linear", "running_max_drift", "distributed_delay", "gbm_oracle",
            "zero_noise_delay_ode"};
}

std::vector<PiecewiseLinearPath> sample_random_paths(int dim, double tau, double horizon,
                                                     int count, std::uint64_t seed,
                                                     int interior_knots) {
    if (dim < 1 || count < 0 || interior_knots < 0 || !(horizon > 0.0) || !(tau >= 0.0)) {
        throw InvalidParameterError("sample_random_paths: bad parameters");
    }
    std::vector<PiecewiseLinearPath> out;
    out.reserve(static_cast<std::size_t>(count));
    const int segments = interior_knots + 1;
    const double span = horizon + tau;
    const double spacing = span / segments;
    for (int s = 0; s < count; ++s) {
        const auto stream = static_cast<std::uint64_t>(s);
        std::vector<double> knots(static_cast<std::size_t>(segments) + 1);
        knots.front() = -tau;
        knots.back() = horizon;
        for (int i = 1; i < segments; ++i) {
            const double u = rng::to_unit_open(
                rng::raw_word(seed, stream, static_cast<std::uint64_t>(i), 0,
                              rng::kDomainSamplePaths));
            knots[static_cast<std::size_t>(i)] = -tau + i * spacing + 0.8 * spacing * (u - 0.5);
        }
        std::vector<double> values(knots.size() * static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            values[static_cast<std::size_t>(j)] =
                rng::standard_normal(seed, stream, 0, static_cast<std::uint64_t>(1 + j),
                                     rng::kDomainSamplePaths);
        }
        for (std::size_t i = 1; i < knots.size(); ++i) {
            const double dt = knots[i] - knots[i - 1];
            for (int j = 0; j < dim; ++j) {
                const double z = rng::standard_normal(seed, stream, static_cast<std::uint64_t>(i),
                                                      static_cast<std::uint64_t>(1 + j),
                                                      rng::kDomainSamplePaths);
                values[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] =
                    values[(i - 1) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] +
                    std::sqrt(dt) * z;
            }
        }
        out.emplace_back(std::move(knots), std::move(values), dim);
    }
    return out;
}

}  // namespace sfde
