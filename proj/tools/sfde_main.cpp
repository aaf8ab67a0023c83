#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfde/bounds.hpp"
#include "sfde/config.hpp"
#include "sfde/errors.hpp"
#include "sfde/montecarlo.hpp"
#include "sfde/report.hpp"
#include "sfde/solver.hpp"

namespace fs = std::filesystem;
using sfde::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonFinite = 3;
constexpr int kExitCheckFailed = 4;

struct CommonArgs {
    std::string config_file;
    std::string builtin;
    std::vector<std::string> overrides;  // section.key=value
    std::string out_dir;
    int threads = 0;
    bool emit_plot_script = false;
};

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw sfde::InvalidParameterError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

sfde::ConfigMap load_config(const CommonArgs& args) {
    sfde::ConfigMap config;
    if (!args.config_file.empty()) config = sfde::parse_config_text(read_file(args.config_file));
    if (!args.builtin.empty()) config["problem"]["builtin"] = args.builtin;
    for (const std::string& ov : args.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) {
            throw sfde::InvalidParameterError("--set expects section.key=value: " + ov);
        }
        const std::string lhs = ov.substr(0, eq);
        const auto dot = lhs.rfind('.');
        if (dot == std::string::npos) {
            throw sfde::InvalidParameterError("--set expects section.key=value: " + ov);
        }
        config[lhs.substr(0, dot)][lhs.substr(dot + 1)] = ov.substr(eq + 1);
    }
    if (config.find("problem") == config.end()) {
        throw sfde::InvalidParameterError("no problem given: use --config or --builtin");
    }
    return config;
}

class ManifestWriter {
public:
    ManifestWriter(std::string command, fs::path out_dir, int threads)
        : command_(std::move(command)), out_dir_(std::move(out_dir)), threads_(threads),
          start_(std::chrono::steady_clock::now()) {
        fs::create_directories(out_dir_);
    }

    void set_config(const sfde::ConfigMap& config) { config_ = config; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void set_problem_hash(std::string hash) { problem_hash_ = std::move(hash); }

    void write_output(const std::string& name, const std::string& content) {
        sfde::write_file_atomic(out_dir_ / name, content);
        outputs_.push_back(name);
    }

    void finalize() {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        ordered_json manifest;
        manifest["tool_version"] = sfde::kToolVersion;
        manifest["command"] = command_;
        manifest["config"] = sfde::config_to_json(config_);
        manifest["seed"] = seed_;
        manifest["problem_hash"] = problem_hash_;
        manifest["threads"] = threads_;
        manifest["outputs"] = outputs_;
        manifest["duration_seconds"] = elapsed;
        sfde::write_file_atomic(out_dir_ / "manifest.json", manifest.dump(2) + "\n");
    }

private:
    std::string command_;
    fs::path out_dir_;
    int threads_ = 0;
    std::chrono::steady_clock::time_point start_;
    sfde::ConfigMap config_;
    std::uint64_t seed_ = 0;
    std::string problem_hash_;
    std::vector<std::string> outputs_;
};

const char* kStudyPlotScript = R"PY(#!/usr/bin/env python3
"""Log-log plot of a convergence study CSV produced by `sfde converge`."""
import csv
import math
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "study.csv"
rows = list(csv.DictReader(open(path)))
ns = [int(r["n"]) for r in rows]
qn = [float(r["q_norm"]) for r in rows]
lo = [float(r["ci_lo"]) for r in rows]
hi = [float(r["ci_hi"]) for r in rows]

fig, ax = plt.subplots(figsize=(6, 4.5))
ax.loglog(ns, qn, "o-", base=2, label="empirical q-norm")
ax.fill_between(ns, lo, hi, alpha=0.25, label="bootstrap 95% CI")
if len(ns) >= 2:
    s = (math.log2(qn[-1]) - math.log2(qn[0])) / (math.log2(ns[-1]) - math.log2(ns[0]))
    ax.set_title(f"strong error, endpoint slope {s:.3f}")
ax.set_xlabel("n (steps)")
ax.set_ylabel("L^q error")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(path.replace(".csv", ".png"), dpi=150)
)PY";

const char* kTrajectoryPlotScript = R"PY(#!/usr/bin/env python3
"""Plot of a trajectory CSV produced by `sfde simulate`."""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "trajectory.csv"
rows = list(csv.DictReader(open(path)))
t = [float(r["t"]) for r in rows]
cols = [k for k in rows[0] if k != "t"]

fig, ax = plt.subplots(figsize=(6, 4))
for k in cols:
    ax.plot(t, [float(r[k]) for r in rows], label=k)
ax.set_xlabel("t")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(path.replace(".csv", ".png"), dpi=150)
)PY";

void apply_threads(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int cmd_simulate(const CommonArgs& args, int n, std::uint64_t seed, std::uint64_t stream,
                 const std::vector<int>& coarse_ns) {
    sfde::ConfigMap config = load_config(args);
    const sfde::ProblemSpec problem = sfde::problem_from_config(config);
    apply_threads(args.threads);

    ManifestWriter manifest("simulate", args.out_dir, args.threads);
    sfde::ConfigMap resolved = sfde::problem_to_config(problem);
    resolved["run"]["n"] = std::to_string(n);
    resolved["run"]["seed"] = std::to_string(seed);
    resolved["run"]["stream"] = std::to_string(stream);
    manifest.set_config(resolved);
    manifest.set_seed(seed);
    manifest.set_problem_hash(sfde::problem_hash(problem));

    if (coarse_ns.empty()) {
        const sfde::BrownianSkeleton skel = sfde::BrownianSkeleton::generate(
            problem.dim_noise, n, problem.horizon, seed, stream);
        const sfde::Trajectory trajectory =
            sfde::euler_step_run(problem, skel.grid, skel.increments);
        manifest.write_output("trajectory.csv", sfde::trajectory_to_csv(trajectory));
        if (args.emit_plot_script) manifest.write_output("plot.py", kTrajectoryPlotScript);
    } else {
        const sfde::CoupledRun run =
            sfde::simulate_coupled(problem, n, coarse_ns, seed, stream);
        manifest.write_output("fine.csv", sfde::trajectory_to_csv(run.fine));
        for (std::size_t i = 0; i < run.coarse.size(); ++i) {
            manifest.write_output("coarse_" + std::to_string(run.coarse_ns[i]) + ".csv",
                                  sfde::trajectory_to_csv(run.coarse[i]));
        }
        ordered_json meta;
        meta["seed"] = seed;
        meta["stream"] = stream;
        meta["problem_hash"] = sfde::problem_hash(problem);
        meta["n_fine"] = n;
        meta["coarse_ns"] = run.coarse_ns;
        manifest.write_output("meta.json", meta.dump(2) + "\n");
        if (args.emit_plot_script) manifest.write_output("plot.py", kTrajectoryPlotScript);
    }
    manifest.finalize();
    return kExitOk;
}

int cmd_converge(const CommonArgs& args) {
    sfde::ConfigMap config = load_config(args);
    const sfde::ProblemSpec problem = sfde::problem_from_config(config);
    sfde::ErrorStudyConfig study = sfde::study_from_config(config);
    study.threads = args.threads;
    apply_threads(args.threads);

    ManifestWriter manifest("converge", args.out_dir, args.threads);
    sfde::ConfigMap resolved = sfde::problem_to_config(problem);
    const sfde::ConfigMap study_cfg = sfde::study_to_config(study);
    resolved.insert(study_cfg.begin(), study_cfg.end());
    manifest.set_config(resolved);
    manifest.set_seed(study.seed);
    manifest.set_problem_hash(sfde::problem_hash(problem));

    const sfde::StudyResult result = sfde::strong_error_study(problem, study);

    ordered_json j;
    j["config"] = sfde::config_to_json(resolved);
    j.update(sfde::study_result_to_json(result));
    manifest.write_output("study.json", j.dump(2) + "\n");
    manifest.write_output("study.csv", sfde::study_result_to_csv(result));
    if (args.emit_plot_script) manifest.write_output("plot.py", kStudyPlotScript);
    manifest.finalize();

    std::printf("%8s %22s %22s %10s %14s\n", "n", "q_norm", "ci", "aborted", "log_bound");
    for (const sfde::StudyPerN& row : result.per_n) {
        std::printf("%8d %22.15g [%9.3g,%9.3g] %6d %14.6g\n", row.n, row.q_norm, row.ci_lo,
                    row.ci_hi, row.aborted, row.log_bound);
    }
    if (result.fit) {
        std::printf("fitted rate %.6f (slope %.6f +- %.6f, R^2 %.6f)\n", result.fit->rate(),
                    result.fit->slope, result.fit->slope_stderr, result.fit->r_squared);
    } else {
        std::printf("no rate fit: degenerate errors\n");
    }
    return kExitOk;
}

struct BoundsArgs {
    double q = 2.0, p = 4.0, horizon = 1.0, c = 1.0, a = 1.0, epsilon = 0.5, beta = 0.0;
    double mesh = 1.0 / 64.0;
    double xi_sup_sq = 1.0;
    double gap = -1.0;  // defaults to mesh
    double ms_p = 0.5, alpha_integral = 0.0, lambda_integral = 0.0, log_rhs_expectation = 0.0;
};

int cmd_bounds(const CommonArgs& args, const BoundsArgs& b) {
    sfde::bounds::TheoremThreeParams params;
    params.q = b.q;
    params.p = b.p;
    params.horizon = b.horizon;
    params.c = b.c;
    params.a = b.a;
    params.epsilon = b.epsilon;
    params.beta = b.beta;
    params.mesh = b.mesh;
    params.log_a_plus_sup_xi_sq = std::log(b.a + b.xi_sup_sq);
    const double gap = b.gap > 0.0 ? b.gap : b.mesh;

    const auto entry = [](const char* name, ordered_json params_json, double log_value) {
        ordered_json e;
        e["bound"] = name;
        e["params"] = std::move(params_json);
        e["log_value"] = log_value;
        const auto v = sfde::bounds::exp_if_representable(log_value);
        e["value_if_representable"] = v ? ordered_json(*v) : ordered_json(nullptr);
        return e;
    };
    ordered_json t3_params;
    t3_params["q"] = b.q;
    t3_params["p"] = b.p;
    t3_params["horizon"] = b.horizon;
    t3_params["c"] = b.c;
    t3_params["a"] = b.a;
    t3_params["epsilon"] = b.epsilon;
    t3_params["beta"] = b.beta;
    t3_params["mesh"] = b.mesh;
    t3_params["xi_sup_sq"] = b.xi_sup_sq;

    ordered_json out = ordered_json::array();
    out.push_back(entry("ms_gronwall",
                        {{"p", b.ms_p},
                         {"alpha_integral", b.alpha_integral},
                         {"log_sup_h_p", b.log_rhs_expectation}},
                        sfde::bounds::ms_gronwall_log_bound(b.ms_p, b.alpha_integral,
                                                            b.log_rhs_expectation)));
    const auto gron = sfde::bounds::GronwallInputs::constant_rates(
        b.p, b.q, b.horizon, b.alpha_integral / std::max(b.horizon, 1e-300),
        b.lambda_integral / std::max(b.horizon, 1e-300), b.log_rhs_expectation);
    out.push_back(entry("gronwall",
                        {{"p", b.p},
                         {"q", b.q},
                         {"horizon", b.horizon},
                         {"alpha_integral", b.alpha_integral},
                         {"lambda_integral", b.lambda_integral},
                         {"log_rhs_expectation", b.log_rhs_expectation}},
                        sfde::bounds::gronwall_log_bound(gron)));
    out.push_back(entry("moment", t3_params, sfde::bounds::moment_log_bound(params)));
    {
        ordered_json p2 = t3_params;
        p2["gap"] = gap;
        out.push_back(entry("increment", p2, sfde::bounds::increment_log_bound(params, gap)));
        out.push_back(
            entry("chained_modulus", p2, sfde::bounds::chained_modulus_log_bound(params, gap)));
    }
    out.push_back(entry("strong_error", t3_params, sfde::bounds::strong_error_log_bound(params)));

    const std::string text = out.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!args.out_dir.empty()) {
        ManifestWriter manifest("bounds", args.out_dir, args.threads);
        sfde::ConfigMap cfg;
        for (auto& e : out) {
            (void)e;
        }
        manifest.set_config(cfg);
        manifest.write_output("bounds.json", text);
        manifest.finalize();
    }
    return kExitOk;
}

int cmd_gronwall_check(const CommonArgs& args, const std::string& scenario,
                       const sfde::GronwallG1Scenario& g1, sfde::GronwallG2Scenario g2) {
    apply_threads(args.threads);
    sfde::GronwallCheckReport report;
    if (scenario == "g1" || scenario == "G1") {
        report = sfde::gronwall_check_g1(g1);
    } else if (scenario == "g2" || scenario == "G2") {
        const sfde::ConfigMap config = load_config(args);
        const sfde::ProblemSpec problem = sfde::problem_from_config(config);
        g2.threads = args.threads;
        report = sfde::gronwall_check_g2(problem, g2);
    } else {
        throw sfde::InvalidScenarioError("unknown scenario: " + scenario +
                                         " (expected g1 or g2)");
    }
    const std::string text = sfde::gronwall_report_to_json(report).dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!args.out_dir.empty()) {
        ManifestWriter manifest("gronwall-check", args.out_dir, args.threads);
        manifest.write_output("gronwall.json", text);
        manifest.finalize();
    }
    return report.holds ? kExitOk : kExitCheckFailed;
}

int cmd_validate(const CommonArgs& args, int samples, std::uint64_t seed, int time_points) {
    const sfde::ConfigMap config = load_config(args);
    const sfde::ProblemSpec problem = sfde::problem_from_config(config);
    apply_threads(args.threads);
    if (samples < 1 || time_points < 1) {
        throw sfde::InvalidParameterError("validate: samples and times must be >= 1");
    }

    const std::vector<sfde::PiecewiseLinearPath> paths = sfde::sample_random_paths(
        problem.dim_state, problem.delay, problem.horizon, 2 * samples, seed);
    std::vector<double> times(static_cast<std::size_t>(time_points));
    for (int i = 0; i < time_points; ++i) {
        times[static_cast<std::size_t>(i)] =
            problem.horizon * static_cast<double>(i) / std::max(1, time_points - 1);
    }
    std::vector<sfde::PiecewiseLinearPath> single(paths.begin(), paths.begin() + samples);
    std::vector<std::pair<sfde::PiecewiseLinearPath, sfde::PiecewiseLinearPath>> pairs;
    pairs.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        pairs.emplace_back(paths[static_cast<std::size_t>(i)],
                           paths[static_cast<std::size_t>(samples + i)]);
    }
    const sfde::ValidationReport growth = sfde::validate_growth(problem, single, times);
    const sfde::ValidationReport mono = sfde::validate_monotonicity(problem, pairs, times);

    ordered_json j;
    j["problem"] = problem.name;
    j["growth"] = sfde::validation_report_to_json(growth);
    j["monotonicity"] = sfde::validation_report_to_json(mono);
    const std::string text = j.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!args.out_dir.empty()) {
        ManifestWriter manifest("validate", args.out_dir, args.threads);
        manifest.set_config(sfde::problem_to_config(problem));
        manifest.set_seed(seed);
        manifest.set_problem_hash(sfde::problem_hash(problem));
        manifest.write_output("validation.json", text);
        manifest.finalize();
    }
    return (growth.clean() && mono.clean()) ? kExitOk : kExitCheckFailed;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_config = true) {
    if (with_config) {
        cmd->add_option("--config", args.config_file, "problem/study config file");
        cmd->add_option("--builtin", args.builtin, "builtin problem name");
        cmd->add_option("--set", args.overrides, "override a config entry: section.key=value");
    }
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--threads", args.threads,
                    "worker threads (0 = all cores; output bytes are identical for any value)");
    cmd->add_flag("--emit-plot-script", args.emit_plot_script,
                  "also write a python plotting script for the CSV outputs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-dependent SDE simulation, convergence studies and bound evaluation"};
    app.require_subcommand(1);

    CommonArgs sim_args;
    int sim_n = 0;
    std::uint64_t sim_seed = 0, sim_stream = 0;
    std::vector<int> sim_coarse;
    CLI::App* sim = app.add_subcommand("simulate", "run one Euler trajectory and export CSV");
    add_common(sim, sim_args);
    sim->add_option("--n", sim_n, "number of steps")->required();
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--stream", sim_stream, "trajectory stream index");
    sim->add_option("--coarse-ns", sim_coarse,
                    "also run coupled coarse resolutions (divisors of --n)")
        ->delimiter(',');

    CommonArgs conv_args;
    CLI::App* conv = app.add_subcommand("converge", "strong-error convergence study");
    add_common(conv, conv_args);

    CommonArgs bounds_args;
    BoundsArgs bflags;
    CLI::App* bnd = app.add_subcommand("bounds", "evaluate the closed-form log-bounds");
    add_common(bnd, bounds_args, false);
    bnd->add_option("--q", bflags.q, "error norm exponent");
    bnd->add_option("--p", bflags.p, "monotonicity exponent");
    bnd->add_option("--horizon", bflags.horizon, "time horizon T");
    bnd->add_option("--c", bflags.c, "growth constant c");
    bnd->add_option("--a", bflags.a, "shift constant a");
    bnd->add_option("--epsilon", bflags.epsilon, "epsilon in (0,1]");
    bnd->add_option("--beta", bflags.beta, "temporal regularity exponent");
    bnd->add_option("--mesh", bflags.mesh, "mesh |delta_1|");
    bnd->add_option("--xi-sup-sq", bflags.xi_sup_sq, "sup of ||xi||^2 over [-tau,0]");
    bnd->add_option("--gap", bflags.gap, "time gap for the increment bound (default: mesh)");
    bnd->add_option("--ms-p", bflags.ms_p, "exponent p in (0,1) for the supremum bound");
    bnd->add_option("--alpha-integral", bflags.alpha_integral, "integral of alpha over [0,T]");
    bnd->add_option("--lambda-integral", bflags.lambda_integral, "integral of lambda over [0,T]");
    bnd->add_option("--log-rhs-expectation", bflags.log_rhs_expectation,
                    "log of the initial-data expectation");

    CommonArgs gron_args;
    std::string scenario;
    sfde::GronwallG1Scenario g1;
    sfde::GronwallG2Scenario g2;
    CLI::App* gron = app.add_subcommand("gronwall-check",
                                        "empirical check of the supremum Gronwall bounds");
    add_common(gron, gron_args);
    gron->add_option("--scenario", scenario, "g1 or g2")->required();
    gron->add_option("--alpha", g1.alpha, "G1: constant alpha rate");
    gron->add_option("--h-const", g1.h_const, "G1: constant H");
    gron->add_option("--p", g1.p, "G1: exponent in (0,1)");
    gron->add_option("--horizon", g1.horizon, "G1: time horizon");
    gron->add_option("--steps", g1.integration_steps, "G1: integration steps");
    gron->add_option("--q", g2.q, "G2: moment exponent (>= 1)");
    gron->add_option("--n", g2.n, "G2: Euler steps");
    gron->add_option("--paths", g2.num_paths, "G2: Monte Carlo paths");
    gron->add_option("--seed", g2.seed, "G2: RNG seed");

    CommonArgs val_args;
    int val_samples = 100, val_times = 33;
    std::uint64_t val_seed = 0;
    CLI::App* val = app.add_subcommand("validate",
                                       "sampled growth/monotonicity assumption checks");
    add_common(val, val_args);
    val->add_option("--samples", val_samples, "number of random sample paths / pairs");
    val->add_option("--seed", val_seed, "RNG seed for path sampling");
    val->add_option("--times", val_times, "number of check times in [0,T]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args, sim_n, sim_seed, sim_stream, sim_coarse);
        if (conv->parsed()) return cmd_converge(conv_args);
        if (bnd->parsed()) return cmd_bounds(bounds_args, bflags);
        if (gron->parsed()) return cmd_gronwall_check(gron_args, scenario, g1, g2);
        if (val->parsed()) return cmd_validate(val_args, val_samples, val_seed, val_times);
    } catch (const sfde::NonFiniteError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNonFinite;
    } catch (const sfde::TooManyAbortsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNonFinite;
    } catch (const sfde::InvalidScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const sfde::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
