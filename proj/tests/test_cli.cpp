#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sfde/brownian.hpp"
#include "sfde/problem.hpp"

namespace fs = std::filesystem;

namespace {

#ifndef SFDE_CLI_PATH
#error "SFDE_CLI_PATH must be defined by the build"
#endif

const char* kCli = SFDE_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = std::string(kCli) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sfde_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

void write_study_config(const fs::path& file, const std::string& extra = "") {
    std::ofstream os(file);
    os << "[problem]\n"
          "builtin = point_delay_linear\n"
          "[study]\n"
          "coarse_ns = 8,16,32,64\n"
          "n_fine = 512\n"
          "num_paths = 60\n"
          "q = 2\n"
          "seed = 7\n"
          "bootstrap_resamples = 100\n"
          "reference = fine\n"
       << extra;
}

}  // namespace

TEST_CASE("exit codes: config errors") {
    CHECK(run("simulate --builtin gbm_oracle --n 0 --out " +
              fresh_dir("badn").string()) == 2);
    CHECK(run("simulate --builtin no_such --n 8 --out " + fresh_dir("badp").string()) == 2);
    CHECK(run("simulate --n 8 --out " + fresh_dir("noprob").string()) == 2);  // no problem
    CHECK(run("gronwall-check --scenario g9") == 2);
    CHECK(run("frobnicate") == 2);  // unknown subcommand
}

TEST_CASE("simulate: zero-noise output is identical across seeds") {
    const auto d1 = fresh_dir("zn1");
    const auto d2 = fresh_dir("zn2");
    REQUIRE(run("simulate --builtin zero_noise_delay_ode --n 64 --seed 1 --out " +
                d1.string()) == 0);
    REQUIRE(run("simulate --builtin zero_noise_delay_ode --n 64 --seed 999 --out " +
                d2.string()) == 0);
    CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
}

TEST_CASE("simulate: same seed reproduces bytes; manifest lists outputs") {
    const auto d1 = fresh_dir("rep1");
    const auto d2 = fresh_dir("rep2");
    REQUIRE(run("simulate --builtin gbm_oracle --n 128 --seed 11 --out " + d1.string()) == 0);
    REQUIRE(run("simulate --builtin gbm_oracle --n 128 --seed 11 --out " + d2.string()) == 0);
    CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
    const std::string manifest = slurp(d1 / "manifest.json");
    CHECK(manifest.find("\"trajectory.csv\"") != std::string::npos);
    CHECK(manifest.find("\"tool_version\"") != std::string::npos);
}

TEST_CASE("simulate: gbm endpoint is close to the exact solution") {
    const auto dir = fresh_dir("gbm");
    REQUIRE(run("simulate --builtin gbm_oracle --n 1024 --seed 5 --out " + dir.string()) == 0);
    // recompute W_T from the same counter-based stream the CLI used
    const auto skel = sfde::BrownianSkeleton::generate(1, 1024, 1.0, 5, 0);
    double w_t = 0.0;
    for (int k = 0; k < 1024; ++k) w_t += skel.row(k)[0];
    const double exact = std::exp((0.05 - 0.5 * 0.04) * 1.0 + 0.2 * w_t);
    const std::string csv = slurp(dir / "trajectory.csv");
    const auto last_line = csv.substr(csv.find_last_of('\n', csv.size() - 2) + 1);
    const double y_t = std::stod(last_line.substr(last_line.find(',') + 1));
    CHECK(y_t == doctest::Approx(exact).epsilon(0.05));  // scheme error at n = 2^10
}

TEST_CASE("simulate with coarse resolutions writes the coupled layout") {
    const auto dir = fresh_dir("coupled");
    REQUIRE(run("simulate --builtin point_delay_linear --n 64 --coarse-ns 8,16 --seed 3 --out " +
                dir.string()) == 0);
    CHECK(fs::exists(dir / "fine.csv"));
    CHECK(fs::exists(dir / "coarse_8.csv"));
    CHECK(fs::exists(dir / "coarse_16.csv"));
    CHECK(fs::exists(dir / "meta.json"));
    const std::string meta = slurp(dir / "meta.json");
    CHECK(meta.find("\"problem_hash\"") != std::string::npos);
}

TEST_CASE("converge: threads do not change output bytes; manifest config reproduces") {
    const auto cfg = fs::temp_directory_path() / "sfde_cli_study.ini";
    write_study_config(cfg);
    const auto d1 = fresh_dir("thr1");
    const auto d2 = fresh_dir("thr2");
    REQUIRE(run("converge --config " + cfg.string() + " --threads 1 --out " + d1.string()) == 0);
    REQUIRE(run("converge --config " + cfg.string() + " --threads 8 --out " + d2.string()) == 0);
    CHECK(slurp(d1 / "study.json") == slurp(d2 / "study.json"));
    CHECK(slurp(d1 / "study.csv") == slurp(d2 / "study.csv"));

    SUBCASE("overrides change the study") {
        const auto d3 = fresh_dir("thr3");
        REQUIRE(run("converge --config " + cfg.string() + " --set study.seed=8 --out " +
                    d3.string()) == 0);
        CHECK(slurp(d1 / "study.csv") != slurp(d3 / "study.csv"));
    }
}

TEST_CASE("converge honors TooManyAborts with exit 3") {
    const auto cfg = fs::temp_directory_path() / "sfde_cli_abort.ini";
    {
        std::ofstream os(cfg);
        os << "[problem]\n"
              "builtin = gbm_oracle\n"
              "[problem.params]\n"
              "mu = 90\n"
              "sigma = 40\n"
              "x0 = 1e300\n"
              "[study]\n"
              "coarse_ns = 8\n"
              "n_fine = 64\n"
              "num_paths = 40\n"
              "q = 2\n"
              "seed = 1\n";
    }
    CHECK(run("converge --config " + cfg.string() + " --out " + fresh_dir("abort").string()) ==
          3);
}

TEST_CASE("emit-plot-script writes runnable python next to the data") {
    const auto dir = fresh_dir("plot");
    const auto cfg = fs::temp_directory_path() / "sfde_cli_plot.ini";
    write_study_config(cfg);
    REQUIRE(run("converge --config " + cfg.string() + " --emit-plot-script --out " +
                dir.string()) == 0);
    const std::string script = slurp(dir / "plot.py");
    CHECK(script.find("study.csv") != std::string::npos);
    CHECK(slurp(dir / "manifest.json").find("\"plot.py\"") != std::string::npos);
}

TEST_CASE("validate: builtins are clean, superlinear coefficients are not") {
    CHECK(run("validate --builtin running_max_drift --samples 25 --seed 3") == 0);
    // oversized diffusion_scale breaks the declared growth constant
    CHECK(run("validate --builtin gbm_oracle --set problem.params.sigma=9 --samples 25") == 4);
}

TEST_CASE("gronwall-check: scenario exit codes") {
    CHECK(run("gronwall-check --scenario g1 --alpha 1 --h-const 1 --p 0.5 --horizon 1") == 0);
    CHECK(run("gronwall-check --scenario g2 --builtin point_delay_linear --q 2 --n 64 "
              "--paths 50") == 0);
}

TEST_CASE("bounds prints json with every evaluator") {
    const auto dir = fresh_dir("bounds");
    REQUIRE(run("bounds --q 2 --p 4 --horizon 0.5 --c 3 --a 1 --mesh 0.0078125 --out " +
                dir.string()) == 0);
    const std::string text = slurp(dir / "bounds.json");
    for (const char* name :
         {"ms_gronwall", "gronwall", "moment", "increment", "chained_modulus", "strong_error"}) {
        CHECK(text.find(std::string("\"") + name + "\"") != std::string::npos);
    }
}

TEST_CASE("failed runs leave no partial data files") {
    const auto dir = fresh_dir("partial");
    CHECK(run("simulate --builtin gbm_oracle --set problem.params.x0=1e300 "
              "--set problem.params.mu=1000 --set problem.params.sigma=0 --n 16 --seed 2 --out " +
              dir.string()) == 3);
    CHECK(!fs::exists(dir / "trajectory.csv"));
    CHECK(!fs::exists(dir / "manifest.json"));
}
