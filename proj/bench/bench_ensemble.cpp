// Wall-clock comparison of the serial reference loop (threads = 1) against
// the OpenMP ensemble map, plus a byte-identity check between the two.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "sfde/montecarlo.hpp"
#include "sfde/report.hpp"

using namespace sfde;

namespace {

double run_study(const ProblemSpec& problem, int threads, std::string* dump) {
    ErrorStudyConfig config;
    config.coarse_ns = {8, 16, 32, 64, 128};
    config.n_fine = 1 << 11;
    config.num_paths = 2000;
    config.q = 2.0;
    config.seed = 31415;
    config.bootstrap_resamples = 500;
    config.threads = threads;
    const auto start = std::chrono::steady_clock::now();
    const StudyResult result = strong_error_study(problem, config);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    *dump = study_result_to_json(result).dump();
    return elapsed;
}

}  // namespace

int main() {
    const auto problem = builtin_problem("running_max_drift", {});
    std::string serial_dump, parallel_dump;

    const double t_serial = run_study(problem, 1, &serial_dump);
    std::printf("serial reference:   %8.3f s\n", t_serial);

    const int cores = omp_get_max_threads();
    const double t_parallel = run_study(problem, 0, &parallel_dump);
    std::printf("openmp (%d threads): %8.3f s  speedup %.2fx\n", cores, t_parallel,
                t_serial / t_parallel);

    if (serial_dump != parallel_dump) {
        std::printf("MISMATCH: serial and parallel outputs differ\n");
        return 1;
    }
    std::printf("outputs byte-identical across execution modes\n");
    return 0;
}
