#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sfde/brownian.hpp"
#include "sfde/path.hpp"
#include "sfde/problem.hpp"

namespace sfde {

// One Euler run: skeleton values Y_0..Y_n on the grid plus the continuous
// interpolant on [-tau, T] (initial segment glued to the affine
// interpolation of the skeleton).
struct Trajectory {
    TimeGrid grid;
    int dim = 0;
    std::vector<double> skeleton;  // (n+1) x d, row k = Y_k
    PiecewiseLinearPath interpolant;

    std::span<const double> value_at_step(int k) const {
        return std::span<const double>(skeleton).subspan(static_cast<std::size_t>(k) * dim, dim);
    }
};

struct EulerOutcome {
    Trajectory trajectory;             // valid only when !abort_step
    std::optional<int> abort_step;     // first step with a non-finite coordinate
    bool ok() const { return !abort_step.has_value(); }
};

// Path-dependent Euler: Y_{k+1} = Y_k + mu(t_k, Y-interpolant) dt_k
//                              + sigma(t_k, Y-interpolant) dW_k,
// where the functional sees the interpolant truncated at t_k (its own knots
// up to step k glued to the initial segment), so only [-tau, t_k] is ever
// visible. Non-throwing core; aborts at the first non-finite state.
EulerOutcome euler_run(const ProblemSpec& problem, const TimeGrid& grid,
                       std::span<const double> increments);

// Throwing wrapper: NonFiniteError carries the step index.
Trajectory euler_step_run(const ProblemSpec& problem, const TimeGrid& grid,
                          std::span<const double> increments);

// Multi-resolution family driven by one Brownian path: coarse increments are
// exact block sums of the fine ones.
struct CoupledRun {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    int n_fine = 0;
    std::vector<int> coarse_ns;
    Trajectory fine;
    std::vector<Trajectory> coarse;
};

struct CoupledOutcome {
    CoupledRun run;
    std::optional<int> fine_abort_step;
    std::vector<std::optional<int>> coarse_abort_steps;  // one per coarse resolution
    BrownianSkeleton skeleton;                           // fine-grid skeleton
    bool all_ok() const;
};

// Non-throwing; preconditions (divisibility, n_fine >= 1) still throw
// InvalidParameterError before any work starts.
CoupledOutcome simulate_coupled_core(const ProblemSpec& problem, int n_fine,
                                     std::span<const int> coarse_ns, std::uint64_t seed,
                                     std::uint64_t stream);

// Throwing wrapper: NonFiniteError tagged with the failing resolution.
CoupledRun simulate_coupled(const ProblemSpec& problem, int n_fine,
                            std::span<const int> coarse_ns, std::uint64_t seed,
                            std::uint64_t stream);

}  // namespace sfde
