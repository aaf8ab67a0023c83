#include "sfde/solver.hpp"

#include <cmath>
#include <string>

#include "sfde/errors.hpp"

namespace sfde {

EulerOutcome euler_run(const ProblemSpec& problem, const TimeGrid& grid,
                       std::span<const double> increments) {
    problem.validate();
    const int d = problem.dim_state;
    const int m = problem.dim_noise;
    const int n = grid.n_steps();
    if (increments.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m)) {
        throw InvalidParameterError("euler_run: increment count does not match the grid");
    }
    const PiecewiseLinearPath& xi = problem.initial_segment;
    const std::size_t k0 = xi.knot_count();

    EulerOutcome out;
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

    std::vector<double> skeleton(static_cast<std::size_t>(n + 1) * d);
    std::copy(xi.values().end() - d, xi.values().end(), skeleton.begin());  // Y_0 = xi(0)

    std::vector<double> mu(static_cast<std::size_t>(d));
    std::vector<double> sigma(static_cast<std::size_t>(d) * static_cast<std::size_t>(m));
    const double* y = skeleton.data();
    for (int k = 0; k < n; ++k) {
        const std::size_t knots = k0 + static_cast<std::size_t>(k);
        const PathView view(std::span<const double>(times).first(knots),
                            std::span<const double>(values).first(knots * d), d, &cache);
        const double tk = grid[k];
        problem.coefficients.drift(tk, view, mu);
        problem.coefficients.diffusion(tk, view, sigma);
        const double dt = grid[k + 1] - tk;
        const double* dw = increments.data() + static_cast<std::size_t>(k) * m;
        double* y_next = skeleton.data() + static_cast<std::size_t>(k + 1) * d;
        bool finite = true;
        for (int i = 0; i < d; ++i) {
            double noise = 0.0;
            const double* sig_row = sigma.data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) noise += sig_row[j] * dw[j];
            y_next[i] = y[i] + mu[i] * dt + noise;
            finite = finite && std::isfinite(y_next[i]);
        }
        if (!finite) {
            out.abort_step = k + 1;
            return out;
        }
        double* row = values.data() + knots * d;
        std::copy(y_next, y_next + d, row);
        cache.append_row(std::span<const double>(row, d));
        y = y_next;
    }

    out.trajectory.grid = grid;
    out.trajectory.dim = d;
    out.trajectory.skeleton = std::move(skeleton);
    out.trajectory.interpolant = PiecewiseLinearPath(std::move(times), std::move(values), d);
    return out;
}

Trajectory euler_step_run(const ProblemSpec& problem, const TimeGrid& grid,
                          std::span<const double> increments) {
    EulerOutcome out = euler_run(problem, grid, increments);
    if (!out.ok()) {
        throw NonFiniteError("euler: non-finite state at step " + std::to_string(*out.abort_step),
                             *out.abort_step, grid.n_steps());
    }
    return std::move(out.trajectory);
}

bool CoupledOutcome::all_ok() const {
    if (fine_abort_step.has_value()) return false;
    for (const auto& a : coarse_abort_steps) {
        if (a.has_value()) return false;
    }
    return true;
}

CoupledOutcome simulate_coupled_core(const ProblemSpec& problem, int n_fine,
                                     std::span<const int> coarse_ns, std::uint64_t seed,
                                     std::uint64_t stream) {
    if (n_fine < 1) throw InvalidParameterError("simulate_coupled: n_fine must be >= 1");
    for (int n : coarse_ns) {
        if (n < 1 || n_fine % n != 0) {
            throw InvalidParameterError("simulate_coupled: every coarse n must divide n_fine");
        }
    }
    CoupledOutcome out;
    out.skeleton =
        BrownianSkeleton::generate(problem.dim_noise, n_fine, problem.horizon, seed, stream);
    out.run.seed = seed;
    out.run.stream = stream;
    out.run.n_fine = n_fine;
    out.run.coarse_ns.assign(coarse_ns.begin(), coarse_ns.end());

    EulerOutcome fine = euler_run(problem, out.skeleton.grid, out.skeleton.increments);
    out.fine_abort_step = fine.abort_step;
    if (fine.ok()) out.run.fine = std::move(fine.trajectory);

    out.run.coarse.resize(coarse_ns.size());
    out.coarse_abort_steps.resize(coarse_ns.size());
    for (std::size_t i = 0; i < coarse_ns.size(); ++i) {
        const BrownianSkeleton coarse_skel = out.skeleton.coarsen(n_fine / coarse_ns[i]);
        EulerOutcome res = euler_run(problem, coarse_skel.grid, coarse_skel.increments);
        out.coarse_abort_steps[i] = res.abort_step;
        if (res.ok()) out.run.coarse[i] = std::move(res.trajectory);
    }
    return out;
}

CoupledRun simulate_coupled(const ProblemSpec& problem, int n_fine,
                            std::span<const int> coarse_ns, std::uint64_t seed,
                            std::uint64_t stream) {
    CoupledOutcome out = simulate_coupled_core(problem, n_fine, coarse_ns, seed, stream);
    if (out.fine_abort_step) {
        throw NonFiniteError("coupled run: fine resolution aborted at step " +
                                 std::to_string(*out.fine_abort_step),
                             *out.fine_abort_step, n_fine);
    }
    for (std::size_t i = 0; i < out.coarse_abort_steps.size(); ++i) {
        if (out.coarse_abort_steps[i]) {
            throw NonFiniteError("coupled run: resolution n=" +
                                     std::to_string(out.run.coarse_ns[i]) +
                                     " aborted at step " +
                                     std::to_string(*out.coarse_abort_steps[i]),
                                 *out.coarse_abort_steps[i], out.run.coarse_ns[i]);
        }
    }
    return std::move(out.run);
}

}  // namespace sfde
