#include "sfde/brownian.hpp"

#include <cmath>

#include "sfde/errors.hpp"
#include "sfde/rng.hpp"

namespace sfde {

BrownianSkeleton BrownianSkeleton::generate(int dim_noise, int n_steps, double horizon,
                                            std::uint64_t seed, std::uint64_t stream) {
    if (dim_noise < 1) throw InvalidParameterError("brownian: dim_noise must be >= 1");
    BrownianSkeleton skel;
    skel.grid = TimeGrid::uniform(n_steps, horizon);
    skel.dim_noise = dim_noise;
    skel.seed = seed;
    skel.stream = stream;
    skel.increments.resize(static_cast<std::size_t>(n_steps) * dim_noise);
    const double sd = std::sqrt(horizon / n_steps);
    for (int k = 0; k < n_steps; ++k) {
        double* row = skel.increments.data() + static_cast<std::size_t>(k) * dim_noise;
        for (int j = 0; j < dim_noise; ++j) {
            row[j] = sd * rng::standard_normal(seed, stream, static_cast<std::uint64_t>(k),
                                               static_cast<std::uint64_t>(j),
                                               rng::kDomainBrownian);
        }
    }
    return skel;
}

BrownianSkeleton BrownianSkeleton::coarsen(int factor) const {
    if (factor < 1 || steps() % factor != 0) {
        throw InvalidParameterError("brownian coarsen: factor must divide the step count");
    }
    if (factor == 1) return *this;
    const int n_coarse = steps() / factor;
    BrownianSkeleton out;
    out.grid = TimeGrid::uniform(n_coarse, grid.horizon());
    out.dim_noise = dim_noise;
    out.seed = seed;
    out.stream = stream;
    out.increments.assign(static_cast<std::size_t>(n_coarse) * dim_noise, 0.0);
    for (int i = 0; i < n_coarse; ++i) {
        double* dst = out.increments.data() + static_cast<std::size_t>(i) * dim_noise;
        for (int k = i * factor; k < (i + 1) * factor; ++k) {
            const double* src = row(k);
            for (int j = 0; j < dim_noise; ++j) dst[j] += src[j];
        }
    }
    return out;
}

PiecewiseLinearPath BrownianSkeleton::cumulative_path() const {
    const int n = steps();
    const int m = dim_noise;
    std::vector<double> knots(grid.points().begin(), grid.points().end());
    std::vector<double> values(static_cast<std::size_t>(n + 1) * m, 0.0);
    for (int k = 0; k < n; ++k) {
        const double* inc = row(k);
        const double* prev = values.data() + static_cast<std::size_t>(k) * m;
        double* next = values.data() + static_cast<std::size_t>(k + 1) * m;
        for (int j = 0; j < m; ++j) next[j] = prev[j] + inc[j];
    }
    return PiecewiseLinearPath(std::move(knots), std::move(values), m);
}

}  // namespace sfde
