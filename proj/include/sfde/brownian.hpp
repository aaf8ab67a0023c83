#pragma once

#include <cstdint>
#include <vector>

#include "sfde/path.hpp"

namespace sfde {

// Increments of an m-dimensional Wiener path on a uniform grid. Entry (k, j)
// is a pure function of (seed, stream, k, j) under the counter-based
// generator, so generation order and thread scheduling cannot change it.
struct BrownianSkeleton {
    TimeGrid grid;
    int dim_noise = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> increments;  // steps x m, row-major

    static BrownianSkeleton generate(int dim_noise, int n_steps, double horizon,
                                     std::uint64_t seed, std::uint64_t stream);

    int steps() const { return grid.n_steps(); }
    const double* row(int k) const {
        return increments.data() + static_cast<std::size_t>(k) * dim_noise;
    }

    // Coarse increment i = sum of fine increments r*i .. r*i+r-1, added in
    // ascending index order.
    BrownianSkeleton coarsen(int factor) const;

    // W as a piecewise-linear path on the grid, W(0) = 0, by ascending prefix
    // sums of the increments.
    PiecewiseLinearPath cumulative_path() const;
};

}  // namespace sfde
