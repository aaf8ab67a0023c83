#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sfde {

// Ordinary least squares of y on x; reproducible from the stored pairs.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    std::vector<std::array<double, 2>> points;  // (log2 n, log2 error)

    double rate() const { return -slope; }
};

RateFit fit_ols(std::span<const std::array<double, 2>> points);

// (mean of x_i^q)^(1/q); exact passthrough for zero-variance samples.
double q_norm_from_powers(std::span<const double> qth_powers, double q);
double q_norm(std::span<const double> values, double q);

struct BootstrapCI {
    double lo = 0.0;
    double hi = 0.0;
};

// Seeded nonparametric bootstrap of the q-norm: resamples the qth powers
// with replacement, B times, and returns the 2.5% / 97.5% percentiles
// (nearest-rank on the sorted resample statistics). Deterministic in
// (seed, stream_tag).
BootstrapCI bootstrap_qnorm_ci(std::span<const double> qth_powers, double q, int resamples,
                               std::uint64_t seed, std::uint64_t stream_tag);

double sample_mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);  // n-1 normalization

}  // namespace sfde
