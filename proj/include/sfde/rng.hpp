#pragma once

#include <array>
#include <cstdint>

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter words), so ensembles can be scheduled across
// threads in any order without changing a single bit of output.
//
// Generator: Philox 4x64-10 (Salmon et al., SC'11). Key = (seed, stream),
// counter = (c0, c1, domain, 0). The domain word separates independent
// consumers (Brownian increments, bootstrap resampling, path sampling)
// that share one seed.
//
// Gaussian draws: u = ((word >> 12) + 0.5) * 2^-52, a uniform strictly
// inside (0,1) built from the top 52 bits (all arithmetic exact), mapped
// through the AS241 rational approximation of the standard normal quantile
// (Wichura 1988, PPND16). Single fixed algorithm, double precision over the
// full open unit interval.

namespace sfde::rng {

inline constexpr std::uint64_t kDomainBrownian = 0;
inline constexpr std::uint64_t kDomainBootstrap = 1;
inline constexpr std::uint64_t kDomainSamplePaths = 2;

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

// First output word for counter (c0, c1, domain, 0) under key (seed, stream).
std::uint64_t raw_word(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t c0, std::uint64_t c1, std::uint64_t domain);

// Maps a 64-bit word to (0,1); never returns 0 or 1.
double to_unit_open(std::uint64_t word);

// AS241 PPND16 normal quantile. Requires 0 < u < 1.
double inverse_normal_cdf(double u);

double standard_normal(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t c0, std::uint64_t c1, std::uint64_t domain);

// Maps a word to [0, n) by the multiply-shift method (bias ~ n/2^64).
std::uint64_t bounded(std::uint64_t word, std::uint64_t n);

}  // namespace sfde::rng
