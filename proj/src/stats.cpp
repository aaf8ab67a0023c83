#include "sfde/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sfde/errors.hpp"
#include "sfde/rng.hpp"

namespace sfde {

RateFit fit_ols(std::span<const std::array<double, 2>> points) {
    if (points.size() < 2) throw InvalidParameterError("fit_ols: need at least two points");
    RateFit fit;
    fit.points.assign(points.begin(), points.end());
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p[0];
        my += p[1];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = p[0] - mx;
        const double dy = p[1] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InvalidParameterError("fit_ols: degenerate abscissae");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (const auto& p : points) {
        const double r = p[1] - (fit.intercept + fit.slope * p[0]);
        sse += r * r;
    }
    fit.r_squared = (syy == 0.0) ? 1.0 : 1.0 - sse / syy;
    const double dof = n - 2.0;
    fit.slope_stderr = (dof > 0.0) ? std::sqrt(std::max(sse, 0.0) / dof / sxx) : 0.0;
    return fit;
}

double q_norm_from_powers(std::span<const double> qth_powers, double q) {
    if (qth_powers.empty()) throw InvalidParameterError("q_norm: empty sample");
    if (!(q >= 1.0)) throw InvalidParameterError("q_norm: q must be >= 1");
    bool constant = true;
    for (double v : qth_powers) constant = constant && (v == qth_powers[0]);
    if (constant) return std::pow(qth_powers[0], 1.0 / q);
    double mean = 0.0;
    for (double v : qth_powers) mean += v;
    mean /= static_cast<double>(qth_powers.size());
    return std::pow(mean, 1.0 / q);
}

double q_norm(std::span<const double> values, double q) {
    if (values.empty()) throw InvalidParameterError("q_norm: empty sample");
    if (!(q >= 1.0)) throw InvalidParameterError("q_norm: q must be >= 1");
    bool constant = true;
    for (double v : values) constant = constant && (v == values[0]);
    if (constant) return values[0];  // exact for degenerate samples
    double mean = 0.0;
    for (double v : values) mean += std::pow(v, q);
    mean /= static_cast<double>(values.size());
    return std::pow(mean, 1.0 / q);
}

BootstrapCI bootstrap_qnorm_ci(std::span<const double> qth_powers, double q, int resamples,
                               std::uint64_t seed, std::uint64_t stream_tag) {
    if (qth_powers.empty()) throw InvalidParameterError("bootstrap: empty sample");
    if (resamples < 1) throw InvalidParameterError("bootstrap: resamples must be >= 1");
    const std::uint64_t m = qth_powers.size();
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double acc = 0.0;
        for (std::uint64_t j = 0; j < m; ++j) {
            const std::uint64_t word =
                rng::raw_word(seed, stream_tag, static_cast<std::uint64_t>(b), j,
                              rng::kDomainBootstrap);
            acc += qth_powers[rng::bounded(word, m)];
        }
        stats[static_cast<std::size_t>(b)] = std::pow(acc / static_cast<double>(m), 1.0 / q);
    }
    std::sort(stats.begin(), stats.end());
    const auto rank = [&](double level) {
        const double idx = level * static_cast<double>(resamples - 1);
        return stats[static_cast<std::size_t>(std::llround(idx))];
    };
    return {rank(0.025), rank(0.975)};
}

double sample_mean(std::span<const double> values) {
    if (values.empty()) throw InvalidParameterError("sample_mean: empty sample");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = sample_mean(values);
    double s = 0.0;
    for (double v : values) {
        const double d = v - m;
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(values.size() - 1));
}

}  // namespace sfde
