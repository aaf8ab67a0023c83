#pragma once

// Brute-force reference implementations for the exact path queries. They
// maximize over dense sample grids enriched with the knot times and the
// +-h shifted times, so the true optimizer (which sits on such points for
// piecewise-linear paths) is always sampled; no convexity reasoning is used.

#include <algorithm>
#include <cmath>
#include <vector>

#include "sfde/path.hpp"

namespace oracles {

inline double norm_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double dense_sup_shifted_norm_sq(const sfde::PathView& path, double a, double u1,
                                        double u2, int samples_per_segment) {
    const int d = path.dim();
    std::vector<double> buf(d);
    double best = -1.0;
    const auto consider = [&](double t) {
        if (t < u1 || t > u2) return;
        path.eval(t, buf);
        best = std::max(best, norm_sq(buf));
    };
    consider(u1);
    consider(u2);
    for (std::size_t i = 0; i + 1 < path.knot_count(); ++i) {
        const double t0 = std::max(path.knot_time(i), u1);
        const double t1 = std::min(path.knot_time(i + 1), u2);
        if (t0 > t1) continue;
        for (int k = 0; k <= samples_per_segment; ++k) {
            consider(t0 + (t1 - t0) * k / samples_per_segment);
        }
    }
    return a + best;
}

inline double dense_modulus(const sfde::PathView& path, double h, double u1, double u2,
                            int u_samples, int v_samples) {
    const int d = path.dim();
    std::vector<double> us;
    us.reserve(static_cast<std::size_t>(u_samples) + 4 * path.knot_count());
    for (int i = 0; i <= u_samples; ++i) us.push_back(u1 + (u2 - u1) * i / u_samples);
    for (std::size_t i = 0; i < path.knot_count(); ++i) {
        const double t = path.knot_time(i);
        for (double c : {t, t + h, t - h}) {
            if (c >= u1 && c <= u2) us.push_back(c);
        }
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());

    std::vector<double> xu(d), xv(d);
    double best = 0.0;
    for (double u : us) {
        path.eval(u, xu);
        const double lo = std::max(u1, u - h);
        const double hi = std::min(u2, u + h);
        const auto consider = [&](double v) {
            path.eval(v, xv);
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                const double e = xu[j] - xv[j];
                s += e * e;
            }
            best = std::max(best, s);
        };
        consider(lo);
        consider(hi);
        for (int k = 1; k < v_samples; ++k) consider(lo + (hi - lo) * k / v_samples);
        for (std::size_t i = 0; i < path.knot_count(); ++i) {
            const double t = path.knot_time(i);
            if (t >= lo && t <= hi) consider(t);
        }
    }
    return std::sqrt(best);
}

inline double dense_sup_diff(const sfde::PathView& p1, const sfde::PathView& p2, double u1,
                             double u2, int samples) {
    const int d = p1.dim();
    std::vector<double> a(d), b(d), ts;
    ts.reserve(static_cast<std::size_t>(samples) + p1.knot_count() + p2.knot_count() + 2);
    for (int i = 0; i <= samples; ++i) ts.push_back(u1 + (u2 - u1) * i / samples);
    for (std::size_t i = 0; i < p1.knot_count(); ++i) {
        const double t = p1.knot_time(i);
        if (t >= u1 && t <= u2) ts.push_back(t);
    }
    for (std::size_t i = 0; i < p2.knot_count(); ++i) {
        const double t = p2.knot_time(i);
        if (t >= u1 && t <= u2) ts.push_back(t);
    }
    double best = 0.0;
    for (double t : ts) {
        p1.eval(t, a);
        p2.eval(t, b);
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double e = a[j] - b[j];
            s += e * e;
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

}  // namespace oracles
