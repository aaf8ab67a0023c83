#include "sfde/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "sfde/errors.hpp"

namespace sfde {

namespace {

double norm_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double norm_sq_diff(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double e = a[i] - b[i];
        s += e * e;
    }
    return s;
}

void format17(std::string& out, double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

}  // namespace

void PathCache::reset(int d) {
    dim = d;
    coord_max.clear();
    norm_sq_max.clear();
}

void PathCache::append_row(std::span<const double> row) {
    const std::size_t i = norm_sq_max.size();
    if (i == 0) {
        coord_max.assign(row.begin(), row.end());
        norm_sq_max.push_back(norm_sq(row));
        return;
    }
    const std::size_t base = (i - 1) * static_cast<std::size_t>(dim);
    for (int j = 0; j < dim; ++j) {
        coord_max.push_back(std::max(coord_max[base + j], row[j]));
    }
    norm_sq_max.push_back(std::max(norm_sq_max.back(), norm_sq(row)));
}

PathView::PathView(std::span<const double> times, std::span<const double> values, int dim,
                   const PathCache* cache)
    : times_(times), values_(values), dim_(dim), cache_(cache) {
    if (dim < 1 || times.empty() || values.size() != times.size() * static_cast<std::size_t>(dim)) {
        throw InvalidParameterError("PathView: inconsistent knot/value sizes");
    }
}

std::size_t PathView::segment_left_of(double t) const {
    // Largest i with times_[i] <= t; callers guarantee t is in-domain.
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

void PathView::eval_unchecked(double t, double* out) const {
    const std::size_t i = segment_left_of(t);
    const double* v0 = values_.data() + i * static_cast<std::size_t>(dim_);
    if (t == times_[i] || i + 1 == times_.size()) {
        std::copy(v0, v0 + dim_, out);
        return;
    }
    const double t0 = times_[i], t1 = times_[i + 1];
    const double w = (t - t0) / (t1 - t0);
    const double* v1 = v0 + dim_;
    for (int j = 0; j < dim_; ++j) out[j] = v0[j] + w * (v1[j] - v0[j]);
}

void PathView::eval(double t, std::span<double> out) const {
    if (t < front_time() || t > back_time()) {
        throw OutOfDomainError("path eval: t outside [" + std::to_string(front_time()) + ", " +
                               std::to_string(back_time()) + "]");
    }
    if (out.size() != static_cast<std::size_t>(dim_)) {
        throw DimensionMismatchError("path eval: output size != dim");
    }
    eval_unchecked(t, out.data());
}

double PathView::eval_scalar(double t) const {
    if (dim_ != 1) throw DimensionMismatchError("eval_scalar requires dim == 1");
    double v;
    eval(t, std::span<double>(&v, 1));
    return v;
}

void PathView::check_interval(double u1, double u2) const {
    if (!(u1 <= u2) || u1 < front_time() || u2 > back_time()) {
        throw OutOfDomainError("path query: interval outside path domain");
    }
}

double PathView::sup_shifted_norm_sq(double a, double u1, double u2) const {
    if (!(a >= 0.0)) throw InvalidParameterError("sup_shifted_norm_sq: a must be >= 0");
    check_interval(u1, u2);
    if (cache_ && cache_->rows() >= times_.size() && u1 == front_time() && u2 == back_time()) {
        return a + cache_->norm_sq_max[times_.size() - 1];
    }
    double buf[8];
    std::vector<double> heap;
    double* tmp = (dim_ <= 8) ? buf : (heap.resize(dim_), heap.data());
    eval_unchecked(u1, tmp);
    double m = norm_sq(std::span<const double>(tmp, dim_));
    eval_unchecked(u2, tmp);
    m = std::max(m, norm_sq(std::span<const double>(tmp, dim_)));
    const auto lo = std::upper_bound(times_.begin(), times_.end(), u1);
    const auto hi = std::lower_bound(times_.begin(), times_.end(), u2);
    for (auto it = lo; it < hi; ++it) {
        const std::size_t i = static_cast<std::size_t>(it - times_.begin());
        m = std::max(m, norm_sq(knot_values(i)));
    }
    return a + m;
}

double PathView::max_coordinate(int j, double u1, double u2) const {
    if (j < 0 || j >= dim_) throw DimensionMismatchError("max_coordinate: bad coordinate");
    check_interval(u1, u2);
    if (cache_ && cache_->rows() >= times_.size() && u1 == front_time() && u2 == back_time()) {
        return cache_->coord_max[(times_.size() - 1) * static_cast<std::size_t>(dim_) + j];
    }
    double buf[8];
    std::vector<double> heap;
    double* tmp = (dim_ <= 8) ? buf : (heap.resize(dim_), heap.data());
    eval_unchecked(u1, tmp);
    double m = tmp[j];
    eval_unchecked(u2, tmp);
    m = std::max(m, tmp[j]);
    const auto lo = std::upper_bound(times_.begin(), times_.end(), u1);
    const auto hi = std::lower_bound(times_.begin(), times_.end(), u2);
    for (auto it = lo; it < hi; ++it) {
        const std::size_t i = static_cast<std::size_t>(it - times_.begin());
        m = std::max(m, knot_values(i)[j]);
    }
    return m;
}

double PathView::modulus(double h, double u1, double u2) const {
    if (!(h > 0.0)) throw InvalidParameterError("modulus: h must be > 0");
    check_interval(u1, u2);
    if (u1 == u2) return 0.0;

    // Candidate times: interval ends, interior knots, and knots +- h clamped
    // into the interval. For fixed u the map v -> ||x(u)-x(v)|| is convex on
    // each linear piece, so the supremum is attained with both points in this
    // set or with one point at distance exactly h from a candidate; the
    // explicit clamped partner evaluation below covers the latter.
    std::vector<double> cand;
    cand.reserve(2 * times_.size() + 4);
    cand.push_back(u1);
    cand.push_back(u2);
    for (double t : times_) {
        if (t > u1 && t < u2) cand.push_back(t);
        const double tp = t + h;
        if (tp > u1 && tp < u2) cand.push_back(tp);
        const double tm = t - h;
        if (tm > u1 && tm < u2) cand.push_back(tm);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    const std::size_t nc = cand.size();
    const int d = dim_;
    std::vector<double> vals(nc * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < nc; ++i) {
        eval_unchecked(cand[i], vals.data() + i * static_cast<std::size_t>(d));
    }

    double best = 0.0;
    std::vector<double> partner(d);
    for (std::size_t i = 0; i < nc; ++i) {
        for (std::size_t j = i + 1; j < nc && cand[j] - cand[i] <= h; ++j) {
            best = std::max(best, norm_sq_diff(vals.data() + i * d, vals.data() + j * d, d));
        }
        // Partner at distance exactly h (clamped), evaluated fresh so no
        // floating-point drift in the candidate list can exclude it.
        const double vp = std::min(cand[i] + h, u2);
        eval_unchecked(vp, partner.data());
        best = std::max(best, norm_sq_diff(vals.data() + i * d, partner.data(), d));
        const double vm = std::max(cand[i] - h, u1);
        eval_unchecked(vm, partner.data());
        best = std::max(best, norm_sq_diff(vals.data() + i * d, partner.data(), d));
    }
    return std::sqrt(best);
}

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> knots, std::vector<double> values,
                                         int dim)
    : knots_(std::move(knots)), values_(std::move(values)), dim_(dim) {
    if (dim_ < 1) throw InvalidParameterError("path: dim must be >= 1");
    if (knots_.empty()) throw InvalidParameterError("path: needs at least one knot");
    if (values_.size() != knots_.size() * static_cast<std::size_t>(dim_)) {
        throw InvalidParameterError("path: values size must be knots*dim");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i] > knots_[i - 1])) {
            throw InvalidParameterError("path: knot times must be strictly increasing");
        }
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidParameterError("path: values must be finite");
    }
}

PiecewiseLinearPath PiecewiseLinearPath::constant(double t0, double t1,
                                                  std::span<const double> value) {
    const int d = static_cast<int>(value.size());
    if (t0 == t1) return single_point(t0, value);
    std::vector<double> vals(value.begin(), value.end());
    vals.insert(vals.end(), value.begin(), value.end());
    return PiecewiseLinearPath({t0, t1}, std::move(vals), d);
}

PiecewiseLinearPath PiecewiseLinearPath::single_point(double t, std::span<const double> value) {
    return PiecewiseLinearPath({t}, std::vector<double>(value.begin(), value.end()),
                               static_cast<int>(value.size()));
}

void PiecewiseLinearPath::to_csv(std::ostream& os) const {
    std::string line = "t";
    for (int j = 1; j <= dim_; ++j) line += ",x_" + std::to_string(j);
    line += "\n";
    os << line;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        line.clear();
        format17(line, knots_[i]);
        for (int j = 0; j < dim_; ++j) {
            line += ',';
            format17(line, values_[i * static_cast<std::size_t>(dim_) + j]);
        }
        line += '\n';
        os << line;
    }
}

PiecewiseLinearPath PiecewiseLinearPath::from_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw InvalidParameterError("path csv: empty input");
    int d = 0;
    {
        std::stringstream hs(header);
        std::string col;
        bool first = true;
        while (std::getline(hs, col, ',')) {
            if (first) {
                if (col != "t") throw InvalidParameterError("path csv: first column must be t");
                first = false;
            } else {
                ++d;
            }
        }
    }
    if (d < 1) throw InvalidParameterError("path csv: no value columns");
    std::vector<double> knots, values;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            const double x = std::stod(cell);
            if (col == 0) {
                knots.push_back(x);
            } else {
                values.push_back(x);
            }
            ++col;
        }
        if (col != d + 1) throw InvalidParameterError("path csv: ragged row");
    }
    return PiecewiseLinearPath(std::move(knots), std::move(values), d);
}

double sup_norm_diff(const PathView& p1, const PathView& p2, double u1, double u2) {
    if (p1.dim() != p2.dim()) throw DimensionMismatchError("sup_norm_diff: dim mismatch");
    if (!(u1 <= u2) || u1 < p1.front_time() || u2 > p1.back_time() || u1 < p2.front_time() ||
        u2 > p2.back_time()) {
        throw OutOfDomainError("sup_norm_diff: interval not covered by both paths");
    }
    const int d = p1.dim();
    std::vector<double> cand;
    cand.reserve(p1.knot_count() + p2.knot_count() + 2);
    cand.push_back(u1);
    cand.push_back(u2);
    for (double t : p1.times()) {
        if (t > u1 && t < u2) cand.push_back(t);
    }
    for (double t : p2.times()) {
        if (t > u1 && t < u2) cand.push_back(t);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<double> a(d), b(d);
    double best = 0.0;
    for (double t : cand) {
        p1.eval(t, a);
        p2.eval(t, b);
        best = std::max(best, norm_sq_diff(a.data(), b.data(), d));
    }
    return std::sqrt(best);
}

PiecewiseLinearPath truncate_path(const PathView& p, double t_lo, double t_hi) {
    if (!(t_lo <= t_hi) || t_lo < p.front_time() || t_hi > p.back_time()) {
        throw OutOfDomainError("truncate_path: target interval outside domain");
    }
    const int d = p.dim();
    std::vector<double> knots, values;
    std::vector<double> tmp(d);
    if (p.front_time() < t_lo) {
        knots.push_back(t_lo);
        p.eval(t_lo, tmp);
        values.insert(values.end(), tmp.begin(), tmp.end());
    }
    for (std::size_t i = 0; i < p.knot_count(); ++i) {
        const double t = p.knot_time(i);
        if (t >= t_lo && t <= t_hi) {
            knots.push_back(t);
            const auto row = p.knot_values(i);
            values.insert(values.end(), row.begin(), row.end());
        }
    }
    if (knots.empty() || knots.back() < t_hi) {
        knots.push_back(t_hi);
        p.eval(t_hi, tmp);
        values.insert(values.end(), tmp.begin(), tmp.end());
    }
    return PiecewiseLinearPath(std::move(knots), std::move(values), d);
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw InvalidParameterError("TimeGrid: needs at least two points");
    if (points_.front() != 0.0) throw InvalidParameterError("TimeGrid: must start at 0");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i] > points_[i - 1])) {
            throw InvalidParameterError("TimeGrid: points must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::uniform(int n_steps, double horizon) {
    if (n_steps < 1) throw InvalidParameterError("TimeGrid::uniform: n must be >= 1");
    if (!(horizon > 0.0)) throw InvalidParameterError("TimeGrid::uniform: horizon must be > 0");
    std::vector<double> pts(static_cast<std::size_t>(n_steps) + 1);
    const double n = static_cast<double>(n_steps);
    for (int k = 0; k <= n_steps; ++k) {
        pts[static_cast<std::size_t>(k)] = (static_cast<double>(k) * horizon) / n;
    }
    pts.back() = horizon;
    return TimeGrid(std::move(pts));
}

double TimeGrid::mesh() const {
    double m = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        m = std::max(m, points_[i] - points_[i - 1]);
    }
    return m;
}

}  // namespace sfde
