#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sfde {

// Prefix maxima over the knot rows of a growing path. Lets full-domain
// supremum queries run in O(1) while the Euler stepper appends knots.
struct PathCache {
    int dim = 0;
    std::vector<double> coord_max;    // [i*dim + j]: max of coordinate j over rows 0..i
    std::vector<double> norm_sq_max;  // [i]: max squared row norm over rows 0..i

    void reset(int d);
    void append_row(std::span<const double> row);
    std::size_t rows() const { return norm_sq_max.size(); }
};

// Non-owning view of a continuous piecewise-linear path: strictly increasing
// knot times, one value row per knot, affine between knots. All supremum
// queries are exact for the piecewise-linear object: the norm is convex on
// each affine segment, so extrema sit on segment endpoints (or at the
// gap-constraint boundary for the modulus).
class PathView {
public:
    PathView() = default;
    PathView(std::span<const double> times, std::span<const double> values, int dim,
             const PathCache* cache = nullptr);

    int dim() const { return dim_; }
    std::size_t knot_count() const { return times_.size(); }
    double front_time() const { return times_.front(); }
    double back_time() const { return times_.back(); }
    double knot_time(std::size_t i) const { return times_[i]; }
    std::span<const double> knot_values(std::size_t i) const {
        return values_.subspan(i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
    }
    std::span<const double> back_values() const { return knot_values(times_.size() - 1); }
    std::span<const double> times() const { return times_; }
    std::span<const double> values() const { return values_; }

    // Exact at knots, affine strictly between them; OutOfDomain outside.
    void eval(double t, std::span<double> out) const;
    double eval_scalar(double t) const;  // dim must be 1

    // sup over s in [u1,u2] of (a + ||x(s)||^2).
    double sup_shifted_norm_sq(double a, double u1, double u2) const;

    // sup over s in [u1,u2] of coordinate j (signed running maximum).
    double max_coordinate(int j, double u1, double u2) const;

    // sup over u,v in [u1,u2], |u-v| <= h, of ||x(u)-x(v)||. Candidate-set
    // algorithm, O(k^2) in the knot count worst case (k up to ~2^14 is the
    // intended scale).
    double modulus(double h, double u1, double u2) const;

private:
    std::span<const double> times_;
    std::span<const double> values_;
    int dim_ = 0;
    const PathCache* cache_ = nullptr;

    std::size_t segment_left_of(double t) const;
    void check_interval(double u1, double u2) const;
    void eval_unchecked(double t, double* out) const;
};

class PiecewiseLinearPath {
public:
    PiecewiseLinearPath() = default;
    // values is row-major, knots.size()*dim entries. Knots must be strictly
    // increasing; duplicates are a construction error (no epsilon merging).
    PiecewiseLinearPath(std::vector<double> knots, std::vector<double> values, int dim);

    static PiecewiseLinearPath constant(double t0, double t1, std::span<const double> value);
    static PiecewiseLinearPath single_point(double t, std::span<const double> value);

    PathView view() const { return PathView(knots_, values_, dim_); }
    int dim() const { return dim_; }
    std::size_t knot_count() const { return knots_.size(); }
    double front_time() const { return knots_.front(); }
    double back_time() const { return knots_.back(); }
    std::span<const double> knots() const { return knots_; }
    std::span<const double> values() const { return values_; }

    void eval(double t, std::span<double> out) const { view().eval(t, out); }
    double eval_scalar(double t) const { return view().eval_scalar(t); }
    double sup_shifted_norm_sq(double a, double u1, double u2) const {
        return view().sup_shifted_norm_sq(a, u1, u2);
    }
    double max_coordinate(int j, double u1, double u2) const {
        return view().max_coordinate(j, u1, u2);
    }
    double modulus(double h, double u1, double u2) const { return view().modulus(h, u1, u2); }

    bool operator==(const PiecewiseLinearPath&) const = default;

    // Header "t,x_1,...,x_d", one row per knot, 17 significant digits
    // (full binary round-trip).
    void to_csv(std::ostream& os) const;
    static PiecewiseLinearPath from_csv(std::istream& is);

private:
    std::vector<double> knots_;
    std::vector<double> values_;
    int dim_ = 0;
};

// sup over s in [u1,u2] of ||p1(s) - p2(s)||, exact over the union of knot
// sets (the difference of piecewise-affine paths is piecewise-affine).
double sup_norm_diff(const PathView& p1, const PathView& p2, double u1, double u2);

// Materializes the restriction of a path to [t_lo, t_hi]; the ends become
// knots carrying the interpolated values.
PiecewiseLinearPath truncate_path(const PathView& p, double t_lo, double t_hi);

// Partition 0 = t_0 < t_1 < ... < t_n = T.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> points);

    // t_k computed as k*T/n (single multiplication, then division); the final
    // point is pinned to T exactly, a no-op whenever n is a power of two.
    static TimeGrid uniform(int n_steps, double horizon);

    int n_steps() const { return static_cast<int>(points_.size()) - 1; }
    double horizon() const { return points_.back(); }
    double operator[](std::size_t k) const { return points_[k]; }
    std::span<const double> points() const { return points_; }
    double mesh() const;

    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> points_;
};

}  // namespace sfde
