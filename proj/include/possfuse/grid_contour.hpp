#pragma once

// Parameter grids, grid-sampled possibility contours and their alpha-cuts.
//
// A contour is only ever known at the grid points the caller supplies, so
// "sup" means the maximum over the grid. Under-resolving a peak makes the
// grid supremum too small, and dividing by it can only inflate a normalized
// contour; that direction never costs validity. Refining the grid is the
// caller's job.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace possfuse {

class ParameterGrid {
public:
    // Throws ValidationError unless M >= 2, all finite, strictly increasing.
    static ParameterGrid make(std::vector<double> points);
    // start, start+step, ... up to and including stop (within step/1e6).
    static ParameterGrid from_range(double start, double stop, double step);

    std::span<const double> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

    // Index of the grid point closest to theta (ties go to the lower index).
    std::size_t nearest(double theta) const;

    friend bool operator==(const ParameterGrid&, const ParameterGrid&) = default;

private:
    explicit ParameterGrid(std::vector<double> p) : points_(std::move(p)) {}
    std::vector<double> points_;
};

using GridPtr = std::shared_ptr<const ParameterGrid>;

inline GridPtr share(ParameterGrid g) { return std::make_shared<const ParameterGrid>(std::move(g)); }

// Values must lie in [0,1]; anything within 1e-12 outside is clamped.
inline constexpr double kValueTolerance = 1e-12;

class Contour {
public:
    Contour(GridPtr grid, std::vector<double> values);

    const ParameterGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double sup() const { return sup_; }
    std::size_t argmax() const { return argmax_; }
    // max over the grid is exactly 1.0
    bool normalized() const { return sup_ == 1.0; }

private:
    GridPtr grid_;
    std::vector<double> values_;
    double sup_ = 0.0;
    std::size_t argmax_ = 0;
};

// Validating constructor (same rules as Contour's constructor).
Contour make_contour(const GridPtr& grid, std::vector<double> values);
Contour make_contour(const ParameterGrid& grid, std::vector<double> values);

inline double sup(const Contour& c) { return c.sup(); }

class ContourSet {
public:
    // K >= 2 members sharing one grid (compared by value).
    explicit ContourSet(std::vector<Contour> members);

    const ParameterGrid& grid() const { return members_.front().grid(); }
    const GridPtr& grid_ptr() const { return members_.front().grid_ptr(); }
    std::size_t K() const { return members_.size(); }
    std::size_t M() const { return grid().size(); }
    const Contour& operator[](std::size_t k) const { return members_[k]; }
    std::span<const Contour> members() const { return members_; }

    // Member values at grid index i, in member order.
    std::vector<double> column(std::size_t i) const;

    ContourSet permuted(std::span<const std::size_t> order) const;

private:
    std::vector<Contour> members_;
};

struct Segment {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

struct AlphaCut {
    double alpha = 0.0;
    std::vector<Segment> segments;
    double measure = 0.0;
};

enum class CutMode {
    // endpoints moved to the linear-interpolated crossing of alpha
    interpolate,
    // endpoints are the outermost grid points of each run; no interpolation
    grid_points,
};

// {theta : contour(theta) > alpha}, strict inequality. alpha in [0,1].
AlphaCut alpha_cut(const Contour& contour, double alpha, CutMode mode = CutMode::interpolate);

}  // namespace possfuse
