#include "possfuse/grid_contour.hpp"

#include "possfuse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace possfuse {

ParameterGrid ParameterGrid::make(std::vector<double> points) {
    if (points.size() < 2) {
        throw ValidationError("parameter grid needs at least 2 points, got " + std::to_string(points.size()));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) {
            throw ValidationError("parameter grid point " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(points[i] > points[i - 1])) {
            throw ValidationError("parameter grid must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
    return ParameterGrid(std::move(points));
}

ParameterGrid ParameterGrid::from_range(double start, double stop, double step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || !(step > 0) || !(stop > start)) {
        throw ValidationError("grid range needs finite start < stop and step > 0");
    }
    const double span = (stop - start) / step;
    if (span > 1e8) {
        throw ValidationError("grid range would produce more than 1e8 points");
    }
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-6)) + 1;
    std::vector<double> p(n);
    // i*step rather than accumulation, so the 800th point is not 800 roundings off
    for (std::size_t i = 0; i < n; ++i) p[i] = start + static_cast<double>(i) * step;
    return make(std::move(p));
}

std::size_t ParameterGrid::nearest(double theta) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), theta);
    if (it == points_.begin()) return 0;
    if (it == points_.end()) return points_.size() - 1;
    const auto hi = static_cast<std::size_t>(it - points_.begin());
    return (theta - points_[hi - 1] <= points_[hi] - theta) ? hi - 1 : hi;
}

Contour::Contour(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw ValidationError("contour needs a grid");
    if (values_.size() != grid_->size()) {
        throw ValidationError("contour has " + std::to_string(values_.size()) + " values for a grid of " +
                              std::to_string(grid_->size()) + " points");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        double& v = values_[i];
        if (!std::isfinite(v)) {
            throw ValidationError("contour value at index " + std::to_string(i) + " is not finite");
        }
        if (v < -kValueTolerance || v > 1.0 + kValueTolerance) {
            throw ValidationError("contour value " + std::to_string(v) + " at index " + std::to_string(i) +
                                  " is outside [0,1]");
        }
        // also folds -0.0 into +0.0
        if (v <= 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
    }
    const auto it = std::max_element(values_.begin(), values_.end());
    sup_ = *it;
    argmax_ = static_cast<std::size_t>(it - values_.begin());
}

Contour make_contour(const GridPtr& grid, std::vector<double> values) { return Contour(grid, std::move(values)); }

Contour make_contour(const ParameterGrid& grid, std::vector<double> values) {
    return Contour(share(grid), std::move(values));
}

ContourSet::ContourSet(std::vector<Contour> members) : members_(std::move(members)) {
    if (members_.size() < 2) {
        throw ValidationError("a contour set needs K >= 2 members, got " + std::to_string(members_.size()));
    }
    const auto& g0 = members_.front().grid_ptr();
    for (std::size_t k = 1; k < members_.size(); ++k) {
        const auto& gk = members_[k].grid_ptr();
        if (gk != g0 && !(*gk == *g0)) {
            throw ValidationError("contour set member " + std::to_string(k + 1) + " uses a different grid");
        }
    }
}

std::vector<double> ContourSet::column(std::size_t i) const {
    std::vector<double> out(members_.size());
    for (std::size_t k = 0; k < members_.size(); ++k) out[k] = members_[k][i];
    return out;
}

ContourSet ContourSet::permuted(std::span<const std::size_t> order) const {
    if (order.size() != members_.size()) throw ValidationError("permutation length does not match K");
    std::vector<bool> seen(order.size(), false);
    std::vector<Contour> out;
    out.reserve(order.size());
    for (auto idx : order) {
        if (idx >= order.size() || seen[idx]) throw ValidationError("not a permutation of member indices");
        seen[idx] = true;
        out.push_back(members_[idx]);
    }
    return ContourSet(std::move(out));
}

AlphaCut alpha_cut(const Contour& contour, double alpha, CutMode mode) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("alpha must lie in [0,1]");
    }
    AlphaCut cut;
    cut.alpha = alpha;
    const auto theta = contour.grid().points();
    const auto v = contour.values();
    const std::size_t m = v.size();

    auto crossing = [&](std::size_t below, std::size_t above) {
        // v[below] <= alpha < v[above]
        const double frac = (alpha - v[below]) / (v[above] - v[below]);
        return theta[below] + frac * (theta[above] - theta[below]);
    };

    std::size_t i = 0;
    while (i < m) {
        if (!(v[i] > alpha)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < m && v[j + 1] > alpha) ++j;
        Segment s{theta[i], theta[j]};
        if (mode == CutMode::interpolate) {
            if (i > 0) s.lo = crossing(i - 1, i);
            if (j + 1 < m) s.hi = crossing(j + 1, j);
        }
        cut.segments.push_back(s);
        i = j + 1;
    }
    for (const auto& s : cut.segments) cut.measure += s.length();
    return cut;
}

}  // namespace possfuse
