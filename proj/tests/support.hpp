#pragma once

// Shared helpers for the test binaries: hand-rolled generators and
// reference statistics.

#include "possfuse/grid_contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

using possfuse::Contour;
using possfuse::GridPtr;
using possfuse::ParameterGrid;

struct Gen {
    std::mt19937_64 eng;
    explicit Gen(std::uint64_t seed) : eng(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(eng);
    }

    // values in [0,1] with some exact 0s and 1s thrown in
    std::vector<double> unit_values(std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) {
            const double r = uniform();
            x = r < 0.05 ? 0.0 : (r < 0.1 ? 1.0 : uniform());
        }
        return v;
    }

    GridPtr grid(std::size_t M) {
        std::vector<double> p(M);
        double x = uniform(-5.0, 5.0);
        for (auto& v : p) {
            v = x;
            x += uniform(0.01, 1.0);
        }
        return possfuse::share(ParameterGrid::make(std::move(p)));
    }

    // a bump contour peaking at 1 somewhere on the grid
    Contour bump(const GridPtr& g) {
        const double c = uniform(g->front(), g->back());
        const double s = uniform(0.2, 3.0);
        std::vector<double> v(g->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-std::abs((*g)[i] - c) / s);
        v[g->nearest(c)] = 1.0;
        return Contour(g, std::move(v));
    }
};

// sup_t |F_n(t) - t| for a sample on [0,1]
inline double ks_uniform(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        d = std::max(d, std::max((i + 1) / n - v[i], v[i] - i / n));
    }
    return d;
}

inline double dkw(std::size_t B, double delta = 0.01) { return std::sqrt(std::log(2.0 / delta) / (2.0 * B)); }

}  // namespace testing
