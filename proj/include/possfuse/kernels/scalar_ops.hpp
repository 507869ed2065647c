#pragma once

// Single-element definitions shared by fuse_pointwise and the scalar kernel
// table. The comparisons are written in the exact form of _mm256_min_pd /
// _mm256_max_pd, (a < b ? a : b) and (a > b ? a : b), so the two paths agree
// on every input including signed zeros.
//
// Internal linkage on purpose: avx2.cpp is built with -mavx2, and a shared
// inline definition could let the linker hand AVX2 code to scalar callers.

#include <cstddef>

namespace possfuse::kernels::ops {
namespace {

inline double min2(double a, double b) { return a < b ? a : b; }
inline double max2(double a, double b) { return a > b ? a : b; }

inline double lprod_finish(double sum, std::size_t K) { return max2(sum - static_cast<double>(K - 1), 0.0); }

inline double linear_bound(double c, double t) { return min2(c * t, 1.0); }

}  // namespace
}  // namespace possfuse::kernels::ops
