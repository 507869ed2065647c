#pragma once

// Data-parallel inner loops behind fusion and linear validification.
//
// Every table computes bit-identical results: the SIMD variants perform the
// same IEEE operations in the same per-element order as the scalar
// reference (member 0 first, no fused multiply-add), only several grid
// points at a time. tests/test_kernels.cpp holds them to that.

#include <cstddef>
#include <span>
#include <string_view>

namespace possfuse::kernels {

// cols[k] points at member k's n values.
using Columns = const double* const*;

struct KernelTable {
    std::string_view name;
    void (*fuse_min)(Columns cols, std::size_t K, std::size_t n, double* out);
    void (*fuse_max)(Columns cols, std::size_t K, std::size_t n, double* out);
    void (*fuse_prod)(Columns cols, std::size_t K, std::size_t n, double* out);
    void (*fuse_lprod)(Columns cols, std::size_t K, std::size_t n, double* out);
    void (*fuse_avg)(Columns cols, std::size_t K, std::size_t n, double* out);
    void (*fuse_wavg)(Columns cols, const double* weights, std::size_t K, std::size_t n, double* out);
    // min over k of (sum_{i<=k} v_i) / k
    void (*prefix_avg)(Columns cols, std::size_t K, std::size_t n, double* out);
    // out[i] = min(1, c * in[i])
    void (*linear_bound)(double c, const double* in, std::size_t n, double* out);
};

const KernelTable& scalar_table();
// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

// AVX2 when both compiled in and supported by the running CPU, else scalar.
const KernelTable& active();

// Every table usable on this machine, scalar first.
std::span<const KernelTable* const> available();

}  // namespace possfuse::kernels
