// Compiled with -mavx2 and only entered after a runtime CPU check.

#include "possfuse/kernels/kernels.hpp"
#include "possfuse/kernels/scalar_ops.hpp"

#include <immintrin.h>

namespace possfuse::kernels {

namespace {

constexpr std::size_t kLanes = 4;

void fuse_min(Columns cols, std::size_t K, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d m = _mm256_loadu_pd(cols[0] + i);
        for (std::size_t k = 1; k < K; ++k) m = _mm256_min_pd(_mm256_loadu_pd(cols[k] + i), m);
        _mm256_storeu_pd(out + i, m);
    }
    for (; i < n; ++i) {
        double m = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) m = ops::min2(cols[k][i], m);
        out[i] = m;
    }
}

void fuse_max(Columns cols, std::size_t K, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d m = _mm256_loadu_pd(cols[0] + i);
        for (std::size_t k = 1; k < K; ++k) m = _mm256_max_pd(_mm256_loadu_pd(cols[k] + i), m);
        _mm256_storeu_pd(out + i, m);
    }
    for (; i < n; ++i) {
        double m = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) m = ops::max2(cols[k][i], m);
        out[i] = m;
    }
}

void fuse_prod(Columns cols, std::size_t K, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d p = _mm256_loadu_pd(cols[0] + i);
        for (std::size_t k = 1; k < K; ++k) p = _mm256_mul_pd(p, _mm256_loadu_pd(cols[k] + i));
        _mm256_storeu_pd(out + i, p);
    }
    for (; i < n; ++i) {
        double p = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) p *= cols[k][i];
        out[i] = p;
    }
}

inline __m256d column_sum(Columns cols, std::size_t K, std::size_t i) {
    __m256d s = _mm256_loadu_pd(cols[0] + i);
    for (std::size_t k = 1; k < K; ++k) s = _mm256_add_pd(s, _mm256_loadu_pd(cols[k] + i));
    return s;
}

void fuse_lprod(Columns cols, std::size_t K, std::size_t n, double* out) {
    const __m256d shift = _mm256_set1_pd(static_cast<double>(K - 1));
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d s = column_sum(cols, K, i);
        _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_sub_pd(s, shift), zero));
    }
    for (; i < n; ++i) {
        double s = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) s += cols[k][i];
        out[i] = ops::lprod_finish(s, K);
    }
}

void fuse_avg(Columns cols, std::size_t K, std::size_t n, double* out) {
    const double kd = static_cast<double>(K);
    const __m256d kv = _mm256_set1_pd(kd);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(out + i, _mm256_div_pd(column_sum(cols, K, i), kv));
    }
    for (; i < n; ++i) {
        double s = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) s += cols[k][i];
        out[i] = s / kd;
    }
}

void fuse_wavg(Columns cols, const double* w, std::size_t K, std::size_t n, double* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d s = _mm256_mul_pd(_mm256_set1_pd(w[0]), _mm256_loadu_pd(cols[0] + i));
        for (std::size_t k = 1; k < K; ++k) {
            s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(w[k]), _mm256_loadu_pd(cols[k] + i)));
        }
        _mm256_storeu_pd(out + i, _mm256_min_pd(s, one));
    }
    for (; i < n; ++i) {
        double s = w[0] * cols[0][i];
        for (std::size_t k = 1; k < K; ++k) s += w[k] * cols[k][i];
        out[i] = ops::min2(s, 1.0);
    }
}

void prefix_avg(Columns cols, std::size_t K, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d s = _mm256_loadu_pd(cols[0] + i);
        __m256d m = s;
        for (std::size_t k = 1; k < K; ++k) {
            s = _mm256_add_pd(s, _mm256_loadu_pd(cols[k] + i));
            m = _mm256_min_pd(_mm256_div_pd(s, _mm256_set1_pd(static_cast<double>(k + 1))), m);
        }
        _mm256_storeu_pd(out + i, m);
    }
    for (; i < n; ++i) {
        double s = cols[0][i];
        double m = s;
        for (std::size_t k = 1; k < K; ++k) {
            s += cols[k][i];
            m = ops::min2(s / static_cast<double>(k + 1), m);
        }
        out[i] = m;
    }
}

void linear_bound(double c, const double* in, std::size_t n, double* out) {
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_mul_pd(cv, _mm256_loadu_pd(in + i)), one));
    }
    for (; i < n; ++i) out[i] = ops::linear_bound(c, in[i]);
}

constexpr KernelTable kAvx2{
    "avx2", fuse_min, fuse_max, fuse_prod, fuse_lprod, fuse_avg, fuse_wavg, prefix_avg, linear_bound,
};

}  // namespace

const KernelTable& avx2_table_impl() { return kAvx2; }

}  // namespace possfuse::kernels
