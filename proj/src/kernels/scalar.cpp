#include "possfuse/kernels/kernels.hpp"
#include "possfuse/kernels/scalar_ops.hpp"

namespace possfuse::kernels {

namespace {

void fuse_min(Columns cols, std::size_t K, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double m = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) m = ops::min2(cols[k][i], m);
        out[i] = m;
    }
}

void fuse_max(Columns cols, std::size_t K, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double m = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) m = ops::max2(cols[k][i], m);
        out[i] = m;
    }
}

void fuse_prod(Columns cols, std::size_t K, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double p = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) p *= cols[k][i];
        out[i] = p;
    }
}

void fuse_lprod(Columns cols, std::size_t K, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) s += cols[k][i];
        out[i] = ops::lprod_finish(s, K);
    }
}

void fuse_avg(Columns cols, std::size_t K, std::size_t n, double* out) {
    const double kd = static_cast<double>(K);
    for (std::size_t i = 0; i < n; ++i) {
        double s = cols[0][i];
        for (std::size_t k = 1; k < K; ++k) s += cols[k][i];
        out[i] = s / kd;
    }
}

void fuse_wavg(Columns cols, const double* w, std::size_t K, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = w[0] * cols[0][i];
        for (std::size_t k = 1; k < K; ++k) s += w[k] * cols[k][i];
        out[i] = ops::min2(s, 1.0);
    }
}

void prefix_avg(Columns cols, std::size_t K, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
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
    for (std::size_t i = 0; i < n; ++i) out[i] = ops::linear_bound(c, in[i]);
}

constexpr KernelTable kScalar{
    "scalar", fuse_min, fuse_max, fuse_prod, fuse_lprod, fuse_avg, fuse_wavg, prefix_avg, linear_bound,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace possfuse::kernels
