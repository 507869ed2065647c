#include "possfuse/fusion_ops.hpp"

#include "possfuse/errors.hpp"
#include "possfuse/kernels/kernels.hpp"
#include "possfuse/kernels/scalar_ops.hpp"

#include <cmath>
#include <string>

namespace possfuse {

namespace ops = kernels::ops;

std::string_view to_string(OpKind k) {
    switch (k) {
        case OpKind::min: return "min";
        case OpKind::max: return "max";
        case OpKind::prod: return "prod";
        case OpKind::lprod: return "lprod";
        case OpKind::avg: return "avg";
        case OpKind::gavg: return "gavg";
        case OpKind::wavg: return "wavg";
    }
    return "?";
}

OpKind parse_op_kind(std::string_view name) {
    for (auto k : {OpKind::min, OpKind::max, OpKind::prod, OpKind::lprod, OpKind::avg, OpKind::gavg, OpKind::wavg}) {
        if (name == to_string(k)) return k;
    }
    throw ValidationError("unknown fusion operator '" + std::string(name) + "' (expected " + std::string(kOpNames) +
                          ")");
}

FusionOperator::FusionOperator(OpKind kind) : kind_(kind) {
    if (kind == OpKind::wavg) {
        throw ValidationError("wavg needs weights (use FusionOperator::weighted, or --weights on the CLI)");
    }
}

FusionOperator FusionOperator::weighted(std::vector<double> weights) {
    if (weights.empty()) throw ValidationError("wavg needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || !(w > 0.0)) throw ValidationError("wavg weights must be strictly positive");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw ValidationError("wavg weights must sum to 1 (within 1e-12); they sum to " + std::to_string(total));
    }
    return FusionOperator(OpKind::wavg, std::move(weights));
}

FusionOperator FusionOperator::weighted_proportional(std::vector<double> raw) {
    double total = 0.0;
    for (double w : raw) {
        if (!std::isfinite(w) || !(w > 0.0)) throw ValidationError("wavg weights must be strictly positive");
        total += w;
    }
    for (double& w : raw) w /= total;
    return weighted(std::move(raw));
}

namespace {

void check_values(std::span<const double> v) {
    if (v.empty()) throw ValidationError("fusion needs at least one value");
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("fusion inputs must lie in [0,1]");
    }
}

void check_weights(const FusionOperator& op, std::size_t K) {
    if (op.kind() == OpKind::wavg && op.weights().size() != K) {
        throw ValidationError("wavg has " + std::to_string(op.weights().size()) + " weights for " + std::to_string(K) +
                              " contours");
    }
}

double gavg_of(std::span<const double> v) {
    double logsum = 0.0;
    for (double x : v) {
        // limit convention: a single zero rules the point out
        if (x == 0.0) return 0.0;
        logsum += std::log(x);
    }
    return std::exp(logsum / static_cast<double>(v.size()));
}

double wavg_prefix(std::span<const double> v, std::span<const double> w) {
    // leading weights rescaled to one
    double s = w[0] * v[0];
    double wt = w[0];
    for (std::size_t k = 1; k < v.size(); ++k) {
        s += w[k] * v[k];
        wt += w[k];
    }
    return ops::min2(s / wt, 1.0);
}

double fuse_unchecked(const FusionOperator& op, std::span<const double> v) {
    const std::size_t K = v.size();
    switch (op.kind()) {
        case OpKind::min: {
            double m = v[0];
            for (std::size_t k = 1; k < K; ++k) m = ops::min2(v[k], m);
            return m;
        }
        case OpKind::max: {
            double m = v[0];
            for (std::size_t k = 1; k < K; ++k) m = ops::max2(v[k], m);
            return m;
        }
        case OpKind::prod: {
            double p = v[0];
            for (std::size_t k = 1; k < K; ++k) p *= v[k];
            return p;
        }
        case OpKind::lprod: {
            double s = v[0];
            for (std::size_t k = 1; k < K; ++k) s += v[k];
            return ops::lprod_finish(s, K);
        }
        case OpKind::avg: {
            double s = v[0];
            for (std::size_t k = 1; k < K; ++k) s += v[k];
            return s / static_cast<double>(K);
        }
        case OpKind::gavg: return gavg_of(v);
        case OpKind::wavg: {
            const auto w = op.weights();
            double s = w[0] * v[0];
            for (std::size_t k = 1; k < K; ++k) s += w[k] * v[k];
            return ops::min2(s, 1.0);
        }
    }
    return 0.0;
}

std::vector<double> fuse_cols_unchecked(const FusionOperator& op, std::span<const std::span<const double>> columns) {
    const std::size_t K = columns.size();
    const std::size_t n = columns.front().size();
    std::vector<const double*> ptrs(K);
    for (std::size_t k = 0; k < K; ++k) ptrs[k] = columns[k].data();
    std::vector<double> out(n);
    const auto& kt = kernels::active();
    switch (op.kind()) {
        case OpKind::min: kt.fuse_min(ptrs.data(), K, n, out.data()); break;
        case OpKind::max: kt.fuse_max(ptrs.data(), K, n, out.data()); break;
        case OpKind::prod: kt.fuse_prod(ptrs.data(), K, n, out.data()); break;
        case OpKind::lprod: kt.fuse_lprod(ptrs.data(), K, n, out.data()); break;
        case OpKind::avg: kt.fuse_avg(ptrs.data(), K, n, out.data()); break;
        case OpKind::wavg: kt.fuse_wavg(ptrs.data(), op.weights().data(), K, n, out.data()); break;
        case OpKind::gavg: {
            std::vector<double> col(K);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < K; ++k) col[k] = columns[k][i];
                out[i] = gavg_of(col);
            }
            break;
        }
    }
    return out;
}

void check_columns(const FusionOperator& op, std::span<const std::span<const double>> columns) {
    if (columns.empty()) throw ValidationError("fusion needs at least one column");
    const std::size_t n = columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != n) throw ValidationError("fusion columns differ in length");
        for (double x : c) {
            if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("fusion inputs must lie in [0,1]");
        }
    }
    check_weights(op, columns.size());
}

std::vector<std::span<const double>> member_columns(const ContourSet& set) {
    std::vector<std::span<const double>> cols;
    cols.reserve(set.K());
    for (const auto& c : set.members()) cols.push_back(c.values());
    return cols;
}

}  // namespace

double fuse_pointwise(const FusionOperator& op, std::span<const double> values) {
    check_values(values);
    check_weights(op, values.size());
    return fuse_unchecked(op, values);
}

double prefix_fuse_pointwise(const FusionOperator& op, std::span<const double> values) {
    check_values(values);
    check_weights(op, values.size());
    double best = 1.0;
    for (std::size_t k = 1; k <= values.size(); ++k) {
        const auto head = values.first(k);
        // the full-length wavg prefix is the operator itself (weights already sum to 1)
        const bool rescale = op.kind() == OpKind::wavg && k < values.size();
        const double g = rescale ? wavg_prefix(head, op.weights().first(k)) : fuse_unchecked(op, head);
        best = ops::min2(g, best);
    }
    return best;
}

std::vector<double> fuse_columns(const FusionOperator& op, std::span<const std::span<const double>> columns) {
    check_columns(op, columns);
    return fuse_cols_unchecked(op, columns);
}

std::vector<double> fuse_exchangeable_columns(const FusionOperator& op,
                                              std::span<const std::span<const double>> columns) {
    check_columns(op, columns);
    const std::size_t K = columns.size();
    const std::size_t n = columns.front().size();
    switch (op.kind()) {
        case OpKind::min:
        case OpKind::prod:
        case OpKind::lprod:
            // prefix values are nonincreasing in k; the full fusion is the minimum
            return fuse_cols_unchecked(op, columns);
        case OpKind::max:
            // prefix maxima are nondecreasing in k; the first prefix is the minimum
            return std::vector<double>(columns.front().begin(), columns.front().end());
        case OpKind::avg: {
            std::vector<const double*> ptrs(K);
            for (std::size_t k = 0; k < K; ++k) ptrs[k] = columns[k].data();
            std::vector<double> out(n);
            kernels::active().prefix_avg(ptrs.data(), K, n, out.data());
            return out;
        }
        case OpKind::gavg: {
            std::vector<double> out(n);
            for (std::size_t i = 0; i < n; ++i) {
                double logsum = 0.0;
                double best = 1.0;
                for (std::size_t k = 0; k < K; ++k) {
                    const double x = columns[k][i];
                    if (x == 0.0) {
                        best = 0.0;
                        break;
                    }
                    logsum += std::log(x);
                    best = ops::min2(std::exp(logsum / static_cast<double>(k + 1)), best);
                }
                out[i] = best;
            }
            return out;
        }
        case OpKind::wavg: {
            std::vector<double> out(n);
            std::vector<double> col(K);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < K; ++k) col[k] = columns[k][i];
                out[i] = prefix_fuse_pointwise(op, col);
            }
            return out;
        }
    }
    return {};
}

Contour fuse(const FusionOperator& op, const ContourSet& set) {
    const auto cols = member_columns(set);
    return Contour(set.grid_ptr(), fuse_columns(op, cols));
}

Contour fuse_exchangeable(const FusionOperator& op, const ContourSet& set) {
    const auto cols = member_columns(set);
    return Contour(set.grid_ptr(), fuse_exchangeable_columns(op, cols));
}

}  // namespace possfuse
