#pragma once

// Pointwise fusion operators (the F in fuse-validify-normalize) and the
// prefix ("exchangeable") rankings built from them.

#include "possfuse/grid_contour.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace possfuse {

enum class OpKind { min, max, prod, lprod, avg, gavg, wavg };

std::string_view to_string(OpKind k);
// Accepts the CLI names min|max|prod|lprod|avg|gavg|wavg.
OpKind parse_op_kind(std::string_view name);
inline constexpr std::string_view kOpNames = "min|max|prod|lprod|avg|gavg|wavg";

class FusionOperator {
public:
    // Any kind except wavg.
    explicit FusionOperator(OpKind kind);
    // Weighted average; weights strictly positive and summing to 1 within 1e-12.
    static FusionOperator weighted(std::vector<double> weights);
    // Rescales positive weights to sum to one first.
    static FusionOperator weighted_proportional(std::vector<double> raw);

    OpKind kind() const { return kind_; }
    std::span<const double> weights() const { return weights_; }
    bool has_weights() const { return kind_ == OpKind::wavg; }

private:
    FusionOperator(OpKind kind, std::vector<double> weights) : kind_(kind), weights_(std::move(weights)) {}
    OpKind kind_;
    std::vector<double> weights_;
};

// f(values). K >= 1; values in [0,1]; result in [0,1].
//   min, max          extreme value
//   prod              product
//   lprod             max{0, sum - K + 1}
//   avg               arithmetic mean
//   gavg              exp(mean log); 0 if any value is 0
//   wavg              sum w_k v_k (clamped to <= 1 against weight rounding)
double fuse_pointwise(const FusionOperator& op, std::span<const double> values);

// Reference definition of the prefix ranking at one point:
// min over k = 1..K of f(v_1..v_k). wavg prefixes use the leading weights
// rescaled to sum to one. O(K^2); the grid-level routine below is faster.
double prefix_fuse_pointwise(const FusionOperator& op, std::span<const double> values);

// Pointwise fusion across the members of a set.
Contour fuse(const FusionOperator& op, const ContourSet& set);

// Prefix ranking across members in input order. For min, prod and lprod the
// prefix values are nonincreasing in k, so this returns fuse(op, set); for
// max they are nondecreasing, so it returns the first member.
Contour fuse_exchangeable(const FusionOperator& op, const ContourSet& set);

// Column-oriented forms used by the Monte Carlo code: columns[k][i] is
// member k at point i; all columns must have the same length.
std::vector<double> fuse_columns(const FusionOperator& op, std::span<const std::span<const double>> columns);
std::vector<double> fuse_exchangeable_columns(const FusionOperator& op,
                                              std::span<const std::span<const double>> columns);

}  // namespace possfuse
