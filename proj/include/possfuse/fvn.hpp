#pragma once

// The fuse-validify-normalize pipeline.

#include "possfuse/fusion_ops.hpp"
#include "possfuse/grid_contour.hpp"
#include "possfuse/validify.hpp"

#include <string>
#include <vector>

namespace possfuse {

// Divides by the grid supremum and writes 1.0 at the argmax so the result is
// normalized bit for bit. Throws "degenerate ranking; normalization
// undefined" for an all-zero contour.
Contour normalize(const Contour& contour);

struct FusedResult {
    Ranking ranking;
    Contour validified;
    Contour normalized;
    ValidificationRule rule;
    std::vector<Warning> warnings;
};

// ranking from fuse (fuse_exchangeable under exchangeability), validified with
// the resolved rule, then normalized.
FusedResult fvn(const ContourSet& set, const FusionOperator& op, Regime regime, Method method,
                const McOptions& mc = {});

// Same, but with a caller-built rule (its tags must match op, K and mode).
FusedResult fvn_with_rule(const ContourSet& set, const FusionOperator& op, const ValidificationRule& rule);

// Validifies and normalizes an existing ranking.
FusedResult finish(Ranking ranking, const ValidificationRule& rule);

// theta,ranking,validified,normalized with the given comment lines on top.
std::string format_fused_csv(const FusedResult& r, const std::vector<std::string>& comments);

}  // namespace possfuse
