#include "possfuse/fvn.hpp"

#include "possfuse/csv_io.hpp"
#include "possfuse/errors.hpp"

namespace possfuse {

Contour normalize(const Contour& contour) {
    const double s = contour.sup();
    if (!(s > 0.0)) throw ValidationError("degenerate ranking; normalization undefined (all values are 0)");
    std::vector<double> out(contour.size());
    const auto v = contour.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = v[i] / s;
        out[i] = x > 1.0 ? 1.0 : x;
    }
    out[contour.argmax()] = 1.0;
    return Contour(contour.grid_ptr(), std::move(out));
}

FusedResult finish(Ranking ranking, const ValidificationRule& rule) {
    auto validified = apply_rule(rule, ranking);
    auto normalized = normalize(validified);
    auto warnings = rule.warnings();
    return FusedResult{std::move(ranking), std::move(validified), std::move(normalized), rule, std::move(warnings)};
}

FusedResult fvn_with_rule(const ContourSet& set, const FusionOperator& op, const ValidificationRule& rule) {
    return finish(rank(op, set, rule.mode()), rule);
}

FusedResult fvn(const ContourSet& set, const FusionOperator& op, Regime regime, Method method, const McOptions& mc) {
    const auto rule = resolve_rule(op, set.K(), regime, method, mc);
    const auto mode = regime == Regime::exchangeable ? FusionMode::prefix : FusionMode::plain;
    if (rule.mode() != mode) {
        throw ValidationError("rule " + rule.describe() + " expects a " + std::string(to_string(rule.mode())) +
                              " ranking, but regime " + std::string(to_string(regime)) + " fuses with " +
                              std::string(to_string(mode)));
    }
    return finish(rank(op, set, mode), rule);
}

std::string format_fused_csv(const FusedResult& r, const std::vector<std::string>& comments) {
    csv::Table t;
    t.comments = comments;
    t.header = {"theta", "ranking", "validified", "normalized"};
    const auto th = r.normalized.grid().points();
    t.columns = {std::vector<double>(th.begin(), th.end()),
                 std::vector<double>(r.ranking.contour.values().begin(), r.ranking.contour.values().end()),
                 std::vector<double>(r.validified.values().begin(), r.validified.values().end()),
                 std::vector<double>(r.normalized.values().begin(), r.normalized.values().end())};
    return csv::format(t);
}

}  // namespace possfuse
