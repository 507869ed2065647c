#pragma once

// Validification: monotone maps t -> h(t) that turn a fused ranking into a
// quantity that is stochastically no smaller than Unif(0,1) at the true
// parameter.
//
//   exact     the iid distribution function of the fused value (independence)
//   bound     min{1, h(t)} for an upper bound h on that distribution function
//             valid under the assumed dependence (several bounds may be combined
//             by pointwise minimum; each dominates, so the minimum does too)
//   mc        conservative empirical CDF (1 + #{sample <= t}) / (B + 1) of a
//             Monte Carlo sample of fused values
//   identity  h(t) = t, for rankings that are already valid (max)
//
// Ties: every form evaluates P{fused <= t}, the right-continuous convention.

#include "possfuse/calibrator.hpp"
#include "possfuse/fusion_ops.hpp"
#include "possfuse/grid_contour.hpp"
#include "possfuse/sampler.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace possfuse {

enum class Regime { independent, dependent, exchangeable };
std::string_view to_string(Regime r);
Regime parse_regime(std::string_view name);
inline constexpr std::string_view kRegimeNames = "independent|dependent|exchangeable";

// Which ranking a rule expects: plain fusion, or the prefix ranking.
enum class FusionMode { plain, prefix };
std::string_view to_string(FusionMode m);

enum class BoundMethod { min_based, markov, pmerge, combined };
std::string_view to_string(BoundMethod m);

enum class Method { exact, min_based, markov, pmerge, combined, mc, identity, automatic };
std::string_view to_string(Method m);
Method parse_method(std::string_view name);
inline constexpr std::string_view kMethodNames = "exact|min_based|markov|pmerge|combined|mc|identity|auto";

// One piece of an upper bound h.
struct BoundTerm {
    enum class Shape {
        linear,          // c t
        power,           // c t^p
        neg_inv_log,     // -c / ln t
        half_inv_compl,  // 1 / (2 (1 - t))
    };
    Shape shape;
    double c = 1.0;
    double p = 1.0;

    static BoundTerm linear(double c) { return {Shape::linear, c, 1.0}; }
    static BoundTerm power(double c, double p) { return {Shape::power, c, p}; }
    static BoundTerm neg_inv_log(double c) { return {Shape::neg_inv_log, c, 1.0}; }
    static BoundTerm half_inv_compl() { return {Shape::half_inv_compl, 1.0, 1.0}; }

    // Unclamped value; may be +inf at t = 1. Limits are used at t = 0 and 1.
    double operator()(double t) const;
    std::string describe() const;
};

// Structured note attached to rules and pipeline results.
struct Warning {
    std::string code;
    std::string message;
};

class ValidificationRule {
public:
    struct ExactCdf {};
    struct Bound {
        std::vector<BoundTerm> terms;  // h = pointwise min over terms
    };
    struct McTable {
        std::shared_ptr<const std::vector<double>> sorted;
        bool continuity_correction = true;
        std::uint64_t seed = 0;
    };
    struct Identity {};
    using Form = std::variant<ExactCdf, Bound, McTable, Identity>;

    static ValidificationRule exact(OpKind op, std::size_t K);
    // Throws ValidationError if h is decreasing anywhere on a 1001-point sweep.
    static ValidificationRule bound(OpKind op, std::size_t K, Regime regime, std::string method,
                                    std::vector<BoundTerm> terms);
    // sample need not be sorted; B >= 1000.
    static ValidificationRule mc_table(OpKind op, std::size_t K, std::vector<double> sample, std::uint64_t seed,
                                       bool continuity_correction = true);
    static ValidificationRule identity(OpKind op, std::size_t K, Regime regime);

    const Form& form() const { return form_; }
    OpKind op() const { return op_; }
    std::size_t K() const { return K_; }
    Regime regime() const { return regime_; }
    FusionMode mode() const { return mode_; }
    const std::string& method() const { return method_; }
    const std::vector<Warning>& warnings() const { return warnings_; }

    bool is_exact() const { return std::holds_alternative<ExactCdf>(form_); }
    bool is_bound() const { return std::holds_alternative<Bound>(form_); }
    bool is_mc() const { return std::holds_alternative<McTable>(form_); }
    bool is_identity() const { return std::holds_alternative<Identity>(form_); }

    // Validified value at ranking value t in [0,1]; always in [0,1].
    double operator()(double t) const;
    // Vector form; single-term linear bounds go through the SIMD kernels.
    void apply(std::span<const double> in, std::span<double> out) const;

    std::string describe() const;

    ValidificationRule with_mode(FusionMode m) const;
    ValidificationRule with_warning(Warning w) const;

private:
    ValidificationRule(Form form, OpKind op, std::size_t K, Regime regime, std::string method)
        : form_(std::move(form)), op_(op), K_(K), regime_(regime), method_(std::move(method)) {}

    Form form_;
    OpKind op_;
    std::size_t K_;
    Regime regime_;
    FusionMode mode_ = FusionMode::plain;
    std::string method_;
    std::vector<Warning> warnings_;
};

// A fused ranking together with how it was produced.
struct Ranking {
    Contour contour;
    OpKind op;
    std::size_t K;
    FusionMode mode;
};

Ranking rank(const FusionOperator& op, const ContourSet& set, FusionMode mode);

// Exact iid CDF G_f for min, prod, lprod, avg, gavg.
//   min   1 - (1-t)^K
//   prod  Q(K, -ln t)
//   lprod H(t + K - 1), atom H(K - 1) at t = 0
//   avg   H(K t)
//   gavg  Q(K, -K ln t)
// with H the Irwin-Hall CDF and Q the integer-shape Gamma tail.
ValidificationRule exact_rule(OpKind op, std::size_t K);

// Upper bounds valid under arbitrary dependence (marginals Unif(0,1)).
ValidificationRule dep_bound_rule(OpKind op, std::size_t K, BoundMethod method);

// Same menu for the prefix ranking under exchangeability (tagged prefix).
ValidificationRule exch_bound_rule(OpKind op, std::size_t K, BoundMethod method);

struct McOptions {
    std::size_t reps = 100000;
    std::uint64_t seed = 42;
    JointSampler sampler = JointSampler::iid();
};

// B joint draws from the sampler, fused with op, sorted into a table.
ValidificationRule mc_rule(const FusionOperator& op, std::size_t K, const McOptions& opts);

// Recommended rule per operator and regime.
//   independent    exact (lprod with an inefficiency warning); max and wavg by mc
//   dependent,     min   K t
//   exchangeable   prod  2 t^{1/2} (K=2), else min{K t^{1/K}, -K/ln t}
//                  avg   2 t
//                  gavg  2 t (K=2), else e t
//                  max   identity
//                  lprod, wavg rejected
ValidificationRule recommend(const FusionOperator& op, std::size_t K, Regime regime, const McOptions& mc = {});

// Resolves a method name for (op, regime) the way the CLI does; auto means
// recommend.
ValidificationRule resolve_rule(const FusionOperator& op, std::size_t K, Regime regime, Method method,
                                const McOptions& mc = {});

// Pointwise min{1, h(gamma)} / G(gamma) / table lookup. Refuses rankings
// whose operator, K or fusion mode differ from the rule's tags.
Contour apply_rule(const ValidificationRule& rule, const Ranking& ranking);

// c such that min{1, c f(v)} <= alpha has calibrator form: K for min,
// 2 for avg, e for gavg. Throws for other operators.
double linear_constant(OpKind op, std::size_t K);

}  // namespace possfuse
