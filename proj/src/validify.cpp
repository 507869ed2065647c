#include "possfuse/validify.hpp"

#include "possfuse/errors.hpp"
#include "possfuse/kernels/kernels.hpp"
#include "possfuse/parallel.hpp"
#include "possfuse/rng.hpp"
#include "possfuse/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace possfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void reject(const std::string& msg) { throw ValidationError(msg); }

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

double exact_cdf(OpKind op, std::size_t K, double t) {
    const int k = static_cast<int>(K);
    if (t <= 0.0) {
        // only lprod has an atom at zero
        return op == OpKind::lprod ? irwin_hall_cdf(static_cast<double>(K - 1), k) : 0.0;
    }
    if (t >= 1.0) return 1.0;
    switch (op) {
        case OpKind::min: return beta_1K_cdf(t, k);
        case OpKind::prod: return gamma_int_upper(k, -std::log(t));
        case OpKind::lprod: return irwin_hall_cdf(t + static_cast<double>(K - 1), k);
        case OpKind::avg: return irwin_hall_cdf(static_cast<double>(K) * t, k);
        case OpKind::gavg: return gamma_int_upper(k, -static_cast<double>(K) * std::log(t));
        default: break;
    }
    reject("no exact CDF for " + std::string(to_string(op)));
}

const char* kLprodDependent =
    "lprod: not recommended; no valid nontrivial rule under arbitrary dependence or exchangeability "
    "(the minimum-based bound K-1+t and the Markov bound K/(2(1-t)) are both >= 1, and no finite linear "
    "rescaling is valid when the inputs are comonotone)";

const char* kWavgDependent =
    "wavg: requires mc_rule, which is only valid under independence (its weights are data-dependent and "
    "no dependence-robust bound is implemented)";

}  // namespace

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::independent: return "independent";
        case Regime::dependent: return "dependent";
        case Regime::exchangeable: return "exchangeable";
    }
    return "?";
}

Regime parse_regime(std::string_view name) {
    if (name == "independent") return Regime::independent;
    if (name == "dependent") return Regime::dependent;
    if (name == "exchangeable") return Regime::exchangeable;
    reject("unknown regime '" + std::string(name) + "' (expected " + std::string(kRegimeNames) + ")");
}

std::string_view to_string(FusionMode m) { return m == FusionMode::plain ? "plain" : "prefix"; }

std::string_view to_string(BoundMethod m) {
    switch (m) {
        case BoundMethod::min_based: return "min_based";
        case BoundMethod::markov: return "markov";
        case BoundMethod::pmerge: return "pmerge";
        case BoundMethod::combined: return "combined";
    }
    return "?";
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::min_based: return "min_based";
        case Method::markov: return "markov";
        case Method::pmerge: return "pmerge";
        case Method::combined: return "combined";
        case Method::mc: return "mc";
        case Method::identity: return "identity";
        case Method::automatic: return "auto";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (auto m : {Method::exact, Method::min_based, Method::markov, Method::pmerge, Method::combined, Method::mc,
                   Method::identity, Method::automatic}) {
        if (name == to_string(m)) return m;
    }
    reject("unknown method '" + std::string(name) + "' (expected " + std::string(kMethodNames) + ")");
}

double BoundTerm::operator()(double t) const {
    switch (shape) {
        case Shape::linear: return c * t;
        case Shape::power: return t <= 0.0 ? 0.0 : c * std::pow(t, p);
        case Shape::neg_inv_log:
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) return kInf;
            return -c / std::log(t);
        case Shape::half_inv_compl:
            if (t >= 1.0) return kInf;
            return 1.0 / (2.0 * (1.0 - t));
    }
    return kInf;
}

std::string BoundTerm::describe() const {
    switch (shape) {
        case Shape::linear: return fmt_num(c) + "*t";
        case Shape::power: return fmt_num(c) + "*t^" + fmt_num(p);
        case Shape::neg_inv_log: return "-" + fmt_num(c) + "/ln(t)";
        case Shape::half_inv_compl: return "1/(2(1-t))";
    }
    return "?";
}

ValidificationRule ValidificationRule::exact(OpKind op, std::size_t K) {
    return ValidificationRule(ExactCdf{}, op, K, Regime::independent, "exact");
}

ValidificationRule ValidificationRule::bound(OpKind op, std::size_t K, Regime regime, std::string method,
                                             std::vector<BoundTerm> terms) {
    if (terms.empty()) reject("a bound rule needs at least one term");
    ValidificationRule r(Bound{std::move(terms)}, op, K, regime, std::move(method));
    double prev = -kInf;
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        double h = kInf;
        for (const auto& term : std::get<Bound>(r.form_).terms) h = std::min(h, term(t));
        if (h < prev) reject("bound " + r.describe() + " is decreasing near t=" + fmt_num(t));
        prev = h;
    }
    return r;
}

ValidificationRule ValidificationRule::mc_table(OpKind op, std::size_t K, std::vector<double> sample,
                                                std::uint64_t seed, bool continuity_correction) {
    if (sample.size() < 1000) {
        reject("Monte Carlo validification needs B >= 1000 draws, got " + std::to_string(sample.size()));
    }
    std::sort(sample.begin(), sample.end());
    auto shared = std::make_shared<const std::vector<double>>(std::move(sample));
    return ValidificationRule(McTable{std::move(shared), continuity_correction, seed}, op, K, Regime::independent,
                              "mc");
}

ValidificationRule ValidificationRule::identity(OpKind op, std::size_t K, Regime regime) {
    return ValidificationRule(Identity{}, op, K, regime, "identity");
}

ValidificationRule ValidificationRule::with_mode(FusionMode m) const {
    auto r = *this;
    r.mode_ = m;
    return r;
}

ValidificationRule ValidificationRule::with_warning(Warning w) const {
    auto r = *this;
    r.warnings_.push_back(std::move(w));
    return r;
}

double ValidificationRule::operator()(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) reject("rankings must lie in [0,1]");
    return std::visit(
        [&](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, ExactCdf>) {
                return clamp01(exact_cdf(op_, K_, t));
            } else if constexpr (std::is_same_v<F, Bound>) {
                double h = kInf;
                for (const auto& term : f.terms) h = std::min(h, term(t));
                return h < 1.0 ? (h > 0.0 ? h : 0.0) : 1.0;
            } else if constexpr (std::is_same_v<F, McTable>) {
                const auto& s = *f.sorted;
                const auto count = static_cast<double>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
                const double B = static_cast<double>(s.size());
                return f.continuity_correction ? (1.0 + count) / (B + 1.0) : count / B;
            } else {
                return t;
            }
        },
        form_);
}

void ValidificationRule::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != out.size()) reject("apply: input and output lengths differ");
    if (const auto* b = std::get_if<Bound>(&form_);
        b && b->terms.size() == 1 && b->terms[0].shape == BoundTerm::Shape::linear) {
        for (double t : in) {
            if (!(t >= 0.0 && t <= 1.0)) reject("rankings must lie in [0,1]");
        }
        kernels::active().linear_bound(b->terms[0].c, in.data(), in.size(), out.data());
        return;
    }
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = (*this)(in[i]);
}

std::string ValidificationRule::describe() const {
    return std::visit(
        [&](const auto& f) -> std::string {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, ExactCdf>) {
                return "exact iid CDF of " + std::string(to_string(op_)) + " (K=" + std::to_string(K_) + ")";
            } else if constexpr (std::is_same_v<F, Bound>) {
                std::string s = "min{1, ";
                if (f.terms.size() > 1) s += "min{";
                for (std::size_t i = 0; i < f.terms.size(); ++i) {
                    if (i) s += ", ";
                    s += f.terms[i].describe();
                }
                if (f.terms.size() > 1) s += "}";
                return s + "}";
            } else if constexpr (std::is_same_v<F, McTable>) {
                return "Monte Carlo CDF of " + std::string(to_string(op_)) + " (B=" + std::to_string(f.sorted->size()) +
                       ")";
            } else {
                return "identity";
            }
        },
        form_);
}

Ranking rank(const FusionOperator& op, const ContourSet& set, FusionMode mode) {
    auto c = mode == FusionMode::plain ? fuse(op, set) : fuse_exchangeable(op, set);
    return Ranking{std::move(c), op.kind(), set.K(), mode};
}

ValidificationRule exact_rule(OpKind op, std::size_t K) {
    if (K < 2) reject("exact validification needs K >= 2");
    switch (op) {
        case OpKind::max: reject("max: no closed-form independence CDF; use mc_rule");
        case OpKind::wavg: reject("wavg: requires mc_rule (data-dependent weights have no closed-form CDF)");
        case OpKind::lprod:
            if (K > static_cast<std::size_t>(kIrwinHallMaxK)) reject("exact lprod rule supports K <= 60");
            break;
        case OpKind::avg:
            if (K > static_cast<std::size_t>(kIrwinHallMaxK)) reject("exact avg rule supports K <= 60");
            break;
        default: break;
    }
    return ValidificationRule::exact(op, K);
}

namespace {

ValidificationRule bound_rule(OpKind op, std::size_t K, BoundMethod method, Regime regime) {
    if (K < 2) reject("bound validification needs K >= 2");
    const double Kd = static_cast<double>(K);
    const std::string name(to_string(method));
    const auto make = [&](std::vector<BoundTerm> terms) {
        return ValidificationRule::bound(op, K, regime, name, std::move(terms));
    };
    switch (op) {
        case OpKind::min:
            // union bound; every method reduces to it
            return make({BoundTerm::linear(Kd)});
        case OpKind::prod:
            switch (method) {
                case BoundMethod::min_based: return make({BoundTerm::power(Kd, 1.0 / Kd)});
                case BoundMethod::markov: return make({BoundTerm::neg_inv_log(Kd)});
                case BoundMethod::combined: return make({BoundTerm::power(Kd, 1.0 / Kd), BoundTerm::neg_inv_log(Kd)});
                case BoundMethod::pmerge:
                    reject("prod: not homogeneous; linear (p-merging) validification is impossible under arbitrary "
                           "dependence. Use min_based, markov or combined");
            }
            break;
        case OpKind::avg:
            switch (method) {
                case BoundMethod::min_based: return make({BoundTerm::linear(Kd)});
                case BoundMethod::markov: return make({BoundTerm::half_inv_compl()});
                case BoundMethod::pmerge: return make({BoundTerm::linear(2.0)});
                case BoundMethod::combined:
                    return make({BoundTerm::linear(Kd), BoundTerm::half_inv_compl(), BoundTerm::linear(2.0)});
            }
            break;
        case OpKind::gavg:
            switch (method) {
                case BoundMethod::min_based: return make({BoundTerm::linear(Kd)});
                case BoundMethod::markov: return make({BoundTerm::neg_inv_log(1.0)});
                case BoundMethod::pmerge: return make({BoundTerm::linear(std::numbers::e)});
                case BoundMethod::combined:
                    return make(
                        {BoundTerm::linear(Kd), BoundTerm::neg_inv_log(1.0), BoundTerm::linear(std::numbers::e)});
            }
            break;
        case OpKind::max: return ValidificationRule::identity(op, K, regime);
        case OpKind::lprod: reject(kLprodDependent);
        case OpKind::wavg: reject(kWavgDependent);
    }
    reject("unsupported bound method");
}

}  // namespace

ValidificationRule dep_bound_rule(OpKind op, std::size_t K, BoundMethod method) {
    return bound_rule(op, K, method, Regime::dependent);
}

ValidificationRule exch_bound_rule(OpKind op, std::size_t K, BoundMethod method) {
    // min/prod/lprod/max prefix rankings reduce to the plain ones, so the
    // menu is the same; avg/gavg bounds hold for the prefix ranking.
    return bound_rule(op, K, method, Regime::exchangeable).with_mode(FusionMode::prefix);
}

ValidificationRule mc_rule(const FusionOperator& op, std::size_t K, const McOptions& opts) {
    if (opts.reps < 1000) reject("Monte Carlo validification needs --mc-reps >= 1000");
    if (K < 1) reject("mc_rule needs K >= 1");
    if (op.kind() == OpKind::wavg && op.weights().size() != K) reject("wavg weights do not match K");
    opts.sampler.check_dimension(K);

    const std::size_t B = opts.reps;
    const std::size_t blocks = (B + kBlockSize - 1) / kBlockSize;
    std::vector<double> sample(B);
    parallel_for(blocks, [&](std::size_t b) {
        auto eng = block_engine(opts.seed, stream::mc_rule, b);
        const std::size_t lo = b * kBlockSize;
        const std::size_t n = std::min(B, lo + kBlockSize) - lo;
        std::vector<std::vector<double>> cols(K, std::vector<double>(n));
        std::vector<double> draw(K);
        for (std::size_t i = 0; i < n; ++i) {
            opts.sampler.draw(eng, draw);
            for (std::size_t k = 0; k < K; ++k) cols[k][i] = draw[k];
        }
        std::vector<std::span<const double>> views(cols.begin(), cols.end());
        const auto fused = fuse_columns(op, views);
        std::copy(fused.begin(), fused.end(), sample.begin() + static_cast<std::ptrdiff_t>(lo));
    });
    return ValidificationRule::mc_table(op.kind(), K, std::move(sample), opts.seed);
}

ValidificationRule recommend(const FusionOperator& op, std::size_t K, Regime regime, const McOptions& mc) {
    const OpKind kind = op.kind();
    if (regime == Regime::independent) {
        switch (kind) {
            case OpKind::max:
            case OpKind::wavg: {
                McOptions iid = mc;
                iid.sampler = JointSampler::iid();
                return mc_rule(op, K, iid);
            }
            case OpKind::lprod:
                return exact_rule(kind, K).with_warning(
                    {"lprod-inefficient",
                     "lprod under independence is valid but poorly discriminative: its fused value has an atom "
                     "of size H(K-1) at zero (0.5, 0.83, 0.96 for K=2,3,4), so the validified contour is nearly "
                     "flat"});
            default: return exact_rule(kind, K);
        }
    }
    const auto bound = [&](BoundMethod m) {
        return regime == Regime::dependent ? dep_bound_rule(kind, K, m) : exch_bound_rule(kind, K, m);
    };
    switch (kind) {
        case OpKind::min: return bound(BoundMethod::min_based);
        case OpKind::prod: return K == 2 ? bound(BoundMethod::min_based) : bound(BoundMethod::combined);
        case OpKind::avg: return bound(BoundMethod::pmerge);
        case OpKind::gavg: return K == 2 ? bound(BoundMethod::min_based) : bound(BoundMethod::pmerge);
        case OpKind::max: return bound(BoundMethod::min_based);
        case OpKind::lprod: reject(kLprodDependent);
        case OpKind::wavg: reject(kWavgDependent);
    }
    reject("unsupported operator");
}

ValidificationRule resolve_rule(const FusionOperator& op, std::size_t K, Regime regime, Method method,
                                const McOptions& mc) {
    const OpKind kind = op.kind();
    const auto bound = [&](BoundMethod m) {
        if (regime == Regime::independent) {
            // bounds valid under any dependence are valid under independence too
            return dep_bound_rule(kind, K, m);
        }
        return regime == Regime::dependent ? dep_bound_rule(kind, K, m) : exch_bound_rule(kind, K, m);
    };
    switch (method) {
        case Method::automatic: return recommend(op, K, regime, mc);
        case Method::exact:
            if (regime != Regime::independent) {
                reject("method exact: the exact CDF assumes independent contours; regime is " +
                       std::string(to_string(regime)));
            }
            return exact_rule(kind, K);
        case Method::mc:
            if (regime != Regime::independent) {
                reject("method mc: the Monte Carlo table assumes independent contours; regime is " +
                       std::string(to_string(regime)));
            }
            return mc_rule(op, K, mc);
        case Method::identity:
            if (kind != OpKind::max) {
                reject("method identity is only valid for max (every other ranking needs rescaling)");
            }
            return regime == Regime::exchangeable
                       ? ValidificationRule::identity(kind, K, regime).with_mode(FusionMode::prefix)
                       : ValidificationRule::identity(kind, K, regime);
        case Method::min_based: return bound(BoundMethod::min_based);
        case Method::markov: return bound(BoundMethod::markov);
        case Method::pmerge: return bound(BoundMethod::pmerge);
        case Method::combined: return bound(BoundMethod::combined);
    }
    reject("unsupported method");
}

Contour apply_rule(const ValidificationRule& rule, const Ranking& ranking) {
    if (rule.op() != ranking.op) {
        reject("rule for " + std::string(to_string(rule.op())) + " applied to a " +
               std::string(to_string(ranking.op)) + " ranking");
    }
    if (rule.K() != ranking.K) {
        reject("rule for K=" + std::to_string(rule.K()) + " applied to a ranking of K=" + std::to_string(ranking.K));
    }
    if (rule.mode() != ranking.mode) {
        reject("rule expects a " + std::string(to_string(rule.mode())) + " ranking but got a " +
               std::string(to_string(ranking.mode)) +
               " one (exchangeable rules must be applied to the prefix ranking from fuse_exchangeable)");
    }
    std::vector<double> out(ranking.contour.size());
    rule.apply(ranking.contour.values(), out);
    return Contour(ranking.contour.grid_ptr(), std::move(out));
}

double linear_constant(OpKind op, std::size_t K) {
    switch (op) {
        case OpKind::min: return static_cast<double>(K);
        case OpKind::avg: return 2.0;
        case OpKind::gavg: return std::numbers::e;
        default: break;
    }
    reject(std::string(to_string(op)) + " has no calibrator-form linear validification");
}

}  // namespace possfuse
