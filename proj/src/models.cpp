#include "possfuse/models.hpp"

#include "possfuse/errors.hpp"
#include "possfuse/parallel.hpp"
#include "possfuse/rng.hpp"
#include "possfuse/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace possfuse {

namespace {

constexpr double kRootTol = 1e-10;
constexpr int kMaxIter = 300;

// log of the relative likelihood as a function of the pivot
double log_level(double w, double n) { return n * std::log(w / n) + (n - w); }

// The level set {w : log_level(w) = L} for L < 0 has one point on each side
// of n. f is monotone on each side, so a bracketed Newton step that leaves
// the bracket is replaced by bisection.
double solve_side(double L, double n, double lo, double hi, bool upper) {
    const auto f = [&](double w) { return log_level(w, n) - L; };
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxIter; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        // upper side: f decreasing, root to the right while f > 0
        if ((fx > 0.0) == upper) lo = x;
        else hi = x;
        const double d = n / x - 1.0;
        double next = d != 0.0 ? x - fx / d : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < kRootTol || hi - lo < kRootTol) return next;
        x = next;
    }
    throw NumericError("level-set root did not converge (n=" + std::to_string(n) + ", log level " +
                       std::to_string(L) + ")");
}

double upper_root(double L, double n) {
    const double step = 50.0 * std::sqrt(n);
    double hi = n + step;
    for (int grow = 0; log_level(hi, n) > L; ++grow) {
        if (grow > 60) {
            throw NumericError("upper bracket for the level-set root exceeded 2^60 widenings (log level " +
                               std::to_string(L) + ")");
        }
        hi = n + 2.0 * (hi - n);
    }
    return solve_side(L, n, n, hi, true);
}

// Returns 0 when the root sits below the smallest normal double: its
// Gamma(n) lower tail is below DBL_MIN^n / n! and is 0 in double anyway.
double lower_root(double L, double n) {
    double lo = 1e-12 * n;
    while (log_level(lo, n) > L) {
        if (lo < 1e-280) return 0.0;
        lo *= 1e-12;
    }
    return solve_side(L, n, lo, n, false);
}

double level_prob(double w_lo, double w_hi, int n) {
    const double p = (w_lo > 0.0 ? gamma_int_lower(n, w_lo) : 0.0) + gamma_int_upper(n, w_hi);
    return p > 1.0 ? 1.0 : p;
}

void check_summaries(std::span<const StudySummary> s) {
    if (s.empty()) throw ValidationError("need at least one study summary");
    for (const auto& x : s) check_summary(x);
}

void check_positive_grid(const ParameterGrid& g) {
    if (!(g.front() > 0.0)) throw ValidationError("exponential-rate grids must be positive (first point is " +
                                                  std::to_string(g.front()) + ")");
}

}  // namespace

void check_summary(const StudySummary& s) {
    if (!(s.mle > 0.0) || !std::isfinite(s.mle)) throw ValidationError("study MLE must be positive and finite");
    if (s.n < 1) throw ValidationError("study sample size must be >= 1");
}

double exp_rel_likelihood(double theta, const StudySummary& s) {
    check_summary(s);
    if (!(theta > 0.0)) throw ValidationError("exp_rel_likelihood needs theta > 0");
    const double r = theta / s.mle;
    return std::exp(s.n * (std::log(r) + 1.0 - r));
}

double exp_pivot_value(double w_obs, int n) {
    if (n < 1) throw ValidationError("sample size must be >= 1");
    if (!(w_obs > 0.0) || !std::isfinite(w_obs)) return 0.0;
    const double nd = n;
    if (w_obs == nd) return 1.0;
    const double L = log_level(w_obs, nd);
    if (!(L < 0.0)) return 1.0;
    if (w_obs < nd) return level_prob(w_obs, upper_root(L, nd), n);
    return level_prob(lower_root(L, nd), w_obs, n);
}

Contour exp_im_contour(const GridPtr& grid, const StudySummary& s, const ExpImOptions& opts) {
    check_summary(s);
    check_positive_grid(*grid);
    const auto th = grid->points();
    std::vector<double> out(th.size());
    const double nd = s.n;
    if (opts.method == ExpImMethod::roots) {
        for (std::size_t i = 0; i < th.size(); ++i) out[i] = exp_pivot_value(th[i] * nd / s.mle, s.n);
        return Contour(grid, std::move(out));
    }
    if (opts.reps < 1000) throw ValidationError("mc contour needs at least 1000 draws");
    const std::size_t B = opts.reps;
    std::vector<double> levels(B);
    parallel_for((B + kBlockSize - 1) / kBlockSize, [&](std::size_t b) {
        auto eng = block_engine(opts.seed, stream::exp_contour_mc, b);
        const std::size_t end = std::min(B, (b + 1) * kBlockSize);
        for (std::size_t i = b * kBlockSize; i < end; ++i) levels[i] = log_level(gamma_draw(eng, nd), nd);
    });
    std::sort(levels.begin(), levels.end());
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double L = log_level(th[i] * nd / s.mle, nd);
        const auto c = std::upper_bound(levels.begin(), levels.end(), L) - levels.begin();
        out[i] = static_cast<double>(c) / static_cast<double>(B);
    }
    return Contour(grid, std::move(out));
}

StudySummary pool_summaries(std::span<const StudySummary> s) {
    check_summaries(s);
    if (s.size() == 1) return s.front();
    int N = 0;
    double denom = 0.0;
    for (const auto& x : s) {
        N += x.n;
        denom += x.n / x.mle;
    }
    return StudySummary{N / denom, N};
}

Contour exp_oracle_im(const GridPtr& grid, std::span<const StudySummary> s) {
    return exp_im_contour(grid, pool_summaries(s));
}

LargeSampleFit large_sample_fit(std::span<const StudySummary> s) {
    check_summaries(s);
    double J = 0.0, num = 0.0;
    for (const auto& x : s) {
        J += x.n / (x.mle * x.mle);
        num += x.n / x.mle;
    }
    return LargeSampleFit{num / J, J};
}

double large_sample_value(double theta, const LargeSampleFit& fit) {
    const double d = fit.center - theta;
    return chisq1_sf(fit.info * d * d);
}

Contour large_sample_im(const GridPtr& grid, std::span<const StudySummary> s) {
    const auto fit = large_sample_fit(s);
    const auto th = grid->points();
    std::vector<double> out(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) out[i] = large_sample_value(th[i], fit);
    out[grid->nearest(fit.center)] = 1.0;
    return Contour(grid, std::move(out));
}

std::vector<double> inverse_variance_weights(std::span<const StudySummary> s) {
    check_summaries(s);
    std::vector<double> w;
    double total = 0.0;
    for (const auto& x : s) {
        w.push_back(x.n / (x.mle * x.mle));
        total += w.back();
    }
    for (auto& v : w) v /= total;
    return w;
}

namespace {

void check_template(std::span<const int> n) {
    if (n.size() < 2) throw ValidationError("weighted-average fusion needs at least two studies");
    for (int v : n) {
        if (v < 1) throw ValidationError("study sample size must be >= 1");
    }
}

template <class Body>
std::vector<double> blocked_sample(std::size_t B, std::uint64_t seed, std::uint64_t stream_id, Body body) {
    std::vector<double> out(B);
    parallel_for((B + kBlockSize - 1) / kBlockSize, [&](std::size_t b) {
        auto eng = block_engine(seed, stream_id, b);
        std::vector<double> pi, raw;
        const std::size_t end = std::min(B, (b + 1) * kBlockSize);
        for (std::size_t i = b * kBlockSize; i < end; ++i) out[i] = body(eng, pi, raw);
    });
    return out;
}

}  // namespace

std::vector<double> wavg_pivot_sample(std::span<const int> n, std::size_t B, std::uint64_t seed) {
    check_template(n);
    return blocked_sample(B, seed, stream::pivot_table, [&](Engine& eng, std::vector<double>& pi,
                                                            std::vector<double>& raw) {
        pi.resize(n.size());
        raw.resize(n.size());
        for (std::size_t k = 0; k < n.size(); ++k) {
            const double g = gamma_draw(eng, n[k]);
            pi[k] = exp_pivot_value(g, n[k]);
            raw[k] = g * g / n[k];
        }
        return fuse_pointwise(FusionOperator::weighted_proportional(raw), pi);
    });
}

std::vector<double> wavg_direct_sample(double theta, std::span<const int> n, std::size_t B, std::uint64_t seed) {
    check_template(n);
    if (!(theta > 0.0)) throw ValidationError("theta must be positive");
    return blocked_sample(B, seed, stream::pivot_direct, [&](Engine& eng, std::vector<double>& pi,
                                                             std::vector<double>& raw) {
        pi.resize(n.size());
        raw.resize(n.size());
        for (std::size_t k = 0; k < n.size(); ++k) {
            // n iid Exp(theta) observations sum to Gamma(n, 1) / theta
            const double sum = gamma_draw(eng, n[k]) / theta;
            const StudySummary s{n[k] / sum, n[k]};
            const double r = exp_rel_likelihood(theta, s);
            const double L = std::log(r);
            const double nd = n[k];
            pi[k] = L < 0.0 ? level_prob(lower_root(L, nd), upper_root(L, nd), n[k]) : 1.0;
            raw[k] = s.n / (s.mle * s.mle);
        }
        return fuse_pointwise(FusionOperator::weighted_proportional(raw), pi);
    });
}

ValidificationRule meta_wavg_rule(std::span<const int> n, std::size_t B, std::uint64_t seed) {
    if (B < 10000) throw ValidationError("weighted-average validification needs B >= 10000 draws");
    return ValidificationRule::mc_table(OpKind::wavg, n.size(), wavg_pivot_sample(n, B, seed), seed);
}

ContourSet study_contours(const GridPtr& grid, std::span<const StudySummary> s) {
    check_summaries(s);
    std::vector<Contour> members;
    members.reserve(s.size());
    for (const auto& x : s) members.push_back(exp_im_contour(grid, x));
    return ContourSet(std::move(members));
}

FusedResult meta_wavg_fused(const ContourSet& studies, std::span<const StudySummary> s,
                            const ValidificationRule& table) {
    if (studies.K() != s.size()) throw ValidationError("study contours and summaries differ in number");
    const auto op = FusionOperator::weighted(inverse_variance_weights(s));
    return fvn_with_rule(studies, op, table);
}

FusedResult meta_wavg_fused(const GridPtr& grid, std::span<const StudySummary> s, std::size_t B, std::uint64_t seed) {
    check_summaries(s);
    std::vector<int> n;
    for (const auto& x : s) n.push_back(x.n);
    return meta_wavg_fused(study_contours(grid, s), s, meta_wavg_rule(n, B, seed));
}

FusedResult meta_avg_fused(const ContourSet& studies) {
    return fvn(studies, FusionOperator(OpKind::avg), Regime::independent, Method::exact);
}

}  // namespace possfuse
