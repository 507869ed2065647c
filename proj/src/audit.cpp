#include "possfuse/audit.hpp"

#include "possfuse/csv_io.hpp"
#include "possfuse/errors.hpp"
#include "possfuse/parallel.hpp"
#include "possfuse/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace possfuse {

namespace {

std::size_t block_count(std::size_t B) { return (B + kBlockSize - 1) / kBlockSize; }

std::size_t block_end(std::size_t B, std::size_t b) { return std::min(B, (b + 1) * kBlockSize); }

void check_alpha_grid(std::span<const double> a) {
    if (a.empty()) throw ValidationError("alpha grid is empty");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] >= 0.0 && a[i] <= 1.0)) throw ValidationError("alpha grid values must lie in [0,1]");
        if (i && !(a[i] > a[i - 1])) throw ValidationError("alpha grid must be strictly increasing");
    }
}

std::string join(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string s;
    for (const auto& [k, v] : kv) {
        if (!s.empty()) s += ',';
        s += k + "=" + v;
    }
    return s;
}

std::string ints(std::span<const int> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
    return s;
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_error(std::span<const double> v, double m) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// Simulated study summaries for one replicate: the sum of n Exp(theta)
// draws is Gamma(n, 1) / theta, so the MLE is n theta / G.
void simulate_summaries(Engine& eng, double theta, std::span<const int> n, std::vector<StudySummary>& out) {
    out.resize(n.size());
    for (std::size_t k = 0; k < n.size(); ++k) {
        const double g = gamma_draw(eng, n[k]);
        out[k] = StudySummary{n[k] * theta / g, n[k]};
    }
}

void check_meta(const MetaSimConfig& cfg) {
    if (cfg.reps < 1000) throw ValidationError("meta-analysis simulations need reps >= 1000");
    if (!(cfg.theta_true > 0.0)) throw ValidationError("true rate must be positive");
    if (cfg.n.size() < 2) throw ValidationError("need at least two studies in the sample-size template");
    for (int v : cfg.n) {
        if (v < 1) throw ValidationError("sample sizes must be >= 1");
    }
    for (double l : cfg.levels) {
        if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("confidence levels must lie in [0,1]");
    }
}

std::vector<std::string> meta_config(const char* what, const MetaSimConfig& cfg) {
    return {join({{"audit", what},
                  {"theta", format_double(cfg.theta_true)},
                  {"n", ints(cfg.n)},
                  {"reps", std::to_string(cfg.reps)},
                  {"table_reps", std::to_string(cfg.table_reps)},
                  {"seed", std::to_string(cfg.seed)}})};
}

}  // namespace

std::vector<double> default_alpha_grid() {
    std::vector<double> a;
    for (int i = 1; i <= 99; ++i) a.push_back(i / 100.0);
    return a;
}

std::vector<double> impossibility_alpha_grid() {
    std::vector<double> a = {1e-4, 1e-3};
    for (double x : default_alpha_grid()) a.push_back(x);
    return a;
}

double dkw_bound(std::size_t B, double delta) {
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(B)));
}

AuditReport summarize(std::vector<double> values, std::span<const double> alpha_grid, std::uint64_t seed) {
    if (values.empty()) throw ValidationError("no replicates to summarize");
    check_alpha_grid(alpha_grid);
    std::sort(values.begin(), values.end());
    AuditReport r;
    r.B = values.size();
    r.seed = seed;
    r.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
    const double B = static_cast<double>(values.size());
    r.max_violation = -1.0;
    for (double a : alpha_grid) {
        const auto c = std::upper_bound(values.begin(), values.end(), a) - values.begin();
        const double F = static_cast<double>(c) / B;
        r.empirical_cdf.push_back(F);
        r.max_violation = std::max(r.max_violation, F - a);
        r.max_abs_deviation = std::max(r.max_abs_deviation, std::abs(F - a));
    }
    // the empirical CDF jumps at each order statistic: check just after
    // (violation) and just before (deficit) every jump
    double above = 0.0, below = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double s = values[i];
        if (i + 1 < values.size() && values[i + 1] == s) continue;
        above = std::max(above, static_cast<double>(i + 1) / B - s);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i && values[i - 1] == values[i]) continue;
        below = std::max(below, values[i] - static_cast<double>(i) / B);
    }
    r.ks_violation = above;
    r.ks_distance = std::max(above, below);
    return r;
}

std::string format_report_csv(const AuditReport& r) {
    csv::Table t;
    t.comments = r.config;
    t.comments.push_back(join({{"B", std::to_string(r.B)},
                               {"seed", std::to_string(r.seed)},
                               {"max_violation", format_double(r.max_violation)},
                               {"ks_violation", format_double(r.ks_violation)},
                               {"ks_distance", format_double(r.ks_distance)}}));
    t.header = {"alpha", "empirical_cdf", "violation"};
    std::vector<double> v;
    for (std::size_t i = 0; i < r.alpha_grid.size(); ++i) v.push_back(r.empirical_cdf[i] - r.alpha_grid[i]);
    t.columns = {r.alpha_grid, r.empirical_cdf, v};
    return csv::format(t);
}

std::vector<double> validity_sample(const FusionOperator& op, const ValidificationRule& rule, std::size_t K,
                                    const JointSampler& sampler, std::size_t B, std::uint64_t seed) {
    if (B < 1) throw ValidationError("validity audit needs at least one replicate");
    if (rule.op() != op.kind() || rule.K() != K) throw ValidationError("rule does not match the audited operator");
    sampler.check_dimension(K);
    std::vector<double> out(B);
    parallel_for(block_count(B), [&](std::size_t b) {
        auto eng = block_engine(seed, stream::validity, b);
        const std::size_t lo = b * kBlockSize, n = block_end(B, b) - lo;
        std::vector<std::vector<double>> cols(K, std::vector<double>(n));
        std::vector<double> draw(K);
        for (std::size_t i = 0; i < n; ++i) {
            sampler.draw(eng, draw);
            for (std::size_t k = 0; k < K; ++k) cols[k][i] = draw[k];
        }
        std::vector<std::span<const double>> views(cols.begin(), cols.end());
        const auto fused =
            rule.mode() == FusionMode::prefix ? fuse_exchangeable_columns(op, views) : fuse_columns(op, views);
        rule.apply(fused, std::span<double>(out).subspan(lo, n));
    });
    return out;
}

AuditReport validity_curve(const FusionOperator& op, Regime regime, Method method, std::size_t K,
                           const JointSampler& sampler, std::size_t B, std::uint64_t seed,
                           std::span<const double> alpha_grid, const McOptions& mc) {
    const auto rule = resolve_rule(op, K, regime, method, mc);
    auto r = summarize(validity_sample(op, rule, K, sampler, B, seed), alpha_grid, seed);
    std::vector<std::pair<std::string, std::string>> kv = {{"audit", "validity"},
                                                           {"op", std::string(to_string(op.kind()))},
                                                           {"regime", std::string(to_string(regime))},
                                                           {"method", std::string(to_string(method))},
                                                           {"rule", rule.describe()},
                                                           {"K", std::to_string(K)},
                                                           {"sampler", sampler.describe()}};
    if (rule.is_mc()) {
        kv.emplace_back("mc_reps", std::to_string(mc.reps));
        kv.emplace_back("mc_seed", std::to_string(mc.seed));
    }
    r.config = {join(kv)};
    return r;
}

AuditReport impossibility_demo(double c, std::size_t K, std::span<const double> alpha_grid, std::size_t B,
                               std::uint64_t seed, ImpossibilityVariant variant) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("impossibility demo needs a finite c > 0");
    if (K < 2) throw ValidationError("impossibility demo needs K >= 2");
    if (B < 1) throw ValidationError("impossibility demo needs at least one replicate");
    const FusionOperator op(variant == ImpossibilityVariant::prod ? OpKind::prod : OpKind::lprod);
    std::vector<double> out(B);
    parallel_for(block_count(B), [&](std::size_t b) {
        auto eng = block_engine(seed, stream::impossibility, b);
        std::vector<double> v(K);
        for (std::size_t i = b * kBlockSize; i < block_end(B, b); ++i) {
            std::fill(v.begin(), v.end(), uniform_open(eng));
            out[i] = std::min(1.0, c * fuse_pointwise(op, v));
        }
    });
    auto r = summarize(std::move(out), alpha_grid, seed);
    r.config = {join({{"audit", "impossibility"},
                      {"op", std::string(to_string(op.kind()))},
                      {"c", format_double(c)},
                      {"K", std::to_string(K)},
                      {"sampler", "comonotone"}})};
    return r;
}

std::string format_width_csv(const std::vector<WidthRow>& rows, const std::vector<std::string>& config) {
    std::ostringstream out;
    for (const auto& c : config) out << "# " << c << '\n';
    out << "level,method,mean_width,stderr\n";
    for (const auto& r : rows) {
        out << format_double(r.level) << ',' << r.method << ',' << format_double(r.mean_width) << ','
            << format_double(r.stderr_width) << '\n';
    }
    return out.str();
}

GridPtr default_table4_grid() { return share(ParameterGrid::from_range(0.005, 8.0, 0.005)); }

std::vector<WidthRow> table4(const MetaSimConfig& cfg) {
    check_meta(cfg);
    const auto grid = cfg.grid ? cfg.grid : default_table4_grid();
    const std::size_t L = cfg.levels.size(), R = cfg.reps, K = cfg.n.size();
    const auto table = meta_wavg_rule(cfg.n, cfg.table_reps, cfg.seed);
    const auto avg_rule = exact_rule(OpKind::avg, K);
    // widths[(r * L + l) * 2 + m], m = 0 average, 1 weighted-average
    std::vector<double> widths(R * L * 2);
    parallel_for(block_count(R), [&](std::size_t b) {
        auto eng = block_engine(cfg.seed, stream::meta_sim, b);
        std::vector<StudySummary> s;
        for (std::size_t r = b * kBlockSize; r < block_end(R, b); ++r) {
            simulate_summaries(eng, cfg.theta_true, cfg.n, s);
            const auto studies = study_contours(grid, s);
            const auto avg = finish(rank(FusionOperator(OpKind::avg), studies, FusionMode::plain), avg_rule);
            const auto wavg = meta_wavg_fused(studies, s, table);
            for (std::size_t l = 0; l < L; ++l) {
                const double alpha = 1.0 - cfg.levels[l];
                widths[(r * L + l) * 2] = alpha_cut(avg.normalized, alpha).measure;
                widths[(r * L + l) * 2 + 1] = alpha_cut(wavg.normalized, alpha).measure;
            }
        }
    });
    std::vector<WidthRow> rows;
    const char* names[2] = {"average", "weighted-average"};
    for (std::size_t m = 0; m < 2; ++m) {
        for (std::size_t l = 0; l < L; ++l) {
            std::vector<double> v(R);
            for (std::size_t r = 0; r < R; ++r) v[r] = widths[(r * L + l) * 2 + m];
            const double mu = mean(v);
            rows.push_back(WidthRow{cfg.levels[l], names[m], mu, std_error(v, mu)});
        }
    }
    return rows;
}

LargeSampleAudit large_sample_invalidity(const MetaSimConfig& cfg, std::span<const double> alpha_grid) {
    check_meta(cfg);
    const std::size_t R = cfg.reps, K = cfg.n.size();
    const auto table = meta_wavg_rule(cfg.n, cfg.table_reps, cfg.seed);
    const auto avg_rule = exact_rule(OpKind::avg, K);
    const FusionOperator avg_op(OpKind::avg);
    std::vector<double> ls(R), av(R), wv(R);
    parallel_for(block_count(R), [&](std::size_t b) {
        auto eng = block_engine(cfg.seed, stream::meta_sim, b);
        std::vector<StudySummary> s;
        std::vector<double> pi(K);
        for (std::size_t r = b * kBlockSize; r < block_end(R, b); ++r) {
            simulate_summaries(eng, cfg.theta_true, cfg.n, s);
            for (std::size_t k = 0; k < K; ++k) {
                pi[k] = exp_pivot_value(cfg.theta_true * s[k].n / s[k].mle, s[k].n);
            }
            ls[r] = large_sample_value(cfg.theta_true, large_sample_fit(s));
            av[r] = avg_rule(fuse_pointwise(avg_op, pi));
            wv[r] = table(fuse_pointwise(FusionOperator::weighted(inverse_variance_weights(s)), pi));
        }
    });
    LargeSampleAudit out{summarize(std::move(ls), alpha_grid, cfg.seed), summarize(std::move(av), alpha_grid, cfg.seed),
                         summarize(std::move(wv), alpha_grid, cfg.seed)};
    out.large_sample.config = meta_config("large_sample", cfg);
    out.avg_fvn.config = meta_config("avg_fvn", cfg);
    out.wavg.config = meta_config("wavg_fvn", cfg);
    return out;
}

std::vector<EfficiencyRow> efficiency_exch_vs_dep(const EfficiencyConfig& cfg) {
    if (cfg.reps < 1) throw ValidationError("efficiency comparison needs at least one replicate");
    if (cfg.op != OpKind::avg && cfg.op != OpKind::gavg) {
        throw ValidationError("efficiency comparison covers the avg and gavg p-merging rules");
    }
    cfg.sampler.check_dimension(cfg.K);
    const auto grid = cfg.grid ? cfg.grid : share(ParameterGrid::from_range(-8.0, 8.0, 0.01));
    const std::size_t L = cfg.levels.size(), R = cfg.reps;
    const FusionOperator op(cfg.op);
    const auto exch = exch_bound_rule(cfg.op, cfg.K, BoundMethod::pmerge);
    const auto dep = dep_bound_rule(cfg.op, cfg.K, BoundMethod::pmerge);
    std::vector<double> we(R * L), wd(R * L);
    parallel_for(block_count(R), [&](std::size_t b) {
        auto eng = block_engine(cfg.seed, stream::validity, b);
        std::vector<double> u(cfg.K);
        const auto th = grid->points();
        for (std::size_t r = b * kBlockSize; r < block_end(R, b); ++r) {
            cfg.sampler.draw(eng, u);
            std::vector<Contour> members;
            for (double uk : u) {
                const double x = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uk);
                std::vector<double> v(th.size());
                for (std::size_t i = 0; i < th.size(); ++i) v[i] = std::erfc(std::abs(th[i] - x) / std::sqrt(2.0));
                members.emplace_back(grid, std::move(v));
            }
            const ContourSet set(std::move(members));
            const auto fe = fvn_with_rule(set, op, exch);
            const auto fd = fvn_with_rule(set, op, dep);
            for (std::size_t l = 0; l < L; ++l) {
                we[r * L + l] = alpha_cut(fe.normalized, 1.0 - cfg.levels[l]).measure;
                wd[r * L + l] = alpha_cut(fd.normalized, 1.0 - cfg.levels[l]).measure;
            }
        }
    });
    std::vector<EfficiencyRow> rows;
    for (std::size_t l = 0; l < L; ++l) {
        EfficiencyRow row{cfg.levels[l], 0.0, 0.0, 0};
        for (std::size_t r = 0; r < R; ++r) {
            row.mean_exch += we[r * L + l];
            row.mean_dep += wd[r * L + l];
            if (we[r * L + l] > wd[r * L + l] + 1e-9) ++row.exch_wider;
        }
        row.mean_exch /= static_cast<double>(R);
        row.mean_dep /= static_cast<double>(R);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace possfuse
