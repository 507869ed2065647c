#pragma once

// Seeded Monte Carlo audits: empirical validity curves, interval widths, the
// comonotone counterexample and the meta-analysis simulations.
//
// Replicates are stored by index and aggregated afterwards, so reports are
// identical for any POSSFUSE_THREADS.

#include "possfuse/fusion_ops.hpp"
#include "possfuse/models.hpp"
#include "possfuse/sampler.hpp"
#include "possfuse/validify.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace possfuse {

// {0.01, 0.02, ..., 0.99}
std::vector<double> default_alpha_grid();

// tolerance sqrt(ln(2/delta) / (2B))
double dkw_bound(std::size_t B, double delta = 0.01);

struct AuditReport {
    std::vector<double> alpha_grid;
    std::vector<double> empirical_cdf;  // share of values <= alpha
    double max_violation = 0.0;         // max over the grid of empirical - alpha
    double max_abs_deviation = 0.0;     // max over the grid of |empirical - alpha|
    double ks_violation = 0.0;          // sup over all t in [0,1] of empirical(t) - t
    double ks_distance = 0.0;           // sup over all t in [0,1] of |empirical(t) - t|
    std::size_t B = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> config;  // key=value provenance lines
};

// Builds a report from per-replicate values (any order).
AuditReport summarize(std::vector<double> values, std::span<const double> alpha_grid, std::uint64_t seed);

// alpha,empirical_cdf,violation with the config as comment lines.
std::string format_report_csv(const AuditReport& r);

// B joint draws from the sampler, fused (prefix-fused when the rule asks for
// it), validified with the rule; returns the validified values.
std::vector<double> validity_sample(const FusionOperator& op, const ValidificationRule& rule, std::size_t K,
                                    const JointSampler& sampler, std::size_t B, std::uint64_t seed);

AuditReport validity_curve(const FusionOperator& op, Regime regime, Method method, std::size_t K,
                           const JointSampler& sampler, std::size_t B, std::uint64_t seed,
                           std::span<const double> alpha_grid, const McOptions& mc = {});

// Comonotone U; reports the CDF of min{1, c U^K} (the product of K equal
// uniforms). The lprod variant reports min{1, c max{0, K U - K + 1}}, which
// is 0 with probability (K-1)/K.
enum class ImpossibilityVariant { prod, lprod };
AuditReport impossibility_demo(double c, std::size_t K, std::span<const double> alpha_grid, std::size_t B,
                               std::uint64_t seed, ImpossibilityVariant variant = ImpossibilityVariant::prod);
// {1e-4, 1e-3} followed by default_alpha_grid()
std::vector<double> impossibility_alpha_grid();

// Width table rows: level is the confidence level 1 - alpha.
struct WidthRow {
    double level = 0.0;
    std::string method;
    double mean_width = 0.0;
    double stderr_width = 0.0;
};
std::string format_width_csv(const std::vector<WidthRow>& rows, const std::vector<std::string>& config);

struct MetaSimConfig {
    std::size_t reps = 10000;
    std::uint64_t seed = 42;
    double theta_true = 0.8;
    std::vector<int> n = {3, 6, 9};
    std::vector<double> levels = {0.1, 0.3, 0.5, 0.7, 0.9};
    GridPtr grid;                    // defaults to 0.005:8:0.005 when null
    std::size_t table_reps = 100000; // wavg validification draws
};

GridPtr default_table4_grid();

// Simulates reps meta-analyses at theta_true and reports mean alpha-cut
// widths of the avg-based FVN contour (independent, exact) and the wavg
// fused contour, both normalized. Methods are named "average" and
// "weighted-average".
std::vector<WidthRow> table4(const MetaSimConfig& cfg);

struct LargeSampleAudit {
    AuditReport large_sample;  // raw chi-square contour at theta_true
    AuditReport avg_fvn;       // validified avg ranking at theta_true
    AuditReport wavg;          // validified wavg ranking at theta_true
};
LargeSampleAudit large_sample_invalidity(const MetaSimConfig& cfg, std::span<const double> alpha_grid);

// Synthetic location model for efficiency checks: member k carries the
// contour erfc(|theta - X_k| / sqrt 2) with X_k = Phi^-1(U_k) for a joint
// draw U from the sampler. The true value is 0, where member k equals
// 2 min(U_k, 1 - U_k), uniform whenever U_k is, and the members inherit the
// sampler's exchangeability.
struct EfficiencyConfig {
    OpKind op = OpKind::avg;
    std::size_t K = 3;
    JointSampler sampler = JointSampler::gauss_copula(0.5);
    std::size_t reps = 2000;
    std::uint64_t seed = 42;
    std::vector<double> levels = {0.1, 0.3, 0.5, 0.7, 0.9};
    GridPtr grid;  // defaults to -8:8:0.01
};

struct EfficiencyRow {
    double level = 0.0;
    double mean_exch = 0.0;
    double mean_dep = 0.0;
    std::size_t exch_wider = 0;  // replicates where the exchangeable cut is wider
};

// Paired widths of exchangeable pmerge FVN against dependent pmerge FVN.
std::vector<EfficiencyRow> efficiency_exch_vs_dep(const EfficiencyConfig& cfg);

}  // namespace possfuse
