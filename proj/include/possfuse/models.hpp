#pragma once

// Exponential-rate meta-analysis: per-study relative-likelihood IMs, the
// pooled oracle, the large-sample chi-square contour and the weighted-average
// fused IM.
//
// Everything runs through the pivot W = theta * sum(Z) ~ Gamma(n, 1). The
// relative likelihood at theta is (W/n)^n e^{n-W}, unimodal in W with its
// peak at W = n, and the observed pivot is w_obs = theta * n / mle.

#include "possfuse/fvn.hpp"
#include "possfuse/grid_contour.hpp"
#include "possfuse/validify.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace possfuse {

struct StudySummary {
    double mle = 1.0;
    int n = 1;
};

// Throws ValidationError unless mle > 0 (finite) and n >= 1.
void check_summary(const StudySummary& s);

// (theta/mle)^n exp(n (1 - theta/mle)).
double exp_rel_likelihood(double theta, const StudySummary& s);

// P{R(W) <= R(w_obs)} for W ~ Gamma(n,1): one root of the level equation is
// w_obs itself, the other is found by safeguarded Newton on the
// log-likelihood scale (bisection fallback, absolute tolerance 1e-10 in w).
// Brackets start at [1e-12 n, n] and [n, n + 50 sqrt(n)] and are widened
// geometrically if the level lies outside; NumericError if that fails.
double exp_pivot_value(double w_obs, int n);

enum class ExpImMethod { roots, mc };

struct ExpImOptions {
    ExpImMethod method = ExpImMethod::roots;
    std::size_t reps = 100000;  // mc only
    std::uint64_t seed = 42;    // mc only
};

Contour exp_im_contour(const GridPtr& grid, const StudySummary& s, const ExpImOptions& opts = {});

// N = sum n_k, mle = N / sum(n_k / mle_k).
StudySummary pool_summaries(std::span<const StudySummary> s);
Contour exp_oracle_im(const GridPtr& grid, std::span<const StudySummary> s);

struct LargeSampleFit {
    double center = 0.0;  // J^-1 sum n_k / mle_k
    double info = 0.0;    // J = sum n_k / mle_k^2
};
LargeSampleFit large_sample_fit(std::span<const StudySummary> s);
// 1 - F_chisq1(J (center - theta)^2), not forced to peak at 1
double large_sample_value(double theta, const LargeSampleFit& fit);
// The grid point nearest the center is set to 1 so this is a proper contour.
Contour large_sample_im(const GridPtr& grid, std::span<const StudySummary> s);

// n_k / mle_k^2, rescaled to sum to one.
std::vector<double> inverse_variance_weights(std::span<const StudySummary> s);

// B draws of the wavg-fused value at the true parameter. Pivotal version:
// G_k ~ Gamma(n_k), pi_k = exp_pivot_value(G_k, n_k), weights G_k^2 / n_k.
std::vector<double> wavg_pivot_sample(std::span<const int> n, std::size_t B, std::uint64_t seed);
// Direct version at a given theta: simulate the MLEs, build each study's
// contour value at theta from exp_rel_likelihood's level set and weigh by
// n_k / mle_k^2. Used to check that theta drops out.
std::vector<double> wavg_direct_sample(double theta, std::span<const int> n, std::size_t B, std::uint64_t seed);

// Monte Carlo validification rule built from wavg_pivot_sample; B >= 1e4.
ValidificationRule meta_wavg_rule(std::span<const int> n, std::size_t B, std::uint64_t seed);

// Per-study contours as a set (K >= 2).
ContourSet study_contours(const GridPtr& grid, std::span<const StudySummary> s);

// wavg fusion of the study contours with inverse-variance weights, validified
// by the pivotal table, normalized.
FusedResult meta_wavg_fused(const GridPtr& grid, std::span<const StudySummary> s, std::size_t B, std::uint64_t seed);
// Same with a prebuilt table (its K must match; n must match the template).
FusedResult meta_wavg_fused(const ContourSet& studies, std::span<const StudySummary> s,
                            const ValidificationRule& table);

// avg fusion under independence with the exact Irwin-Hall rule.
FusedResult meta_avg_fused(const ContourSet& studies);

}  // namespace possfuse
