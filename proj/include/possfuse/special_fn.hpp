#pragma once

// Closed-form distribution functions behind exact validification under
// independence. All are pure and thread-safe.

namespace possfuse {

// Largest number of summed uniforms the Irwin-Hall routines accept.
inline constexpr int kIrwinHallMaxK = 60;

// Density of the sum of K iid Unif(0,1). Zero outside [0,K].
double irwin_hall_pdf(double x, int K);

// H(x) = (1/K!) sum_{j<=floor(x)} (-1)^j C(K,j) (x-j)^K on [0,K]; 0 below, 1 above.
//
// K <= 25 evaluates the alternating sum directly with compensated summation
// (folding x > K/2 onto the short side); larger K switches to the convex
// recursion H_K(x) = (x H_{K-1}(x) + (K-x) H_{K-1}(x-1)) / K, which has no
// cancellation at all. The alternating sum alone loses ~1e-7 by K = 60.
double irwin_hall_cdf(double x, int K);

// Q(K, x) = P{Gamma(K,1) >= x} = e^{-x} sum_{j<K} x^j / j!, K >= 1, x >= 0.
double gamma_int_upper(int K, double x);

// 1 - Q(K, x), computed directly from the complementary series when that is
// the smaller side.
double gamma_int_lower(int K, double x);

// CDF of Beta(1,K): 1 - (1-t)^K on [0,1].
double beta_1K_cdf(double t, int K);

// CDF and survival function of ChiSq(1): erf / erfc of sqrt(x/2).
double chisq1_cdf(double x);
double chisq1_sf(double x);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace possfuse
