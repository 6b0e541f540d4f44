#pragma once

#include <cstdint>

namespace nnreflex {

/// A probability together with the absolute error bound of the routine that
/// produced it.
struct TailProb {
  double value = 0.0;
  double accuracy = 1e-12;
};

TailProb normal_cdf(double z);
/// Upper tail P(Z > z), computed directly rather than as 1 - cdf.
TailProb normal_sf(double z);
double normal_quantile(double p);

TailProb chi2_cdf(double x, double df);
TailProb chi2_sf(double x, double df);
double chi2_quantile(double p, double df);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// log(m!). Table lookup for m <= 10^4, lgamma beyond.
double log_factorial(std::int64_t m);

}  // namespace nnreflex
