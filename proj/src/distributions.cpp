#include "nnreflex/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnreflex {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2Pi = 2.50662827463100050242;
constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-16;

// Acklam's rational approximation; relative error about 1e-9 before refinement.
double acklam_quantile(double p) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxIterations; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by modified Lentz continued fraction; for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void require_probability(double p, const char* fn) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(fn) + ": probability must lie in (0,1), got " +
                            std::to_string(p));
  }
}

void require_df(double df, const char* fn) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw std::domain_error(std::string(fn) + ": degrees of freedom must be positive");
  }
}

std::vector<double> make_log_factorial_table() {
  std::vector<double> table(10001);
  table[0] = 0.0;
  for (std::size_t m = 1; m < table.size(); ++m) {
    table[m] = table[m - 1] + std::log(static_cast<double>(m));
  }
  return table;
}

}  // namespace

TailProb normal_cdf(double z) {
  if (std::isnan(z)) throw std::domain_error("normal_cdf: NaN argument");
  return {0.5 * std::erfc(-z / kSqrt2), 1e-15};
}

TailProb normal_sf(double z) {
  if (std::isnan(z)) throw std::domain_error("normal_sf: NaN argument");
  return {0.5 * std::erfc(z / kSqrt2), 1e-15};
}

double normal_quantile(double p) {
  require_probability(p, "normal_quantile");
  double x = acklam_quantile(p);
  // One Halley step against the erfc-based cdf brings the error to rounding level.
  const double e = (p < 0.5) ? normal_cdf(x).value - p : (1.0 - p) - normal_sf(x).value;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

TailProb chi2_cdf(double x, double df) {
  require_df(df, "chi2_cdf");
  if (std::isnan(x)) throw std::domain_error("chi2_cdf: NaN argument");
  if (x <= 0.0) return {0.0, 0.0};
  return {gamma_p(0.5 * df, 0.5 * x), 1e-13};
}

TailProb chi2_sf(double x, double df) {
  require_df(df, "chi2_sf");
  if (std::isnan(x)) throw std::domain_error("chi2_sf: NaN argument");
  if (x <= 0.0) return {1.0, 0.0};
  return {gamma_q(0.5 * df, 0.5 * x), 1e-13};
}

double chi2_quantile(double p, double df) {
  require_probability(p, "chi2_quantile");
  require_df(df, "chi2_quantile");
  // Upper-half probabilities are matched on the survival function so that
  // 1 - p does not lose digits.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  auto below_target = [&](double x) {
    return upper ? chi2_sf(x, df).value > target : chi2_cdf(x, df).value < target;
  };
  double lo = 0.0;
  double hi = std::max(1.0, df);
  while (below_target(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::domain_error("chi2_quantile: failed to bracket");
  }
  for (int i = 0; i < 2000 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (below_target(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double log_factorial(std::int64_t m) {
  if (m < 0) throw std::domain_error("log_factorial: negative argument");
  static const std::vector<double> table = make_log_factorial_table();
  if (static_cast<std::size_t>(m) < table.size()) return table[static_cast<std::size_t>(m)];
  return std::lgamma(static_cast<double>(m) + 1.0);
}

}  // namespace nnreflex
