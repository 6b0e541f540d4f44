#include "nnreflex/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nnreflex/distributions.hpp"

namespace nnreflex {

namespace {

void validate(const HypergeomSpec& spec) {
  if (spec.n1 < 0 || spec.n2 < 0 || spec.c1 < 0 || spec.c1 > spec.n1 + spec.n2) {
    throw std::invalid_argument("hypergeometric: invalid margins");
  }
}

double log_choose(std::int64_t n, std::int64_t k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

std::int64_t to_count(double v, bool& rounded) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument("fisher_one_sided: cells must be finite and non-negative");
  }
  const double r = std::nearbyint(v);  // default rounding mode: half to even
  if (r != v) rounded = true;
  return static_cast<std::int64_t>(r);
}

}  // namespace

double hypergeom_pmf(const HypergeomSpec& spec, std::int64_t t) {
  validate(spec);
  if (t < spec.support_min() || t > spec.support_max()) return 0.0;
  return std::exp(log_choose(spec.n1, t) + log_choose(spec.n2, spec.c1 - t) -
                  log_choose(spec.n1 + spec.n2, spec.c1));
}

std::vector<double> hypergeom_support_pmf(const HypergeomSpec& spec) {
  validate(spec);
  const std::int64_t lo = spec.support_min();
  const std::int64_t hi = spec.support_max();
  std::vector<double> pmf;
  pmf.reserve(static_cast<std::size_t>(hi - lo + 1));
  double total = 0.0;
  for (std::int64_t t = lo; t <= hi; ++t) {
    pmf.push_back(hypergeom_pmf(spec, t));
    total += pmf.back();
  }
  for (double& p : pmf) p /= total;
  return pmf;
}

ExactResult fisher_one_sided(const NnRct& t, Alternative alternative, double alpha, Rng& rng) {
  if (alternative == Alternative::two_sided) {
    throw std::invalid_argument("fisher_one_sided: only one-sided alternatives are supported");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("fisher_one_sided: alpha outside (0,1)");
  ExactResult r;
  r.alternative = alternative;
  const std::int64_t a = to_count(t.self_reflexive, r.rounded);
  const std::int64_t b = to_count(t.mixed_reflexive, r.rounded);
  const std::int64_t c = to_count(t.self_nonreflexive, r.rounded);
  const std::int64_t d = to_count(t.mixed_nonreflexive, r.rounded);

  const double num = static_cast<double>(a) * static_cast<double>(d);
  const double den = static_cast<double>(b) * static_cast<double>(c);
  r.odds_ratio = den > 0.0 ? num / den
                           : (num > 0.0 ? std::numeric_limits<double>::infinity()
                                        : std::numeric_limits<double>::quiet_NaN());

  const HypergeomSpec spec{a + b, c + d, a + c};
  const auto pmf = hypergeom_support_pmf(spec);
  const std::int64_t lo = spec.support_min();
  const auto observed = static_cast<std::size_t>(a - lo);

  double tail = 0.0;
  if (alternative == Alternative::right) {
    for (std::size_t i = observed; i < pmf.size(); ++i) tail += pmf[i];
  } else {
    for (std::size_t i = 0; i <= observed; ++i) tail += pmf[i];
  }
  r.p_table = pmf[observed];
  r.p_inclusive = std::min(1.0, tail);
  r.p_exclusive = std::max(0.0, r.p_inclusive - r.p_table);
  r.p_mid = r.p_inclusive - 0.5 * r.p_table;

  if (r.p_exclusive >= alpha) {
    r.p_tocher = r.p_inclusive;
  } else if (r.p_inclusive < alpha) {
    r.p_tocher = r.p_exclusive;
  } else {
    r.tocher_randomized = true;
    const double u = rng.uniform();
    r.p_tocher = u >= (alpha - r.p_exclusive) / r.p_table ? r.p_inclusive : r.p_exclusive;
  }
  return r;
}

}  // namespace nnreflex
