#pragma once

#include <cstdint>
#include <vector>

#include "nnreflex/rng.hpp"
#include "nnreflex/tables.hpp"
#include "nnreflex/test_result.hpp"

namespace nnreflex {

/// Central hypergeometric law of the (1,1) cell of a 2x2 table with row sums
/// n1, n2 and first column sum c1.
struct HypergeomSpec {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t c1 = 0;

  std::int64_t support_min() const { return c1 > n2 ? c1 - n2 : 0; }
  std::int64_t support_max() const { return n1 < c1 ? n1 : c1; }
};

/// P(T = t) under independence, evaluated in log space. Zero outside the
/// support. Throws std::invalid_argument for negative margins or c1 > n1 + n2.
double hypergeom_pmf(const HypergeomSpec& spec, std::int64_t t);

/// The pmf over [support_min, support_max], renormalized to sum to one.
std::vector<double> hypergeom_support_pmf(const HypergeomSpec& spec);

/// One-sided Fisher exact test p-values on a 2x2 NN-RCT.
struct ExactResult {
  double p_inclusive = 1.0;
  double p_exclusive = 0.0;
  double p_mid = 0.5;
  double p_tocher = 1.0;
  /// Probability of the observed table.
  double p_table = 0.0;
  /// (n11 n22) / (n12 n21); +inf or NaN when the denominator vanishes.
  double odds_ratio = 0.0;
  Alternative alternative = Alternative::right;
  /// Whether Tocher's rule drew a uniform variate.
  bool tocher_randomized = false;
  /// Whether non-integral (tie-weighted) cells were rounded.
  bool rounded = false;
};

/// Right: H_a theta > 1, extreme tables have larger n11. Left: theta < 1.
/// Tocher's correction draws one uniform from rng only when
/// p_exclusive < alpha <= p_inclusive.
ExactResult fisher_one_sided(const NnRct& t, Alternative alternative, double alpha, Rng& rng);

}  // namespace nnreflex
