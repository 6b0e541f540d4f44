#include "nnreflex/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nnreflex/distributions.hpp"

namespace nnreflex {

namespace {

constexpr double kMaxCondition = 1e12;

double z_pvalue(double z, Alternative alt) {
  switch (alt) {
    case Alternative::right:
      return normal_sf(z).value;
    case Alternative::left:
      return normal_cdf(z).value;
    case Alternative::two_sided:
      break;
  }
  return std::min(1.0, 2.0 * normal_sf(std::fabs(z)).value);
}

void require_margins(const NnRct& t, const char* what) {
  if (!(t.reflexive() > 0.0 && t.nonreflexive() > 0.0 && t.self() > 0.0 && t.mixed() > 0.0)) {
    throw UndefinedStatistic(std::string(what) + ": a row or column of the NN-RCT is zero");
  }
}

TestResult standardized(std::string name, double observed, double expected, double variance,
                        Alternative alt) {
  // Variances of integer counts are either 0 or well above rounding noise.
  if (!(variance > 1e-12 * std::max(1.0, expected * expected))) {
    throw UndefinedStatistic(name + ": null variance is zero");
  }
  TestResult r;
  r.name = std::move(name);
  r.statistic = (observed - expected) / std::sqrt(variance);
  r.alternative = alt;
  r.p_asymptotic = z_pvalue(r.statistic, alt);
  r.reference = "N(0,1)";
  r.diagnostics = {{"observed", observed}, {"expected", expected}, {"variance", variance}};
  return r;
}

}  // namespace

TestResult pielou_chi2(const NnRct& t, bool continuity_correction) {
  require_margins(t, "pielou_chi2");
  const double n = t.total();
  const double observed[4] = {t.self_reflexive, t.mixed_reflexive, t.self_nonreflexive,
                              t.mixed_nonreflexive};
  const double expected[4] = {t.self() * t.reflexive() / n, t.mixed() * t.reflexive() / n,
                              t.self() * t.nonreflexive() / n, t.mixed() * t.nonreflexive() / n};
  double correction = 0.0;
  if (continuity_correction) {
    correction = 0.5;
    for (int c = 0; c < 4; ++c) correction = std::min(correction, std::fabs(observed[c] - expected[c]));
  }
  double x2 = 0.0;
  for (int c = 0; c < 4; ++c) {
    const double dev = std::fabs(observed[c] - expected[c]) - correction;
    x2 += dev * dev / expected[c];
  }
  TestResult r;
  r.name = continuity_correction ? "pielou_chi2_yates" : "pielou_chi2";
  r.statistic = x2;
  r.alternative = Alternative::two_sided;
  r.p_asymptotic = chi2_sf(x2, 1.0).value;
  r.reference = "chi2(1)";
  r.diagnostics = {{"expected_self_reflexive", expected[0]},
                   {"expected_mixed_reflexive", expected[1]},
                   {"expected_self_nonreflexive", expected[2]},
                   {"expected_mixed_nonreflexive", expected[3]}};
  return r;
}

TestResult z_directional(const NnRct& t, Alternative alternative) {
  require_margins(t, "z_directional");
  const double n = t.total();
  const double z = (t.self_reflexive / t.reflexive() - t.self_nonreflexive / t.nonreflexive()) *
                   std::sqrt(t.reflexive() * t.nonreflexive() * n / (t.self() * t.mixed()));
  TestResult r;
  r.name = "z_dir";
  r.statistic = z;
  r.alternative = alternative;
  r.p_asymptotic = z_pvalue(z, alternative);
  r.reference = "N(0,1)";
  return r;
}

ReflexivityMoments reflexivity_moments(std::span<const std::size_t> class_sizes, const NnRct& t) {
  const double n = std::accumulate(class_sizes.begin(), class_sizes.end(), 0.0);
  if (n < 2.0) throw std::invalid_argument("reflexivity_moments: need at least two points");
  if (!(t.reflexive() > 0.0) || !(t.nonreflexive() > 0.0)) {
    throw UndefinedStatistic("reflexivity_moments: no reflexive or no non-reflexive pairs");
  }
  double sum_sq = 0.0;
  for (std::size_t ni : class_sizes) sum_sq += static_cast<double>(ni) * static_cast<double>(ni);
  ReflexivityMoments m;
  const double pairs = n * (n - 1.0);
  m.p_self_reflexive = (sum_sq - n) / pairs;
  // sum_{i != j} n_i n_j = n^2 - sum n_i^2
  m.p_mixed_nonreflexive = (n * n - sum_sq) / pairs;
  m.expected_self_reflexive = t.reflexive() * m.p_self_reflexive;
  m.var_self_reflexive = 2.0 * t.reflexive() * m.p_self_reflexive * (1.0 - m.p_self_reflexive);
  m.expected_mixed_nonreflexive = t.nonreflexive() * m.p_mixed_nonreflexive;
  m.var_mixed_nonreflexive =
      t.nonreflexive() * m.p_mixed_nonreflexive * (1.0 - m.p_mixed_nonreflexive);
  return m;
}

ReflexivityMoments reflexivity_moments(const PointSet& ps, const NnRct& t) {
  return reflexivity_moments(ps.class_sizes(), t);
}

TestResult z_self_reflexivity(const NnRct& t, const ReflexivityMoments& m, Alternative alternative) {
  auto r = standardized("z_self_reflexive", t.self_reflexive, m.expected_self_reflexive,
                        m.var_self_reflexive, alternative);
  r.diagnostics["p_self_reflexive"] = m.p_self_reflexive;
  return r;
}

TestResult z_mixed_nonreflexivity(const NnRct& t, const ReflexivityMoments& m,
                                  Alternative alternative) {
  auto r = standardized("z_mixed_nonreflexive", t.mixed_nonreflexive, m.expected_mixed_nonreflexive,
                        m.var_mixed_nonreflexive, alternative);
  r.diagnostics["p_mixed_nonreflexive"] = m.p_mixed_nonreflexive;
  return r;
}

TestResult chi2_reflexivity(const NnRct& t, const ReflexivityMoments& m) {
  const auto zs = z_self_reflexivity(t, m, Alternative::two_sided);
  const auto zm = z_mixed_nonreflexivity(t, m, Alternative::two_sided);
  TestResult r;
  r.name = "chi2_reflexivity";
  r.statistic = zs.statistic * zs.statistic + zm.statistic * zm.statistic;
  r.alternative = Alternative::two_sided;
  r.p_asymptotic = chi2_sf(r.statistic, 2.0).value;
  r.reference = "chi2(2)";
  r.diagnostics = {{"z_self_reflexive", zs.statistic}, {"z_mixed_nonreflexive", zm.statistic}};
  return r;
}

SpeciesMoments species_moments(std::span<const std::size_t> class_sizes, double q, double r) {
  const std::size_t k = class_sizes.size();
  const double n = std::accumulate(class_sizes.begin(), class_sizes.end(), 0.0);
  if (n < 2.0) throw std::invalid_argument("species_moments: need at least two points");
  SpeciesMoments m;
  m.n = n;
  m.q = q;
  m.r = r;
  m.p_ii.resize(k);
  m.p_iii.resize(k, 0.0);
  m.p_iiii.resize(k, 0.0);
  m.p_iijj.assign(k * k, 0.0);
  m.expected_self.resize(k);
  m.covariance.assign(k * k, 0.0);
  if (n < 4.0) m.warnings.emplace_back("fewer than four points: quartet probabilities set to zero");

  for (std::size_t i = 0; i < k; ++i) {
    const double ni = static_cast<double>(class_sizes[i]);
    m.p_ii[i] = ni * (ni - 1.0) / (n * (n - 1.0));
    if (n >= 3.0) m.p_iii[i] = m.p_ii[i] * (ni - 2.0) / (n - 2.0);
    if (n >= 4.0) m.p_iiii[i] = m.p_iii[i] * (ni - 3.0) / (n - 3.0);
    m.expected_self[i] = ni * (ni - 1.0) / (n - 1.0);
  }
  const double quartet_pairs = n * n - 3.0 * n - q + r;
  for (std::size_t i = 0; i < k; ++i) {
    m.covariance[i * k + i] = (n + r) * m.p_ii[i] + (2.0 * n - 2.0 * r + q) * m.p_iii[i] +
                              quartet_pairs * m.p_iiii[i] - n * n * m.p_ii[i] * m.p_ii[i];
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      if (n >= 4.0) {
        const double ni = static_cast<double>(class_sizes[i]);
        const double nj = static_cast<double>(class_sizes[j]);
        m.p_iijj[i * k + j] =
            ni * (ni - 1.0) * nj * (nj - 1.0) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
      }
      m.covariance[i * k + j] = quartet_pairs * m.p_iijj[i * k + j] - n * n * m.p_ii[i] * m.p_ii[j];
    }
  }
  return m;
}

SpeciesMoments species_moments(const PointSet& ps, const NnGraph& g) {
  if (g.size() != ps.size()) throw std::invalid_argument("species_moments: graph built for another point set");
  auto m = species_moments(ps.class_sizes(), g.q(), g.r());
  if (g.has_ties()) m.warnings.emplace_back("NN ties present: moments assume unique NNs");
  return m;
}

TestResult z_cell_specific(const Scct& scct, const SpeciesMoments& m, ClassId cls,
                           Alternative alternative) {
  if (cls >= scct.num_classes() || cls >= m.num_classes()) {
    throw std::invalid_argument("z_cell_specific: class out of range");
  }
  auto r = standardized("z_cell", scct.self[cls], m.expected_self[cls], m.var_self(cls), alternative);
  r.class_index = static_cast<std::size_t>(cls) + 1;
  return r;
}

std::vector<double> invert_symmetric(std::span<const double> matrix, std::size_t k, double& condition) {
  std::vector<double> a(matrix.begin(), matrix.end());
  std::vector<double> inv(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) inv[i * k + i] = 1.0;
  double norm_a = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < k; ++i) col += std::fabs(a[i * k + j]);
    norm_a = std::max(norm_a, col);
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pivot = c;
    for (std::size_t i = c + 1; i < k; ++i) {
      if (std::fabs(a[i * k + c]) > std::fabs(a[pivot * k + c])) pivot = i;
    }
    if (a[pivot * k + c] == 0.0) throw UndefinedStatistic("covariance matrix is singular");
    if (pivot != c) {
      for (std::size_t j = 0; j < k; ++j) {
        std::swap(a[c * k + j], a[pivot * k + j]);
        std::swap(inv[c * k + j], inv[pivot * k + j]);
      }
    }
    const double d = a[c * k + c];
    for (std::size_t j = 0; j < k; ++j) {
      a[c * k + j] /= d;
      inv[c * k + j] /= d;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (i == c) continue;
      const double f = a[i * k + c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j) {
        a[i * k + j] -= f * a[c * k + j];
        inv[i * k + j] -= f * inv[c * k + j];
      }
    }
  }
  double norm_inv = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < k; ++i) col += std::fabs(inv[i * k + j]);
    norm_inv = std::max(norm_inv, col);
  }
  condition = norm_a * norm_inv;
  return inv;
}

TestResult species_correspondence_overall(const Scct& scct, const SpeciesMoments& m,
                                          std::span<const ClassId> classes) {
  const std::size_t k_all = m.num_classes();
  if (scct.num_classes() != k_all) {
    throw std::invalid_argument("species_correspondence_overall: table and moments disagree on k");
  }
  std::vector<ClassId> subset(classes.begin(), classes.end());
  if (subset.empty()) {
    subset.resize(k_all);
    std::iota(subset.begin(), subset.end(), ClassId{0});
  }
  const std::size_t k = subset.size();
  std::vector<double> dev(k);
  std::vector<double> sigma(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    if (subset[a] >= k_all) throw std::invalid_argument("species_correspondence_overall: bad class");
    dev[a] = scct.self[subset[a]] - m.expected_self[subset[a]];
    for (std::size_t b = 0; b < k; ++b) sigma[a * k + b] = m.cov_self(subset[a], subset[b]);
  }
  double condition = 0.0;
  const auto inv = invert_symmetric(sigma, k, condition);
  if (!(condition <= kMaxCondition)) {
    throw UndefinedStatistic("species_correspondence_overall: covariance matrix is ill-conditioned");
  }
  double form = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) form += dev[a] * inv[a * k + b] * dev[b];
  }
  TestResult r;
  r.name = "species_overall";
  // A positive definite form is non-negative; clip rounding residue at zero.
  r.statistic = std::max(0.0, form);
  r.alternative = Alternative::two_sided;
  r.p_asymptotic = chi2_sf(r.statistic, static_cast<double>(k)).value;
  r.reference = "chi2(" + std::to_string(k) + ")";
  r.diagnostics = {{"df", static_cast<double>(k)}, {"condition", condition}, {"q", m.q}, {"r", m.r}};
  return r;
}

}  // namespace nnreflex
