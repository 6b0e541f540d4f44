#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnreflex/battery.hpp"
#include "nnreflex/nn_graph.hpp"
#include "nnreflex/point_set.hpp"
#include "nnreflex/rng.hpp"

namespace nnreflex {

struct Window {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
};

enum class Family { csr, rl_uniform, rl_matern, alt_i, alt_ii, alt_iii, alt_iv, alt_v };

std::string_view to_string(Family family);
/// Accepts "csr", "rl-uniform", "rl-matern", "alt-I" .. "alt-V" (case-insensitive numerals).
Family parse_family(std::string_view text);

/// A point-pattern family with its parameters. Only the fields used by the
/// family matter:
///   alt-I    sigma (standard deviation of the Y cluster)
///   alt-II   p
///   alt-III  s
///   alt-IV   s (supports (0,1-s)^2 and (s,1)^2; s = 0 is the shared unit square) and r
///   alt-V    r
///   rl-matern kappa, r (cluster radius), mu
/// In alt-IV and alt-V a partnered point sits at distance U(0, r) from its
/// partner in a uniform direction. In alt-V the partner is drawn uniformly
/// (with replacement) from class 1.
/// Coordinates are given for the unit square and mapped affinely onto `window`.
struct PatternSpec {
  Family family = Family::csr;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double sigma = 0.1;
  double p = 0.5;
  double s = 0.0;
  double r = 0.1;
  double kappa = 10.0;
  double mu = 10.0;
  Window window;

  /// Throws std::invalid_argument when a parameter is outside its family's domain.
  void validate() const;
  bool is_null() const { return family == Family::csr || is_random_labeling(); }
  bool is_random_labeling() const { return family == Family::rl_uniform || family == Family::rl_matern; }
  /// The family's parameters as "name=value" pairs joined by ';'. Empty for csr and rl-uniform.
  std::string parameters() const;
};

/// One realization. Labels are class 0 for the first n1 points and class 1
/// for the rest; for rl-matern n1 = floor(n/2) of the realized n. A Matern
/// realization with fewer than four points is redrawn (up to 100 times) and
/// a note is appended to `warnings`.
PointSet generate(const PatternSpec& spec, Rng& rng, std::vector<std::string>* warnings = nullptr);

/// Same locations, labels uniformly permuted.
PointSet random_label(const PointSet& ps, Rng& rng);

/// Fisher-Yates shuffle in place using rng.uniform_index.
void shuffle_labels(std::span<ClassId> labels, Rng& rng);

/// Geometry of one pattern fixed once; tables of any relabeling computed in O(n).
class RelabelEngine {
 public:
  RelabelEngine(const NnGraph& graph, std::span<const ClassId> labels, std::size_t num_classes,
                Weighting weighting, NullContext context);
  explicit RelabelEngine(const Analysis& analysis, Weighting weighting);

  const NullContext& context() const { return context_; }
  LabelTables observed() const;
  /// Permutes a copy of the original labels with rng; `scratch` is reused storage.
  LabelTables relabel(Rng& rng, std::vector<ClassId>& scratch) const;

 private:
  NnGraph graph_;
  std::vector<double> weights_;
  std::vector<ClassId> labels_;
  std::size_t num_classes_;
  Weighting weighting_;
  NullContext context_;
};

/// True when `value` is at least as extreme as `observed` in the direction of
/// `alternative`; equal values (to a relative 1e-12) count as extreme.
/// Two-sided normal statistics compare absolute values; chi-square type
/// statistics are always upper-tailed.
bool at_least_as_extreme(double value, double observed, const StatisticSpec& spec);

struct RandomizationOutcome {
  std::optional<double> p_value;
  std::size_t replicates = 0;
  std::size_t undefined = 0;
  std::optional<std::string> error;
};

/// p = (1 + #extreme) / (n_mc + 1) for every statistic of `plan`, all from
/// the same relabelings. Replicate m draws from the stream (seed, stream, m).
/// A statistic that is undefined on the data or on more than 5% of the
/// replicates gets `error` instead of a p-value. Undefined replicates never
/// count as extreme.
std::vector<RandomizationOutcome> randomization_pvalues(const RelabelEngine& engine,
                                                        std::span<const StatisticSpec> plan,
                                                        std::size_t n_mc, std::uint64_t seed,
                                                        std::uint64_t stream = 0, unsigned workers = 1);

/// Single-statistic form.
double randomization_pvalue(const PointSet& ps, const StatisticSpec& statistic, std::size_t n_mc,
                            std::uint64_t seed, Weighting weighting = Weighting::ordered_edge,
                            double tie_epsilon = 0.0);

// ---------------------------------------------------------------------------
// Size and power harness.

enum class DecisionRule { asymptotic, fisher_inclusive, fisher_exclusive, fisher_mid, fisher_tocher };

/// A test as it appears in a simulation table: statistic, side and decision rule.
struct SimTest {
  std::string id;
  StatisticSpec spec;
  DecisionRule rule = DecisionRule::asymptotic;
};

/// Known ids: x2_p, x2_p_yates, z_dir_right, z_dir_left, x2_r, z_sr_right,
/// z_sr_left, z_mnr_right, z_mnr_left, n_i, z_11_right, z_11_left,
/// z_22_right, z_22_left, fisher_{right,left}_{inc,exc,mid,toc}.
SimTest sim_test(std::string_view id);
/// Comma list of ids or group names: "size" (the nine standard size
/// columns), "exact" (all eight Fisher variants), "power" (the power columns
/// with the sides suited to `family`), "all".
std::vector<SimTest> parse_sim_tests(std::string_view text, Family family);
std::vector<SimTest> default_size_tests();
std::vector<SimTest> default_power_tests(Family family);

struct SimulationOptions {
  std::size_t n_mc = 10000;
  /// Fixed location sets per random-labeling spec; n_mc relabelings each.
  std::size_t backgrounds = 100;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  Weighting weighting = Weighting::ordered_edge;
  double tie_epsilon = 0.0;
};

enum class SizeFlag { nominal, liberal, conservative };
std::string_view to_string(SizeFlag flag);

struct SimulationRow {
  PatternSpec spec;
  std::string test;
  std::size_t replicates = 0;
  /// Replicates on which the test was defined; the rate is over these.
  std::size_t defined = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double mc_se = 0.0;
  /// Binomial acceptance band alpha -/+ z_0.95 sqrt(alpha (1 - alpha) / defined); size runs only.
  std::optional<double> lower_band;
  std::optional<double> upper_band;
  std::optional<SizeFlag> flag;
};

struct SimulationReport {
  std::string kind;  // "size" or "power"
  SimulationOptions options;
  std::vector<SimulationRow> rows;
  std::vector<std::string> warnings;
};

/// Rejection rates under null families. csr draws n_mc fresh patterns per
/// spec; rl-* draws `backgrounds` patterns and relabels each n_mc times.
/// Streams: pattern (seed, spec index, replicate) for csr, background
/// (seed, spec index, b, 2^64-1) and relabeling (seed, spec index, b, m) for rl-*.
SimulationReport empirical_size(std::span<const PatternSpec> grid, std::span<const SimTest> tests,
                                const SimulationOptions& options);

/// Rejection rates under alternative families; n_mc fresh patterns per spec.
SimulationReport empirical_power(std::span<const PatternSpec> grid, std::span<const SimTest> tests,
                                 const SimulationOptions& options);

/// Binomial band for flagging size estimates.
std::pair<double, double> size_band(double alpha, std::size_t trials);

}  // namespace nnreflex
