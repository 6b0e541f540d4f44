#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnreflex/nn_graph.hpp"
#include "nnreflex/point_set.hpp"
#include "nnreflex/rng.hpp"
#include "nnreflex/stat_tests.hpp"
#include "nnreflex/tables.hpp"
#include "nnreflex/test_result.hpp"

namespace nnreflex {

enum class StatisticKind {
  pielou_chi2,
  pielou_chi2_yates,
  z_directional,
  fisher_exact,
  chi2_reflexivity,
  z_self_reflexive,
  z_mixed_nonreflexive,
  species_overall,
  z_cell,
};

std::string_view to_string(StatisticKind kind);

/// A statistic together with the alternative it is tested against.
struct StatisticSpec {
  StatisticKind kind = StatisticKind::chi2_reflexivity;
  Alternative alternative = Alternative::two_sided;
  /// Class for z_cell.
  ClassId cls = 0;
  /// Row subset for species_overall; empty means all rows.
  std::vector<ClassId> classes;
};

/// Tables of one labeling on a fixed NN graph.
struct LabelTables {
  NnRct rct;
  Scct scct;
};

/// Everything that stays fixed when labels are permuted over fixed locations.
struct NullContext {
  std::vector<std::size_t> class_sizes;
  SpeciesMoments species;
  double alpha = 0.05;
};

/// Full result of one statistic. Statistics that cannot be computed come
/// back with `error` set and a NaN statistic.
TestResult evaluate_statistic(const StatisticSpec& spec, const LabelTables& tables,
                              const NullContext& context, Rng* tocher_rng = nullptr);

/// Just the statistic value; NaN when undefined. For fisher_exact this is the
/// sample odds ratio.
double statistic_value(const StatisticSpec& spec, const LabelTables& tables,
                       const NullContext& context);

/// Which families of tests to run.
struct TestSelection {
  bool pielou = true;      // chi-square and Z_dir on the NN-RCT
  bool exact = true;       // one-sided Fisher tests on the NN-RCT
  bool reflexivity = true; // Z_sr, Z_mnr, chi2_R
  bool species = true;     // N_I and cell-specific Z_ii

  /// Comma list of "pielou", "exact", "reflexivity", "scc", "all".
  static TestSelection parse(std::string_view text);
};

/// The statistics reported for one data set, in the usual layout: X2_P (plain
/// and Yates), Z_dir both sides, Fisher both sides, X2_R, Z_sr right,
/// Z_mnr left, N_I, and Z_ii right for every class.
std::vector<StatisticSpec> battery_plan(std::size_t num_classes, const TestSelection& selection);

struct BatteryOptions {
  double alpha = 0.05;
  Weighting weighting = Weighting::ordered_edge;
  double tie_epsilon = 0.0;
  std::uint64_t seed = 0;
  TestSelection selection;
};

/// One data set prepared for testing: geometry, tables and null moments.
struct Analysis {
  std::string comparison = "overall";
  PointSet points;
  NnGraph graph;
  LabelTables tables;
  NullContext context;
  std::vector<StatisticSpec> plan;
  std::vector<std::string> warnings;
};

Analysis prepare_analysis(PointSet points, const BatteryOptions& options,
                          std::string comparison = "overall");

/// Builds the tables of a labeling on the analysis' fixed graph.
LabelTables label_tables(std::span<const ClassId> labels, std::size_t num_classes,
                         const NnGraph& graph, std::span<const double> weights, Weighting weighting);

/// Evaluates the plan on the observed labels. Tocher's draw uses a stream
/// derived from options.seed.
std::vector<TestResult> run_analysis(const Analysis& analysis, const BatteryOptions& options);

enum class PosthocMode { pairwise_restricted, pairwise_unrestricted, one_vs_rest };

std::string_view to_string(PosthocMode mode);
PosthocMode parse_posthoc_mode(std::string_view text);

/// Analyses for the post-hoc comparisons of a k-class pattern. For k = 2 the
/// overall analysis is returned unchanged. Restricted pairwise comparisons
/// drop the other classes, so Q and R come from the two classes only;
/// unrestricted comparisons keep every point and test rows i and j of the
/// full SCCT, while the NN-RCT tests (which have no such distinction) are run
/// on the two-class subset. Comparisons with a class of fewer than two points
/// are skipped and noted in `warnings`.
std::vector<Analysis> posthoc_analyses(const PointSet& ps, PosthocMode mode,
                                       const BatteryOptions& options,
                                       std::vector<std::string>* warnings = nullptr);

/// Convenience wrapper: prepare and run every post-hoc analysis.
std::vector<TestResult> posthoc_battery(const PointSet& ps, PosthocMode mode,
                                        const BatteryOptions& options,
                                        std::vector<std::string>* warnings = nullptr);

}  // namespace nnreflex
