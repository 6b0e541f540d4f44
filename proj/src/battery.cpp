#include "nnreflex/battery.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "nnreflex/exact.hpp"

namespace nnreflex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TestResult fisher_result(const ExactResult& e) {
  TestResult r;
  r.name = "fisher_exact";
  r.statistic = e.odds_ratio;
  r.alternative = e.alternative;
  r.p_asymptotic = e.p_inclusive;
  r.reference = "hypergeometric";
  r.diagnostics["p_inclusive"] = e.p_inclusive;
  r.diagnostics["p_exclusive"] = e.p_exclusive;
  r.diagnostics["p_mid"] = e.p_mid;
  r.diagnostics["p_tocher"] = e.p_tocher;
  r.diagnostics["p_table"] = e.p_table;
  r.diagnostics["tocher_randomized"] = e.tocher_randomized ? 1.0 : 0.0;
  r.diagnostics["rounded"] = e.rounded ? 1.0 : 0.0;
  return r;
}

TestResult compute(const StatisticSpec& spec, const LabelTables& tables, const NullContext& context,
                   Rng* tocher_rng) {
  switch (spec.kind) {
    case StatisticKind::pielou_chi2:
      return pielou_chi2(tables.rct, false);
    case StatisticKind::pielou_chi2_yates:
      return pielou_chi2(tables.rct, true);
    case StatisticKind::z_directional:
      return z_directional(tables.rct, spec.alternative);
    case StatisticKind::fisher_exact: {
      Rng fallback(0);
      return fisher_result(
          fisher_one_sided(tables.rct, spec.alternative, context.alpha, tocher_rng ? *tocher_rng : fallback));
    }
    case StatisticKind::chi2_reflexivity:
      return chi2_reflexivity(tables.rct, reflexivity_moments(context.class_sizes, tables.rct));
    case StatisticKind::z_self_reflexive:
      return z_self_reflexivity(tables.rct, reflexivity_moments(context.class_sizes, tables.rct),
                                spec.alternative);
    case StatisticKind::z_mixed_nonreflexive:
      return z_mixed_nonreflexivity(tables.rct, reflexivity_moments(context.class_sizes, tables.rct),
                                    spec.alternative);
    case StatisticKind::species_overall:
      return species_correspondence_overall(tables.scct, context.species, spec.classes);
    case StatisticKind::z_cell:
      return z_cell_specific(tables.scct, context.species, spec.cls, spec.alternative);
  }
  throw std::logic_error("unknown statistic kind");
}

}  // namespace

std::string_view to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::pielou_chi2: return "x2_p";
    case StatisticKind::pielou_chi2_yates: return "x2_p_yates";
    case StatisticKind::z_directional: return "z_dir";
    case StatisticKind::fisher_exact: return "fisher";
    case StatisticKind::chi2_reflexivity: return "x2_r";
    case StatisticKind::z_self_reflexive: return "z_sr";
    case StatisticKind::z_mixed_nonreflexive: return "z_mnr";
    case StatisticKind::species_overall: return "n_i";
    case StatisticKind::z_cell: return "z_ii";
  }
  return "unknown";
}

TestResult evaluate_statistic(const StatisticSpec& spec, const LabelTables& tables,
                              const NullContext& context, Rng* tocher_rng) {
  TestResult r;
  try {
    r = compute(spec, tables, context, tocher_rng);
  } catch (const std::domain_error& e) {
    r = TestResult{};
    r.statistic = kNaN;
    r.alternative = spec.alternative;
    r.error = e.what();
  }
  r.name = std::string(to_string(spec.kind));
  if (spec.kind == StatisticKind::z_cell) r.class_index = spec.cls + 1;
  return r;
}

double statistic_value(const StatisticSpec& spec, const LabelTables& tables, const NullContext& context) {
  try {
    return compute(spec, tables, context, nullptr).statistic;
  } catch (const std::domain_error&) {
    return kNaN;
  }
}

TestSelection TestSelection::parse(std::string_view text) {
  TestSelection s{false, false, false, false};
  std::size_t start = 0;
  bool any = false;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    std::string_view item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "all") {
      s = TestSelection{};
    } else if (item == "pielou") {
      s.pielou = true;
    } else if (item == "exact") {
      s.exact = true;
    } else if (item == "reflexivity") {
      s.reflexivity = true;
    } else if (item == "scc" || item == "species") {
      s.species = true;
    } else {
      throw std::invalid_argument("unknown test family '" + std::string(item) + "'");
    }
    any = true;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (!any) throw std::invalid_argument("empty test selection");
  return s;
}

std::vector<StatisticSpec> battery_plan(std::size_t num_classes, const TestSelection& selection) {
  std::vector<StatisticSpec> plan;
  if (selection.pielou) {
    plan.push_back({StatisticKind::pielou_chi2, Alternative::two_sided, 0, {}});
    plan.push_back({StatisticKind::pielou_chi2_yates, Alternative::two_sided, 0, {}});
    plan.push_back({StatisticKind::z_directional, Alternative::right, 0, {}});
    plan.push_back({StatisticKind::z_directional, Alternative::left, 0, {}});
  }
  if (selection.exact) {
    plan.push_back({StatisticKind::fisher_exact, Alternative::right, 0, {}});
    plan.push_back({StatisticKind::fisher_exact, Alternative::left, 0, {}});
  }
  if (selection.reflexivity) {
    plan.push_back({StatisticKind::chi2_reflexivity, Alternative::two_sided, 0, {}});
    plan.push_back({StatisticKind::z_self_reflexive, Alternative::right, 0, {}});
    plan.push_back({StatisticKind::z_mixed_nonreflexive, Alternative::left, 0, {}});
  }
  if (selection.species) {
    plan.push_back({StatisticKind::species_overall, Alternative::two_sided, 0, {}});
    for (std::size_t c = 0; c < num_classes; ++c) {
      plan.push_back({StatisticKind::z_cell, Alternative::right, static_cast<ClassId>(c), {}});
    }
  }
  return plan;
}

LabelTables label_tables(std::span<const ClassId> labels, std::size_t num_classes, const NnGraph& graph,
                         std::span<const double> weights, Weighting weighting) {
  LabelTables t;
  t.rct = build_nnrct(labels, graph, weights, weighting);
  t.scct.self.assign(num_classes, 0.0);
  t.scct.mixed.assign(num_classes, 0.0);
  const auto edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const ClassId b = labels[edges[e].base];
    (b == labels[edges[e].neighbor] ? t.scct.self : t.scct.mixed)[b] += weights[e];
  }
  return t;
}

Analysis prepare_analysis(PointSet points, const BatteryOptions& options, std::string comparison) {
  NnGraph graph = build_nn_graph(points, options.tie_epsilon);
  const auto weights = graph.edge_weights(options.weighting);
  LabelTables tables = label_tables(points.labels(), points.num_classes(), graph, weights, options.weighting);
  NullContext context;
  context.class_sizes.assign(points.class_sizes().begin(), points.class_sizes().end());
  context.species = species_moments(points, graph);
  context.alpha = options.alpha;
  std::vector<std::string> warnings = graph.warnings();
  warnings.insert(warnings.end(), context.species.warnings.begin(), context.species.warnings.end());
  auto plan = battery_plan(points.num_classes(), options.selection);
  return Analysis{std::move(comparison), std::move(points), std::move(graph), std::move(tables),
                  std::move(context), std::move(plan), std::move(warnings)};
}

std::vector<TestResult> run_analysis(const Analysis& analysis, const BatteryOptions& options) {
  std::vector<TestResult> results;
  results.reserve(analysis.plan.size());
  for (std::size_t s = 0; s < analysis.plan.size(); ++s) {
    Rng tocher = Rng::for_stream(options.seed, {0x546f63686572ULL, s});
    TestResult r = evaluate_statistic(analysis.plan[s], analysis.tables, analysis.context, &tocher);
    r.comparison = analysis.comparison;
    results.push_back(std::move(r));
  }
  return results;
}

std::string_view to_string(PosthocMode mode) {
  switch (mode) {
    case PosthocMode::pairwise_restricted: return "pairwise-restricted";
    case PosthocMode::pairwise_unrestricted: return "pairwise-unrestricted";
    case PosthocMode::one_vs_rest: return "one-vs-rest";
  }
  return "unknown";
}

PosthocMode parse_posthoc_mode(std::string_view text) {
  if (text == "pairwise-restricted" || text == "restricted") return PosthocMode::pairwise_restricted;
  if (text == "pairwise-unrestricted" || text == "unrestricted") return PosthocMode::pairwise_unrestricted;
  if (text == "one-vs-rest") return PosthocMode::one_vs_rest;
  throw std::invalid_argument("unknown post-hoc mode '" + std::string(text) + "'");
}

std::vector<Analysis> posthoc_analyses(const PointSet& ps, PosthocMode mode, const BatteryOptions& options,
                                       std::vector<std::string>* warnings) {
  std::vector<Analysis> out;
  const std::size_t k = ps.num_classes();
  if (k < 2) throw std::invalid_argument("post-hoc comparisons need at least two classes");
  if (k == 2) {
    out.push_back(prepare_analysis(ps, options));
    return out;
  }
  const auto& names = ps.class_names();
  const auto sizes = ps.class_sizes();
  auto skip = [&](const std::string& what, ClassId c) {
    if (warnings) {
      warnings->push_back(what + " skipped: class " + names[c] + " has " + std::to_string(sizes[c]) +
                          " point(s)");
    }
  };

  if (mode == PosthocMode::one_vs_rest) {
    for (ClassId i = 0; i < k; ++i) {
      const std::string label = names[i] + " vs rest";
      if (sizes[i] < 2) {
        skip(label, i);
        continue;
      }
      out.push_back(prepare_analysis(collapse_classes(ps, {{i}}, true), options, label));
    }
    return out;
  }

  // Species tests in the unrestricted mode use the full pattern, computed once.
  std::optional<Analysis> full;
  if (mode == PosthocMode::pairwise_unrestricted && options.selection.species) {
    BatteryOptions species_only = options;
    species_only.selection = TestSelection{false, false, false, true};
    full = prepare_analysis(ps, species_only);
  }
  for (ClassId i = 0; i < k; ++i) {
    for (ClassId j = i + 1; j < k; ++j) {
      const std::string label = names[i] + " vs " + names[j];
      if (sizes[i] < 2 || sizes[j] < 2) {
        skip(label, sizes[i] < 2 ? i : j);
        continue;
      }
      BatteryOptions pair_options = options;
      if (mode == PosthocMode::pairwise_unrestricted) pair_options.selection.species = false;
      const bool any_rct = pair_options.selection.pielou || pair_options.selection.exact ||
                           pair_options.selection.reflexivity || pair_options.selection.species;
      if (any_rct) {
        out.push_back(prepare_analysis(collapse_classes(ps, {{i}, {j}}, false), pair_options, label));
      }
      if (full) {
        Analysis a = *full;
        a.comparison = label;
        a.plan = {{StatisticKind::species_overall, Alternative::two_sided, 0, {i, j}},
                  {StatisticKind::z_cell, Alternative::right, i, {}},
                  {StatisticKind::z_cell, Alternative::right, j, {}}};
        out.push_back(std::move(a));
      }
    }
  }
  return out;
}

std::vector<TestResult> posthoc_battery(const PointSet& ps, PosthocMode mode, const BatteryOptions& options,
                                        std::vector<std::string>* warnings) {
  std::vector<TestResult> results;
  for (const Analysis& a : posthoc_analyses(ps, mode, options, warnings)) {
    auto r = run_analysis(a, options);
    results.insert(results.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  return results;
}

}  // namespace nnreflex
