#include "nnreflex/runner.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "nnreflex/battery.hpp"
#include "nnreflex/montecarlo.hpp"

namespace nnreflex {

namespace {

ReportSection section_from(const Analysis& a, Weighting weighting) {
  ReportSection s;
  s.comparison = a.comparison;
  s.class_names = a.points.class_names();
  s.class_sizes.assign(a.points.class_sizes().begin(), a.points.class_sizes().end());
  s.rct = a.tables.rct;
  s.nnct = build_nnct(a.points, a.graph, weighting);
  s.scct = a.tables.scct;
  s.q = a.graph.q();
  s.r = a.graph.r();
  return s;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double parse_value(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  if (slash != std::string::npos) {
    const double num = parse_value(t.substr(0, slash));
    const double den = parse_value(t.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("grid value '" + t + "' divides by zero");
    return num / den;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw std::invalid_argument("grid value '" + t + "' is not a number");
  }
  return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) {
      const auto dots = item.find("..");
      if (dots == std::string::npos) {
        out.push_back(parse_value(item));
      } else {
        const std::string rest = item.substr(dots + 2);
        const auto colon = rest.find(':');
        const double a = parse_value(item.substr(0, dots));
        const double b = parse_value(rest.substr(0, colon));
        const double step = colon == std::string::npos ? 10.0 : parse_value(rest.substr(colon + 1));
        if (!(step > 0.0)) throw std::invalid_argument("grid range '" + item + "' needs a positive step");
        if (b < a) throw std::invalid_argument("grid range '" + item + "' is empty");
        const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
        for (std::size_t i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty grid '" + text + "'");
  return out;
}

std::vector<std::size_t> parse_size_grid(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_grid(text)) {
    if (v < 0.0 || std::fabs(v - std::round(v)) > 1e-9) {
      throw std::invalid_argument("grid '" + text + "' must contain non-negative integers");
    }
    out.push_back(static_cast<std::size_t>(std::llround(v)));
  }
  return out;
}

ReportSection tables_section(const PointSet& ps, Weighting weighting, double tie_epsilon,
                             const std::string& comparison) {
  BatteryOptions options;
  options.weighting = weighting;
  options.tie_epsilon = tie_epsilon;
  options.selection = TestSelection{false, false, false, false};
  return section_from(prepare_analysis(ps, options, comparison), weighting);
}

bool has_errors(const BatteryReport& report) {
  for (const auto& s : report.sections) {
    for (const auto& r : s.results) {
      if (r.error) return true;
    }
  }
  return false;
}

BatteryReport run_battery(const Dataset& data, const RunConfig& config) {
  config.validate();
  const PointSet& ps = data.points;
  if (ps.num_classes() < 2) {
    throw std::invalid_argument("the tests need at least two classes; the input has one");
  }
  BatteryOptions options;
  options.alpha = config.alpha;
  options.weighting = config.weighting;
  options.tie_epsilon = config.tie_epsilon;
  options.seed = config.seed;
  options.selection = TestSelection::parse(config.tests);

  BatteryReport report;
  report.input = data.provenance;
  report.settings = RunSettings{config.alpha, config.n_mc, config.seed, to_string(config.weighting),
                                config.tie_epsilon, config.tests, config.posthoc};
  report.warnings = data.provenance.warnings;

  std::vector<Analysis> analyses;
  analyses.push_back(prepare_analysis(ps, options));
  if (config.posthoc && ps.num_classes() > 2) {
    const PosthocMode mode = parse_posthoc_mode(*config.posthoc);
    auto more = posthoc_analyses(ps, mode, options, &report.warnings);
    for (auto& a : more) analyses.push_back(std::move(a));
  }

  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const Analysis& a = analyses[i];
    for (const auto& w : a.warnings) report.warnings.push_back(a.comparison + ": " + w);
    ReportSection section = section_from(a, config.weighting);
    section.results = run_analysis(a, options);
    const RelabelEngine engine(a, config.weighting);
    const auto rand = randomization_pvalues(engine, a.plan, config.n_mc, config.seed, i, config.workers);
    for (std::size_t s = 0; s < rand.size(); ++s) {
      TestResult& r = section.results[s];
      r.diagnostics["randomization_undefined"] = static_cast<double>(rand[s].undefined);
      if (rand[s].p_value) {
        r.p_randomization = rand[s].p_value;
      } else if (!r.error) {
        r.error = "randomization: " + rand[s].error.value_or("failed");
      }
    }
    report.sections.push_back(std::move(section));
  }
  return report;
}

}  // namespace nnreflex
