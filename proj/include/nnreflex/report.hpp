#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnreflex/io.hpp"
#include "nnreflex/montecarlo.hpp"
#include "nnreflex/tables.hpp"
#include "nnreflex/test_result.hpp"

namespace nnreflex {

inline constexpr const char* kVersion = "0.1.0";

/// Tables and results of one comparison ("overall", "a vs b", ...).
struct ReportSection {
  std::string comparison = "overall";
  std::vector<std::string> class_names;
  std::vector<std::size_t> class_sizes;
  NnRct rct;
  Nnct nnct{0};
  Scct scct;
  double q = 0.0;
  double r = 0.0;
  std::vector<TestResult> results;
};

struct RunSettings {
  double alpha = 0.05;
  std::size_t n_mc = 0;
  std::uint64_t seed = 0;
  std::string weighting = "ordered-edge";
  double tie_epsilon = 0.0;
  std::string tests = "all";
  std::optional<std::string> posthoc;
};

struct BatteryReport {
  Provenance input;
  RunSettings settings;
  std::vector<ReportSection> sections;
  std::vector<std::string> warnings;
};

/// Six significant digits, as used in CSV output; empty for NaN.
std::string format_sig6(double v);

nlohmann::json to_json(const TestResult& r);
nlohmann::json to_json(const BatteryReport& report);
std::string battery_csv(const BatteryReport& report);
/// Tables in the usual orientation followed by a TS / p_asy / p_rand grid.
std::string battery_text(const BatteryReport& report);
std::string tables_text(const ReportSection& section);

/// `runtime_seconds` goes into the JSON only, so CSV output stays byte-identical across runs.
nlohmann::json to_json(const SimulationReport& report, std::optional<double> runtime_seconds = std::nullopt);
std::string simulation_csv(const SimulationReport& report);
/// One row per spec, one column per test, as in the size and power tables.
std::string simulation_text(const SimulationReport& report);

/// Short column label for a result, e.g. "Zsr>" or "Z11>".
std::string short_label(const TestResult& r);

}  // namespace nnreflex
