#pragma once

#include <string>
#include <vector>

#include "nnreflex/config.hpp"
#include "nnreflex/io.hpp"
#include "nnreflex/report.hpp"

namespace nnreflex {

/// Runs the selected tests on a data set, with randomization p-values from
/// config.n_mc relabelings. With config.posthoc set and more than two
/// classes, the post-hoc comparisons follow the overall section. Randomization
/// of section s uses stream s of config.seed.
/// Throws std::invalid_argument for a single-class data set.
BatteryReport run_battery(const Dataset& data, const RunConfig& config);

/// Tables only (NN-RCT, NNCT, SCCT, Q, R) of the full data set.
ReportSection tables_section(const PointSet& ps, Weighting weighting, double tie_epsilon,
                             const std::string& comparison = "overall");

/// True if any result carries an error.
bool has_errors(const BatteryReport& report);

/// Values of a grid argument: comma-separated items, each a number, a
/// fraction "p/q", or a range "a..b" / "a..b:step" (step 10 by default).
/// Throws std::invalid_argument on malformed or empty grids.
std::vector<double> parse_grid(const std::string& text);
/// Same, requiring non-negative integers.
std::vector<std::size_t> parse_size_grid(const std::string& text);

}  // namespace nnreflex
