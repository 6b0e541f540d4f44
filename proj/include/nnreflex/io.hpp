#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nnreflex/montecarlo.hpp"
#include "nnreflex/point_set.hpp"

namespace nnreflex {

struct CsvSchema {
  std::string x_column = "x";
  std::string y_column = "y";
  std::string label_column = "label";
  char delimiter = ',';
};

/// Where a point set came from and what it looks like.
struct Provenance {
  std::string source;
  std::size_t rows = 0;
  std::vector<std::string> class_names;
  std::vector<std::size_t> class_sizes;
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  /// From a "# window: x_min x_max y_min y_max" comment line, if present.
  std::optional<Window> window;
  std::vector<std::string> warnings;
};

struct Dataset {
  PointSet points;
  Provenance provenance;
};

/// Parses delimited text with a header row. Blank lines and lines starting
/// with '#' are skipped. Fields may be double-quoted. Errors name the source
/// and line: std::runtime_error for malformed rows, a missing column, or
/// fewer than two data rows. Duplicate coordinates are accepted with a warning.
Dataset parse_points_csv(std::istream& in, const CsvSchema& schema, const std::string& source = "<input>");
Dataset read_points_csv(const std::string& path, const CsvSchema& schema);

/// Splits one delimited line, honouring double quotes ("" inside quotes is a quote).
std::vector<std::string> split_delimited(const std::string& line, char delimiter);

}  // namespace nnreflex
