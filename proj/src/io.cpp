#include "nnreflex/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace nnreflex {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& message) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + message);
}

double parse_real(const std::string& text, const std::string& source, std::size_t line, const char* column) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(source, line, std::string("column '") + column + "': '" + t + "' is not a number");
  }
  if (!std::isfinite(value)) fail(source, line, std::string("column '") + column + "' is not finite");
  return value;
}

std::optional<Window> parse_window_comment(const std::string& line) {
  const std::string body = trim(line.substr(1));
  const std::string key = "window:";
  if (body.rfind(key, 0) != 0) return std::nullopt;
  std::istringstream in(body.substr(key.size()));
  Window w;
  if (!(in >> w.x_min >> w.x_max >> w.y_min >> w.y_max)) return std::nullopt;
  if (!(w.width() > 0.0 && w.height() > 0.0)) return std::nullopt;
  return w;
}

}  // namespace

std::vector<std::string> split_delimited(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

Dataset parse_points_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
  Provenance prov;
  prov.source = source;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> x_col, y_col, label_col;
  std::size_t width = 0;
  std::vector<Point> points;
  std::vector<std::string> labels;
  std::vector<std::size_t> line_of;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (auto w = parse_window_comment(t)) prov.window = w;
      continue;
    }
    std::vector<std::string> fields;
    try {
      fields = split_delimited(line, schema.delimiter);
    } catch (const std::invalid_argument& e) {
      fail(source, line_no, e.what());
    }
    if (!x_col) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = trim(fields[i]);
        if (name == schema.x_column) x_col = i;
        if (name == schema.y_column) y_col = i;
        if (name == schema.label_column) label_col = i;
      }
      if (!x_col || !y_col || !label_col) {
        const std::string& missing = !x_col ? schema.x_column : !y_col ? schema.y_column : schema.label_column;
        fail(source, line_no, "header has no column '" + missing + "'");
      }
      width = fields.size();
      continue;
    }
    if (fields.size() != width) {
      fail(source, line_no, "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    const double x = parse_real(fields[*x_col], source, line_no, schema.x_column.c_str());
    const double y = parse_real(fields[*y_col], source, line_no, schema.y_column.c_str());
    std::string label = trim(fields[*label_col]);
    if (label.empty()) fail(source, line_no, "empty label");
    points.push_back({x, y});
    labels.push_back(std::move(label));
    line_of.push_back(line_no);
  }
  if (!x_col) throw std::runtime_error(source + ": empty input (no header)");
  if (points.empty()) throw std::runtime_error(source + ": empty input (header only)");
  if (points.size() < 2) throw std::runtime_error(source + ": need at least two points, found 1");

  std::map<std::pair<double, double>, std::size_t> seen;
  std::size_t duplicates = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [it, inserted] = seen.emplace(std::make_pair(points[i].x, points[i].y), line_of[i]);
    if (!inserted) {
      if (++duplicates <= 5) {
        prov.warnings.push_back(source + ":" + std::to_string(line_of[i]) + ": duplicate coordinates of line " +
                                std::to_string(it->second));
      }
    }
  }
  if (duplicates > 5) {
    prov.warnings.push_back(std::to_string(duplicates) + " duplicate coordinate rows in total");
  }

  PointSet ps = PointSet::from_named_labels(std::move(points), labels);
  prov.rows = ps.size();
  prov.class_names = ps.class_names();
  prov.class_sizes.assign(ps.class_sizes().begin(), ps.class_sizes().end());
  prov.x_min = prov.x_max = ps.point(0).x;
  prov.y_min = prov.y_max = ps.point(0).y;
  for (const Point& p : ps.points()) {
    prov.x_min = std::min(prov.x_min, p.x);
    prov.x_max = std::max(prov.x_max, p.x);
    prov.y_min = std::min(prov.y_min, p.y);
    prov.y_max = std::max(prov.y_max, p.y);
  }
  return Dataset{std::move(ps), std::move(prov)};
}

Dataset read_points_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return parse_points_csv(in, schema, path);
}

}  // namespace nnreflex
