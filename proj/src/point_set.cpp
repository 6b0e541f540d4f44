#include "nnreflex/point_set.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nnreflex {

namespace {

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Numeric labels sort numerically and before text labels; text sorts lexically.
bool label_less(const std::string& a, const std::string& b) {
  double da = 0.0;
  double db = 0.0;
  const bool na = parse_number(a, da);
  const bool nb = parse_number(b, db);
  if (na && nb) return da < db || (da == db && a < b);
  if (na != nb) return na;
  return a < b;
}

}  // namespace

PointSet::PointSet(std::vector<Point> points, std::vector<ClassId> labels,
                   std::vector<std::string> class_names)
    : points_(std::move(points)), labels_(std::move(labels)), class_names_(std::move(class_names)) {
  if (points_.size() != labels_.size()) {
    throw std::invalid_argument("PointSet: points and labels differ in length");
  }
  if (points_.size() < 2) throw std::invalid_argument("PointSet: need at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      throw std::invalid_argument("PointSet: non-finite coordinate at index " + std::to_string(i));
    }
  }
  const ClassId max_label = *std::max_element(labels_.begin(), labels_.end());
  class_sizes_.assign(static_cast<std::size_t>(max_label) + 1, 0);
  for (ClassId l : labels_) ++class_sizes_[l];
  for (std::size_t c = 0; c < class_sizes_.size(); ++c) {
    if (class_sizes_[c] == 0) {
      throw std::invalid_argument("PointSet: class " + std::to_string(c) + " is empty");
    }
  }
  if (class_names_.empty()) {
    for (std::size_t c = 0; c < class_sizes_.size(); ++c) class_names_.push_back(std::to_string(c + 1));
  } else if (class_names_.size() != class_sizes_.size()) {
    throw std::invalid_argument("PointSet: class name count does not match number of classes");
  }
}

PointSet PointSet::from_named_labels(std::vector<Point> points,
                                     const std::vector<std::string>& labels) {
  std::vector<std::string> names(labels.begin(), labels.end());
  std::sort(names.begin(), names.end(), label_less);
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::map<std::string, ClassId> index;
  for (std::size_t c = 0; c < names.size(); ++c) index.emplace(names[c], static_cast<ClassId>(c));
  std::vector<ClassId> dense;
  dense.reserve(labels.size());
  for (const auto& l : labels) dense.push_back(index.at(l));
  return PointSet(std::move(points), std::move(dense), std::move(names));
}

PointSet PointSet::with_labels(std::vector<ClassId> labels) const {
  if (labels.size() != points_.size()) {
    throw std::invalid_argument("PointSet::with_labels: label count mismatch");
  }
  std::vector<std::string> names = class_names_;
  const ClassId max_label = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  if (static_cast<std::size_t>(max_label) + 1 != names.size()) names.clear();
  return PointSet(points_, std::move(labels), std::move(names));
}

}  // namespace nnreflex
