#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nnreflex {

/// Dense class index in 0..k-1. Reports print it one-based or by name.
using ClassId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Labeled planar point pattern. Immutable once constructed; relabeling
/// produces a new set sharing the same coordinates.
class PointSet {
 public:
  /// Labels must already be dense: every class in 0..k-1 non-empty.
  /// Throws std::invalid_argument on fewer than two points, length mismatch,
  /// non-finite coordinates, or a gap in the label range.
  PointSet(std::vector<Point> points, std::vector<ClassId> labels,
           std::vector<std::string> class_names = {});

  /// Builds a point set from arbitrary string labels. Classes are numbered
  /// in natural order of the label text (numeric labels compare as numbers).
  static PointSet from_named_labels(std::vector<Point> points,
                                    const std::vector<std::string>& labels);

  std::size_t size() const { return points_.size(); }
  std::size_t num_classes() const { return class_sizes_.size(); }

  std::span<const Point> points() const { return points_; }
  std::span<const ClassId> labels() const { return labels_; }
  std::span<const std::size_t> class_sizes() const { return class_sizes_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  const Point& point(std::size_t i) const { return points_[i]; }
  ClassId label(std::size_t i) const { return labels_[i]; }

  /// Same coordinates and class names, new labels. The label multiset may
  /// differ; it is validated like the constructor's.
  PointSet with_labels(std::vector<ClassId> labels) const;

 private:
  std::vector<Point> points_;
  std::vector<ClassId> labels_;
  std::vector<std::size_t> class_sizes_;
  std::vector<std::string> class_names_;
};

}  // namespace nnreflex
