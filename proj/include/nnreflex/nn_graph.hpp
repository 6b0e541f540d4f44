#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnreflex/point_set.hpp"

namespace nnreflex {

/// How a directed base-NN edge is weighted when tables are accumulated.
enum class Weighting {
  /// Each base point spreads total weight 1 evenly over its NN set, so tables
  /// sum to n. With unique NNs every directed edge weighs 1.
  ordered_edge,
  /// Literal W_ij = 1 / (N_i^nn + N_j^nn) on every ordered pair. In the
  /// reflexivity table a one-way edge is counted from both of its ordered
  /// pairs, so with unique NNs the table sums to n - R/2 instead of n.
  pielou,
};

/// One directed base -> neighbor relation.
struct NnEdge {
  std::uint32_t base = 0;
  std::uint32_t neighbor = 0;
  bool mutual = false;
};

/// Nearest-neighbor structure of a point pattern. Depends only on geometry,
/// so it can be reused across any number of relabelings.
class NnGraph {
 public:
  std::size_t size() const { return nn_dist_.size(); }

  /// NN set of point i, sorted by index.
  std::span<const std::uint32_t> nn_set(std::size_t i) const;
  double nn_distance(std::size_t i) const { return nn_dist_[i]; }

  /// All directed edges, grouped by base point in index order.
  std::span<const NnEdge> edges() const { return edges_; }
  bool is_mutual(std::size_t i, std::size_t j) const;

  /// Twice the number of reflexive pairs; with ties, the count of ordered
  /// mutual pairs.
  double r() const { return r_; }
  /// Shared-NN quantity: sum over l of l (l - 1) Q_l.
  double q() const { return q_; }
  /// q_counts()[l] = number of points that are a NN of exactly l others.
  std::span<const std::size_t> q_counts() const { return q_counts_; }

  bool has_ties() const { return has_ties_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Per-edge weights, parallel to edges(): 1/|nn_set(base)| or W_ij.
  std::vector<double> edge_weights(Weighting weighting) const;

 private:
  friend NnGraph build_nn_graph(const PointSet& ps, double tie_epsilon);

  std::vector<std::size_t> offsets_;
  std::vector<NnEdge> edges_;
  std::vector<std::uint32_t> neighbors_;
  std::vector<double> nn_dist_;
  std::vector<std::size_t> q_counts_;
  double r_ = 0.0;
  double q_ = 0.0;
  bool has_ties_ = false;
  std::vector<std::string> warnings_;
};

/// Exact O(n^2) NN search in the Euclidean plane. j is a NN of i when
/// d(i, j) <= min_{j' != i} d(i, j') + tie_epsilon.
NnGraph build_nn_graph(const PointSet& ps, double tie_epsilon = 0.0);

/// Minimum pairwise distance over all points, or over one class.
/// Throws std::invalid_argument if fewer than two points qualify.
double min_interpoint_distance(const PointSet& ps, std::optional<ClassId> cls = std::nullopt);
double min_interpoint_distance(std::span<const Point> points);

}  // namespace nnreflex
