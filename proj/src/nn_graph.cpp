#include "nnreflex/nn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nnreflex {

namespace {

double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

std::span<const std::uint32_t> NnGraph::nn_set(std::size_t i) const {
  return std::span<const std::uint32_t>(neighbors_).subspan(offsets_[i],
                                                            offsets_[i + 1] - offsets_[i]);
}

bool NnGraph::is_mutual(std::size_t i, std::size_t j) const {
  const auto a = nn_set(i);
  const auto b = nn_set(j);
  return std::binary_search(a.begin(), a.end(), static_cast<std::uint32_t>(j)) &&
         std::binary_search(b.begin(), b.end(), static_cast<std::uint32_t>(i));
}

std::vector<double> NnGraph::edge_weights(Weighting weighting) const {
  std::vector<double> w;
  w.reserve(edges_.size());
  for (const NnEdge& e : edges_) {
    const double ni = static_cast<double>(offsets_[e.base + 1] - offsets_[e.base]);
    if (weighting == Weighting::ordered_edge) {
      w.push_back(1.0 / ni);
    } else {
      const double nj = static_cast<double>(offsets_[e.neighbor + 1] - offsets_[e.neighbor]);
      w.push_back(1.0 / (ni + nj));
    }
  }
  return w;
}

NnGraph build_nn_graph(const PointSet& ps, double tie_epsilon) {
  if (!(tie_epsilon >= 0.0) || !std::isfinite(tie_epsilon)) {
    throw std::invalid_argument("build_nn_graph: tie_epsilon must be a finite non-negative value");
  }
  const std::size_t n = ps.size();
  if (n < 2) throw std::invalid_argument("build_nn_graph: need at least two points");
  const auto pts = ps.points();

  NnGraph g;
  g.offsets_.assign(n + 1, 0);
  g.nn_dist_.assign(n, std::numeric_limits<double>::infinity());
  bool coincident = false;

  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      row[j] = distance(pts[i], pts[j]);
      best = std::min(best, row[j]);
    }
    if (best == 0.0) coincident = true;
    g.nn_dist_[i] = best;
    const double cutoff = best + tie_epsilon;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && row[j] <= cutoff) g.neighbors_.push_back(static_cast<std::uint32_t>(j));
    }
    g.offsets_[i + 1] = g.neighbors_.size();
    if (g.offsets_[i + 1] - g.offsets_[i] > 1) g.has_ties_ = true;
  }

  std::vector<std::size_t> in_degree(n, 0);
  g.edges_.reserve(g.neighbors_.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t j : g.nn_set(i)) {
      const auto back = g.nn_set(j);
      const bool mutual = std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(i));
      g.edges_.push_back({static_cast<std::uint32_t>(i), j, mutual});
      if (mutual) g.r_ += 1.0;
      ++in_degree[j];
    }
  }

  const std::size_t max_degree = *std::max_element(in_degree.begin(), in_degree.end());
  g.q_counts_.assign(max_degree + 1, 0);
  for (std::size_t d : in_degree) ++g.q_counts_[d];
  for (std::size_t l = 2; l < g.q_counts_.size(); ++l) {
    g.q_ += static_cast<double>(l * (l - 1)) * static_cast<double>(g.q_counts_[l]);
  }

  if (coincident) {
    g.warnings_.emplace_back("coincident points present; they are treated as each other's NNs");
  }
  if (!g.has_ties_ && max_degree > 6) {
    g.warnings_.emplace_back("degenerate configuration: a point is the NN of " +
                             std::to_string(max_degree) + " others (more than 6)");
  }
  if (g.has_ties_) {
    g.warnings_.emplace_back("tied NN distances present; moment formulas assume unique NNs");
  }
  return g;
}

double min_interpoint_distance(std::span<const Point> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("min_interpoint_distance: need at least two points");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, distance(points[i], points[j]));
    }
  }
  return best;
}

double min_interpoint_distance(const PointSet& ps, std::optional<ClassId> cls) {
  if (!cls) return min_interpoint_distance(ps.points());
  std::vector<Point> subset;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps.label(i) == *cls) subset.push_back(ps.point(i));
  }
  return min_interpoint_distance(subset);
}

}  // namespace nnreflex
