#pragma once

// Brute-force references used as oracles by the test suites. Nothing here
// calls into the library's NN search, table builders or moment formulas.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "nnreflex/point_set.hpp"

namespace oracle {

using nnreflex::ClassId;
using nnreflex::Point;

inline std::vector<Point> uniform_points(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = u(gen);
    p.y = u(gen);
  }
  return pts;
}

/// Labels 0..k-1 in blocks of the given sizes (sorted, so std::next_permutation
/// walks every distinct labeling exactly once).
inline std::vector<ClassId> block_labels(const std::vector<std::size_t>& sizes) {
  std::vector<ClassId> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c) labels.insert(labels.end(), sizes[c], static_cast<ClassId>(c));
  return labels;
}

/// NN sets by scanning every pair; ties by exact equality plus eps.
inline std::vector<std::vector<std::size_t>> nn_sets(const std::vector<Point>& pts, double eps = 0.0) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) <= best + eps) out[i].push_back(j);
    }
  }
  return out;
}

inline bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

struct Counts {
  double sr = 0, mr = 0, snr = 0, mnr = 0;
};

/// NN-RCT cells with unique NNs: every directed edge weighs 1.
inline Counts rct(const std::vector<std::vector<std::size_t>>& nn, const std::vector<ClassId>& labels) {
  Counts c;
  for (std::size_t i = 0; i < nn.size(); ++i) {
    for (std::size_t j : nn[i]) {
      const double w = 1.0 / static_cast<double>(nn[i].size());
      const bool self = labels[i] == labels[j];
      const bool refl = contains(nn[j], i);
      (refl ? (self ? c.sr : c.mr) : (self ? c.snr : c.mnr)) += w;
    }
  }
  return c;
}

/// Self count S_c (NNCT diagonal) for every class.
inline std::vector<double> self_counts(const std::vector<std::vector<std::size_t>>& nn,
                                       const std::vector<ClassId>& labels, std::size_t k) {
  std::vector<double> s(k, 0.0);
  for (std::size_t i = 0; i < nn.size(); ++i) {
    for (std::size_t j : nn[i]) {
      if (labels[i] == labels[j]) s[labels[i]] += 1.0 / static_cast<double>(nn[i].size());
    }
  }
  return s;
}

/// R as the number of ordered mutual pairs.
inline double reflexive_r(const std::vector<std::vector<std::size_t>>& nn) {
  double r = 0;
  for (std::size_t i = 0; i < nn.size(); ++i) {
    for (std::size_t j : nn[i]) r += contains(nn[j], i) ? 1 : 0;
  }
  return r;
}

/// Q as the number of ordered pairs (i, j), i != j, sharing a NN.
inline double shared_q(const std::vector<std::vector<std::size_t>>& nn) {
  double q = 0;
  for (std::size_t i = 0; i < nn.size(); ++i) {
    for (std::size_t j = 0; j < nn.size(); ++j) {
      if (i == j) continue;
      for (std::size_t a : nn[i]) q += contains(nn[j], a) ? 1 : 0;
    }
  }
  return q;
}

}  // namespace oracle
