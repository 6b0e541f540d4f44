#include "nnreflex/tables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nnreflex {

double Nnct::row_sum(std::size_t base) const {
  double s = 0.0;
  for (std::size_t j = 0; j < k_; ++j) s += (*this)(base, j);
  return s;
}

double Nnct::col_sum(std::size_t nn) const {
  double s = 0.0;
  for (std::size_t i = 0; i < k_; ++i) s += (*this)(i, nn);
  return s;
}

double Nnct::total() const { return std::accumulate(cells_.begin(), cells_.end(), 0.0); }

double Scct::self_total() const { return std::accumulate(self.begin(), self.end(), 0.0); }
double Scct::mixed_total() const { return std::accumulate(mixed.begin(), mixed.end(), 0.0); }

NnRct build_nnrct(std::span<const ClassId> labels, const NnGraph& g, std::span<const double> weights,
                  Weighting weighting) {
  const auto edges = g.edges();
  if (weights.size() != edges.size() || labels.size() != g.size()) {
    throw std::invalid_argument("build_nnrct: labels or weights do not match the graph");
  }
  // Under the literal pair-sum weighting a one-way edge appears in two ordered pairs.
  const double one_way_factor = weighting == Weighting::pielou ? 2.0 : 1.0;
  NnRct t;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const bool self = labels[edges[e].base] == labels[edges[e].neighbor];
    if (edges[e].mutual) {
      (self ? t.self_reflexive : t.mixed_reflexive) += weights[e];
    } else {
      (self ? t.self_nonreflexive : t.mixed_nonreflexive) += one_way_factor * weights[e];
    }
  }
  return t;
}

NnRct build_nnrct(const PointSet& ps, const NnGraph& g, Weighting weighting) {
  if (g.size() != ps.size()) throw std::invalid_argument("build_nnrct: graph built for another point set");
  const auto w = g.edge_weights(weighting);
  return build_nnrct(ps.labels(), g, w, weighting);
}

Nnct build_nnct(const PointSet& ps, const NnGraph& g, Weighting weighting) {
  if (g.size() != ps.size()) throw std::invalid_argument("build_nnct: graph built for another point set");
  Nnct table(ps.num_classes());
  const auto w = g.edge_weights(weighting);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    table(ps.label(edges[e].base), ps.label(edges[e].neighbor)) += w[e];
  }
  return table;
}

Scct build_scct(const Nnct& nnct) {
  Scct s;
  const std::size_t k = nnct.num_classes();
  s.self.resize(k);
  s.mixed.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    s.self[i] = nnct(i, i);
    s.mixed[i] = nnct.row_sum(i) - nnct(i, i);
  }
  return s;
}

PointSet collapse_classes(const PointSet& ps, const std::vector<std::vector<ClassId>>& groups,
                          bool keep_unlisted) {
  const std::size_t k = ps.num_classes();
  constexpr ClassId kUnlisted = static_cast<ClassId>(-1);
  std::vector<ClassId> mapping(k, kUnlisted);
  std::vector<std::string> names;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw std::invalid_argument("collapse_classes: empty group");
    std::string name;
    for (ClassId c : groups[g]) {
      if (c >= k) throw std::invalid_argument("collapse_classes: unknown class " + std::to_string(c));
      if (mapping[c] != kUnlisted) {
        throw std::invalid_argument("collapse_classes: class listed twice " + std::to_string(c));
      }
      mapping[c] = static_cast<ClassId>(g);
      name += (name.empty() ? "" : "+") + ps.class_names()[c];
    }
    names.push_back(name);
  }
  const bool any_unlisted = std::find(mapping.begin(), mapping.end(), kUnlisted) != mapping.end();
  if (keep_unlisted && any_unlisted) names.emplace_back("other");

  std::vector<Point> points;
  std::vector<ClassId> labels;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const ClassId m = mapping[ps.label(i)];
    if (m == kUnlisted && !keep_unlisted) continue;
    points.push_back(ps.point(i));
    labels.push_back(m == kUnlisted ? static_cast<ClassId>(groups.size()) : m);
  }
  return PointSet(std::move(points), std::move(labels), std::move(names));
}

void require_integral(const NnRct& t) {
  for (double v : {t.self_reflexive, t.mixed_reflexive, t.self_nonreflexive, t.mixed_nonreflexive}) {
    if (std::fabs(v - std::round(v)) > 1e-9) {
      throw std::logic_error("NN-RCT cell is not integral: " + std::to_string(v));
    }
  }
}

}  // namespace nnreflex
