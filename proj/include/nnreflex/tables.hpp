#pragma once

#include <span>
#include <vector>

#include "nnreflex/nn_graph.hpp"
#include "nnreflex/point_set.hpp"

namespace nnreflex {

/// 2x2 NN reflexivity contingency table: rows reflexive / non-reflexive,
/// columns self / mixed.
struct NnRct {
  double self_reflexive = 0.0;
  double mixed_reflexive = 0.0;
  double self_nonreflexive = 0.0;
  double mixed_nonreflexive = 0.0;

  double reflexive() const { return self_reflexive + mixed_reflexive; }
  double nonreflexive() const { return self_nonreflexive + mixed_nonreflexive; }
  double self() const { return self_reflexive + self_nonreflexive; }
  double mixed() const { return mixed_reflexive + mixed_nonreflexive; }
  double total() const { return reflexive() + nonreflexive(); }

  friend bool operator==(const NnRct&, const NnRct&) = default;
};

/// k x k nearest neighbor contingency table, base class by NN class.
class Nnct {
 public:
  explicit Nnct(std::size_t k) : k_(k), cells_(k * k, 0.0) {}

  std::size_t num_classes() const { return k_; }
  double& operator()(std::size_t base, std::size_t nn) { return cells_[base * k_ + nn]; }
  double operator()(std::size_t base, std::size_t nn) const { return cells_[base * k_ + nn]; }
  double row_sum(std::size_t base) const;
  double col_sum(std::size_t nn) const;
  double total() const;

 private:
  std::size_t k_;
  std::vector<double> cells_;
};

/// k x 2 species-correspondence table: self and mixed base-NN pairs per
/// base class.
struct Scct {
  std::vector<double> self;
  std::vector<double> mixed;

  std::size_t num_classes() const { return self.size(); }
  double self_total() const;
  double mixed_total() const;
};

NnRct build_nnrct(const PointSet& ps, const NnGraph& g,
                  Weighting weighting = Weighting::ordered_edge);

/// Same accumulation with labels supplied separately; used by relabeling
/// loops that keep the geometry fixed.
NnRct build_nnrct(std::span<const ClassId> labels, const NnGraph& g, std::span<const double> weights,
                  Weighting weighting);

Nnct build_nnct(const PointSet& ps, const NnGraph& g, Weighting weighting = Weighting::ordered_edge);
Scct build_scct(const Nnct& nnct);

/// Relabels classes by group: every class in groups[g] becomes class g.
/// Points whose class is in no group are dropped, unless keep_unlisted is set,
/// in which case they form one extra trailing class.
/// Throws std::invalid_argument on an empty group, an unknown class, or a
/// class listed twice.
PointSet collapse_classes(const PointSet& ps, const std::vector<std::vector<ClassId>>& groups,
                          bool keep_unlisted = false);

/// Throws std::logic_error if any cell of a default-weighted table without
/// ties is not an integer within 1e-9.
void require_integral(const NnRct& t);

}  // namespace nnreflex
