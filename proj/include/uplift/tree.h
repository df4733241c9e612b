/*
 * Copyright 2026 The Uplift Policy Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UPLIFT_TREE_H_
#define UPLIFT_TREE_H_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "json.hpp"
#include "uplift/rng.h"

namespace uplift {

// Distinct rows of a 0/1 design, each stored as its sorted active columns.
// Tree learners operate on per-row sufficient statistics aggregated over
// these rows, which is exact because every split is a test on one column.
class FeatureRows {
 public:
  explicit FeatureRows(int num_columns = 0) : num_columns_(num_columns) {
    offsets_.push_back(0);
  }

  int num_columns() const { return num_columns_; }
  int size() const { return static_cast<int>(offsets_.size()) - 1; }

  void Add(std::span<const int> active) {
    indices_.insert(indices_.end(), active.begin(), active.end());
    offsets_.push_back(static_cast<int>(indices_.size()));
  }
  std::span<const int> row(int r) const {
    return std::span<const int>(indices_).subspan(
        offsets_[r], offsets_[r + 1] - offsets_[r]);
  }
  bool Has(int r, int column) const {
    auto a = row(r);
    return std::binary_search(a.begin(), a.end(), column);
  }

 private:
  int num_columns_;
  std::vector<int> offsets_;
  std::vector<int> indices_;
};

// Binary tree over 0/1 columns: rows with the split column equal to 0 go
// left, rows with 1 go right.
struct BinaryTree {
  struct Node {
    int column = -1;  // -1 for leaves
    int left = -1;
    int right = -1;
    double value = 0.0;
    double weight = 0.0;
  };
  std::vector<Node> nodes;

  bool is_leaf(int n) const { return nodes[n].column < 0; }

  template <typename HasColumn>
    requires std::predicate<HasColumn&, int>
  int Leaf(HasColumn&& has_column) const {
    int n = 0;
    while (nodes[n].column >= 0) {
      n = has_column(nodes[n].column) ? nodes[n].right : nodes[n].left;
    }
    return n;
  }
  int Leaf(std::span<const int> active) const {
    return Leaf([&](int c) {
      return std::binary_search(active.begin(), active.end(), c);
    });
  }
  double Predict(std::span<const int> active) const {
    return nodes[Leaf(active)].value;
  }

  int NumLeaves() const;
  int Depth() const;
  nlohmann::json ToJson() const;
  static BinaryTree FromJson(const nlohmann::json& j);
};

struct GrowOptions {
  int max_depth = std::numeric_limits<int>::max();
  // Candidate columns per node; 0 means all columns.
  int mtry = 0;
  uint64_t seed = 0;
};

template <typename Stats>
struct GrownTree {
  BinaryTree tree;
  std::vector<Stats> node_stats;
};

// Greedy depth-first growth. The criterion supplies:
//   Stats                                 additive sufficient statistics
//   bool Splittable(const Stats&, int depth)
//   double Gain(parent, left, right)      -inf when the split is invalid
//   bool Accept(double gain)
//   void Fill(BinaryTree::Node*, const Stats&)
// Among equal gains the lowest column index wins.
template <typename Criterion>
GrownTree<typename Criterion::Stats> GrowTree(
    const FeatureRows& rows, std::span<const typename Criterion::Stats> stats,
    const Criterion& criterion, const GrowOptions& options) {
  using Stats = typename Criterion::Stats;
  GrownTree<Stats> out;
  Rng rng(options.seed);
  const int p = rows.num_columns();

  std::vector<int> members;
  for (int r = 0; r < rows.size(); ++r) {
    if (stats[r].Empty()) continue;
    members.push_back(r);
  }

  std::vector<Stats> column_stats(p);
  std::vector<uint8_t> touched(p, 0);
  std::vector<int> candidates(p);
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);

  struct Frame {
    int node;
    int begin;
    int end;
    int depth;
  };
  Stats root{};
  for (int r : members) root += stats[r];
  out.tree.nodes.emplace_back();
  out.node_stats.push_back(root);
  criterion.Fill(&out.tree.nodes[0], root);

  std::vector<Frame> stack{{0, 0, static_cast<int>(members.size()), 0}};
  // Children are pushed right-then-left so the left subtree is numbered
  // first; node ids are therefore a pure function of the data and seed.
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const Stats parent = out.node_stats[f.node];
    if (f.depth >= options.max_depth || !criterion.Splittable(parent, f.depth)) {
      continue;
    }

    int num_candidates = p;
    if (options.mtry > 0 && options.mtry < p) {
      // Partial Fisher-Yates over the column order.
      for (int k = 0; k < options.mtry; ++k) {
        const int j = k + static_cast<int>(rng.UniformIndex(p - k));
        std::swap(order[k], order[j]);
      }
      num_candidates = options.mtry;
      std::copy(order.begin(), order.begin() + num_candidates,
                candidates.begin());
      std::sort(candidates.begin(), candidates.begin() + num_candidates);
    } else {
      std::iota(candidates.begin(), candidates.end(), 0);
    }

    std::vector<int> used;
    for (int k = f.begin; k < f.end; ++k) {
      const int r = members[k];
      for (int c : rows.row(r)) {
        if (!touched[c]) {
          touched[c] = 1;
          column_stats[c] = Stats{};
          used.push_back(c);
        }
        column_stats[c] += stats[r];
      }
    }

    double best_gain = -std::numeric_limits<double>::infinity();
    int best_column = -1;
    for (int k = 0; k < num_candidates; ++k) {
      const int c = candidates[k];
      if (!touched[c]) continue;  // column is 0 for every member
      const Stats& right = column_stats[c];
      const Stats left = parent - right;
      if (left.Empty()) continue;  // column is 1 for every member
      const double gain = criterion.Gain(parent, left, right);
      if (gain > best_gain) {
        best_gain = gain;
        best_column = c;
      }
    }
    for (int c : used) touched[c] = 0;
    if (best_column < 0 || !criterion.Accept(best_gain)) continue;

    // Partition members: zeros first.
    auto mid = std::stable_partition(
        members.begin() + f.begin, members.begin() + f.end,
        [&](int r) { return !rows.Has(r, best_column); });
    const int split = static_cast<int>(mid - members.begin());
    Stats left_stats{};
    for (int k = f.begin; k < split; ++k) left_stats += stats[members[k]];
    Stats right_stats{};
    for (int k = split; k < f.end; ++k) right_stats += stats[members[k]];

    const int left_id = static_cast<int>(out.tree.nodes.size());
    const int right_id = left_id + 1;
    out.tree.nodes.emplace_back();
    out.tree.nodes.emplace_back();
    out.node_stats.push_back(left_stats);
    out.node_stats.push_back(right_stats);
    criterion.Fill(&out.tree.nodes[left_id], left_stats);
    criterion.Fill(&out.tree.nodes[right_id], right_stats);
    out.tree.nodes[f.node].column = best_column;
    out.tree.nodes[f.node].left = left_id;
    out.tree.nodes[f.node].right = right_id;
    stack.push_back({right_id, split, f.end, f.depth + 1});
    stack.push_back({left_id, f.begin, split, f.depth + 1});
  }
  return out;
}

// Squared-error regression statistics.
struct RegressionStats {
  double weight = 0.0;
  double sum = 0.0;

  bool Empty() const { return weight <= 0.0; }
  RegressionStats& operator+=(const RegressionStats& o) {
    weight += o.weight;
    sum += o.sum;
    return *this;
  }
  friend RegressionStats operator-(RegressionStats a, const RegressionStats& b) {
    a.weight -= b.weight;
    a.sum -= b.sum;
    return a;
  }
};

// SSE reduction of a split: sum_L^2/w_L + sum_R^2/w_R - sum_P^2/w_P.
inline double SseReduction(const RegressionStats& parent,
                           const RegressionStats& left,
                           const RegressionStats& right) {
  return left.sum * left.sum / left.weight +
         right.sum * right.sum / right.weight -
         parent.sum * parent.sum / parent.weight;
}

struct RegressionCriterion {
  using Stats = RegressionStats;

  double min_leaf_weight = 1.0;
  double min_split_weight = 2.0;
  // Splits must reduce SSE by more than this.
  double min_reduction = 0.0;

  bool Splittable(const Stats& s, int) const {
    return s.weight >= min_split_weight;
  }
  double Gain(const Stats& parent, const Stats& left, const Stats& right) const {
    if (left.weight < min_leaf_weight || right.weight < min_leaf_weight) {
      return -std::numeric_limits<double>::infinity();
    }
    return SseReduction(parent, left, right);
  }
  bool Accept(double gain) const { return gain > min_reduction; }
  void Fill(BinaryTree::Node* node, const Stats& s) const {
    node->value = s.weight > 0 ? s.sum / s.weight : 0.0;
    node->weight = s.weight;
  }
};

// Lower bound on accepted SSE reductions, so that floating-point noise on a
// useless split is never mistaken for progress.
inline double ReductionFloor(double root_sse, double total_weight) {
  return 1e-12 * (std::abs(root_sse) + total_weight * 1e-12) + 1e-300;
}

}  // namespace uplift

#endif  // UPLIFT_TREE_H_
