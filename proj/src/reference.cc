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

#include "uplift/reference.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "uplift/evaluation.h"
#include "uplift/rng.h"

namespace uplift::reference {
namespace {

struct Grower {
  const DenseRows& x;
  std::span<const double> y;
  std::vector<double> m;
  TreeOptions opt;
  Rng rng;
  std::vector<int> order;
  BinaryTree tree;

  void Fill(int node, const std::vector<size_t>& units) {
    double w = 0, s = 0;
    for (size_t i : units) {
      w += m[i];
      s += m[i] * y[i];
    }
    tree.nodes[node].weight = w;
    tree.nodes[node].value = w > 0 ? s / w : 0.0;
  }

  void Grow(int node, const std::vector<size_t>& units, int depth) {
    const double w = tree.nodes[node].weight;
    if (depth >= opt.max_depth || w < opt.min_split) return;
    const int p = static_cast<int>(order.size());
    std::vector<int> candidates;
    if (opt.mtry > 0 && opt.mtry < p) {
      for (int k = 0; k < opt.mtry; ++k) {
        const int j = k + static_cast<int>(rng.UniformIndex(p - k));
        std::swap(order[k], order[j]);
      }
      candidates.assign(order.begin(), order.begin() + opt.mtry);
      std::sort(candidates.begin(), candidates.end());
    } else {
      candidates.resize(p);
      std::iota(candidates.begin(), candidates.end(), 0);
    }
    double ps = 0;
    for (size_t i : units) ps += m[i] * y[i];

    double best = -std::numeric_limits<double>::infinity();
    int best_c = -1;
    for (int c : candidates) {
      double lw = 0, ls = 0, rw = 0, rs = 0;
      for (size_t i : units) {
        if (x[i][c]) {
          rw += m[i];
          rs += m[i] * y[i];
        } else {
          lw += m[i];
          ls += m[i] * y[i];
        }
      }
      if (rw <= 0 || lw <= 0) continue;
      if (lw < opt.min_leaf || rw < opt.min_leaf) continue;
      const double gain = ls * ls / lw + rs * rs / rw - ps * ps / w;
      if (gain > best) {
        best = gain;
        best_c = c;
      }
    }
    if (best_c < 0 || !(best > opt.min_reduction)) return;

    std::vector<size_t> left, right;
    for (size_t i : units) (x[i][best_c] ? right : left).push_back(i);
    const int l = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[node].column = best_c;
    tree.nodes[node].left = l;
    tree.nodes[node].right = l + 1;
    Fill(l, left);
    Fill(l + 1, right);
    Grow(l, left, depth + 1);
    Grow(l + 1, right, depth + 1);
  }
};

}  // namespace

BinaryTree RegressionTree(const DenseRows& x, std::span<const double> y,
                          std::span<const double> multiplicity,
                          const TreeOptions& options) {
  const size_t n = x.size();
  const int p = n > 0 ? static_cast<int>(x[0].size()) : 0;
  Grower g{x, y, {}, options, Rng(options.seed), {}, {}};
  g.m.assign(n, 1.0);
  if (!multiplicity.empty()) g.m.assign(multiplicity.begin(), multiplicity.end());
  g.order.resize(p);
  std::iota(g.order.begin(), g.order.end(), 0);
  std::vector<size_t> units;
  for (size_t i = 0; i < n; ++i) {
    if (g.m[i] > 0) units.push_back(i);
  }
  g.tree.nodes.emplace_back();
  g.Fill(0, units);
  g.Grow(0, units, 0);
  return g.tree;
}

std::vector<BinaryTree> Forest(const DenseRows& x, std::span<const double> y,
                               int num_trees, bool bootstrap, uint64_t seed,
                               const TreeOptions& options) {
  const size_t n = x.size();
  std::vector<BinaryTree> trees;
  for (int b = 0; b < num_trees; ++b) {
    std::vector<double> count(n, bootstrap ? 0.0 : 1.0);
    if (bootstrap) {
      Rng rng(DeriveSeed(seed, 2 * static_cast<uint64_t>(b)));
      for (size_t k = 0; k < n; ++k) count[rng.UniformIndex(n)] += 1.0;
    }
    TreeOptions o = options;
    o.seed = DeriveSeed(seed, 2 * static_cast<uint64_t>(b) + 1);
    trees.push_back(RegressionTree(x, y, count, o));
  }
  return trees;
}

double PredictTree(const BinaryTree& tree, std::span<const uint8_t> row) {
  int n = 0;
  while (tree.nodes[n].column >= 0) {
    n = row[tree.nodes[n].column] ? tree.nodes[n].right : tree.nodes[n].left;
  }
  return tree.nodes[n].value;
}

double IpsEmpirical(std::span<const int> prescribed, std::span<const int> actual,
                    std::span<const double> y) {
  std::unordered_map<int, double> n_pi, n_cong;
  for (size_t i = 0; i < prescribed.size(); ++i) {
    n_pi[prescribed[i]] += 1;
    if (prescribed[i] == actual[i]) n_cong[prescribed[i]] += 1;
  }
  double total = 0;
  for (size_t i = 0; i < prescribed.size(); ++i) {
    if (prescribed[i] != actual[i]) continue;
    const double e = n_cong[prescribed[i]] / n_pi[prescribed[i]];
    total += y[i] / e;
  }
  return total / static_cast<double>(prescribed.size());
}

std::vector<double> BootstrapIps(std::span<const int> prescribed,
                                 std::span<const int> actual,
                                 std::span<const double> y, int replicates,
                                 uint64_t seed) {
  const int64_t n = static_cast<int64_t>(prescribed.size());
  std::vector<double> values;
  for (int b = 0; b < replicates; ++b) {
    const auto idx = BootstrapIndices(seed, b, n);
    std::vector<int> p(n), a(n);
    std::vector<double> v(n);
    for (int64_t k = 0; k < n; ++k) {
      p[k] = prescribed[idx[k]];
      a[k] = actual[idx[k]];
      v[k] = y[idx[k]];
    }
    values.push_back(IpsEmpirical(p, a, v));
  }
  return values;
}

}  // namespace uplift::reference
