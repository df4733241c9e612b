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

#include "uplift/tree.h"

#include "uplift/error.h"

namespace uplift {

int BinaryTree::NumLeaves() const {
  int leaves = 0;
  for (const auto& n : nodes) leaves += n.column < 0 ? 1 : 0;
  return leaves;
}

int BinaryTree::Depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> depth(nodes.size(), 0);
  int max_depth = 0;
  // Children always have larger ids than their parent.
  for (size_t n = 0; n < nodes.size(); ++n) {
    if (nodes[n].column < 0) continue;
    depth[nodes[n].left] = depth[n] + 1;
    depth[nodes[n].right] = depth[n] + 1;
    max_depth = std::max(max_depth, depth[n] + 1);
  }
  return max_depth;
}

nlohmann::json BinaryTree::ToJson() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& n : nodes) {
    if (n.column < 0) {
      arr.push_back({{"value", n.value}, {"weight", n.weight}});
    } else {
      arr.push_back({{"column", n.column},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value},
                     {"weight", n.weight}});
    }
  }
  return arr;
}

BinaryTree BinaryTree::FromJson(const nlohmann::json& j) {
  BinaryTree t;
  for (const auto& e : j) {
    Node n;
    n.value = e.at("value").get<double>();
    n.weight = e.at("weight").get<double>();
    if (e.contains("column")) {
      n.column = e["column"].get<int>();
      n.left = e.at("left").get<int>();
      n.right = e.at("right").get<int>();
    }
    t.nodes.push_back(n);
  }
  const int size = static_cast<int>(t.nodes.size());
  for (int i = 0; i < size; ++i) {
    const Node& n = t.nodes[i];
    if (n.column >= 0 && (n.left <= i || n.right <= i || n.left >= size ||
                          n.right >= size)) {
      throw ParseError("malformed serialized tree");
    }
  }
  if (t.nodes.empty()) throw ParseError("empty serialized tree");
  return t;
}

}  // namespace uplift
