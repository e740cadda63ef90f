// Copyright 2026 The engn-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "engn/davc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace engn {

Davc::Davc(std::size_t lines, std::vector<VertexId> static_set)
    : lines_(lines), static_set_(static_set.begin(), static_set.end()) {
  if (static_set_.size() > lines_) throw std::invalid_argument("DAVC static region larger than the cache");
}

std::vector<VertexId> top_in_degree(const Graph& g, std::size_t k) {
  std::vector<VertexId> ids(g.num_vertices());
  std::iota(ids.begin(), ids.end(), VertexId{0});
  k = std::min(k, ids.size());
  const auto deg = g.in_degree();
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), [&](VertexId a, VertexId b) {
    return deg[a] != deg[b] ? deg[a] > deg[b] : a < b;
  });
  ids.resize(k);
  return ids;
}

Davc Davc::for_graph(const Graph& g, std::size_t lines, double static_fraction) {
  if (!(static_fraction >= 0.0 && static_fraction <= 1.0)) throw std::invalid_argument("DAVC static fraction must be in [0, 1]");
  const auto static_lines = static_cast<std::size_t>(std::floor(static_fraction * static_cast<double>(lines)));
  return Davc(lines, top_in_degree(g, static_lines));
}

bool Davc::access(VertexId dst) {
  if (static_set_.contains(dst)) {
    ++hits_;
    return true;
  }
  if (auto it = index_.find(dst); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    ++hits_;
    return true;
  }
  ++misses_;
  if (dynamic_capacity() == 0) return false;
  if (lru_.size() == dynamic_capacity()) {
    index_.erase(lru_.back());
    lru_.pop_back();
  }
  lru_.push_front(dst);
  index_[dst] = lru_.begin();
  return false;
}

}  // namespace engn
