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

#pragma once

#include <cstdint>
#include <list>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engn/graph.hpp"

namespace engn {

/// Degree-aware vertex cache. Fully associative, one vertex property per line,
/// tagged by destination vertex id. A static region pinned to the highest
/// in-degree vertices, the remaining lines managed LRU.
class Davc {
 public:
  Davc(std::size_t lines, std::vector<VertexId> static_set);

  /// Static region = the floor(rho * lines) highest in-degree vertices, ties to the lower id.
  static Davc for_graph(const Graph& g, std::size_t lines, double static_fraction);

  /// Returns true on a hit. A miss fills a dynamic line, evicting the LRU one.
  bool access(VertexId dst);

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::size_t lines() const { return lines_; }
  std::size_t static_lines() const { return static_set_.size(); }
  std::size_t dynamic_capacity() const { return lines_ - static_set_.size(); }
  std::size_t dynamic_size() const { return lru_.size(); }
  bool is_static(VertexId v) const { return static_set_.contains(v); }
  bool is_resident(VertexId v) const { return is_static(v) || index_.contains(v); }

 private:
  std::size_t lines_;
  std::unordered_set<VertexId> static_set_;
  std::list<VertexId> lru_;  // front = most recent
  std::unordered_map<VertexId, std::list<VertexId>::iterator> index_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

/// The `k` highest in-degree vertices, ordered by (in-degree desc, id asc).
std::vector<VertexId> top_in_degree(const Graph& g, std::size_t k);

}  // namespace engn
