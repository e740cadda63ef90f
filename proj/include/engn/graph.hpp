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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace engn {

using VertexId = std::uint32_t;
using Relation = std::uint16_t;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  std::optional<Relation> relation;
  std::optional<double> weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Canonical edge order: (dst, src, relation), then weight for full determinism.
bool canonical_less(const Edge& a, const Edge& b);
void sort_canonical(std::vector<Edge>& edges);

/// Directed multigraph in COO form. Immutable once built; edges are kept in
/// canonical order and degrees are precomputed.
class Graph {
 public:
  Graph() = default;

  /// Validates ids against `num_vertices` and sorts the edges canonically.
  static Graph from_edges(std::size_t num_vertices, std::vector<Edge> edges);

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const std::uint32_t> in_degree() const { return in_degree_; }
  std::span<const std::uint32_t> out_degree() const { return out_degree_; }
  /// 1 + the largest relation id present (0 when no edge carries one).
  std::size_t num_relations() const { return num_relations_; }

 private:
  std::size_t num_vertices_ = 0;
  std::size_t num_relations_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> in_degree_;
  std::vector<std::uint32_t> out_degree_;
};

/// Reads `src dst [relation] [weight]` lines; `#` starts a comment line.
/// When `num_vertices` is empty it becomes max id + 1.
Graph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> num_vertices = std::nullopt);
Graph parse_edge_list(std::istream& in, std::optional<std::size_t> num_vertices = std::nullopt);
void write_edge_list(const Graph& g, std::ostream& out);

struct RmatParams {
  double a = 0.57;
  double b = 0.19;
  double c = 0.19;
  double d = 0.05;
};

/// RMAT-style recursive generator. Duplicate (src, dst) draws and ids past
/// `n` are redrawn, so the result has exactly `e` distinct edges.
Graph generate_synthetic(std::size_t n, std::size_t e, std::uint64_t seed, const RmatParams& params = {});

/// Returns the list of violated invariants (empty when the graph is sound).
std::vector<std::string> check_invariants(const Graph& g);

// ---------------------------------------------------------------------------
// Grid tiling

struct Interval {
  std::size_t index = 0;
  VertexId lo = 0;  // inclusive
  VertexId hi = 0;  // exclusive

  std::size_t size() const { return hi - lo; }
  bool contains(VertexId v) const { return v >= lo && v < hi; }
};

/// Splits [0, n) into q contiguous intervals whose sizes differ by at most one
/// (the first n % q intervals get the extra vertex).
std::vector<Interval> make_intervals(std::size_t n, std::size_t q);

class TileGrid {
 public:
  TileGrid() = default;
  TileGrid(std::vector<Interval> intervals, std::vector<std::vector<Edge>> shards);

  std::size_t q() const { return intervals_.size(); }
  std::span<const Interval> intervals() const { return intervals_; }
  const Interval& interval(std::size_t i) const { return intervals_.at(i); }
  /// Edges with src in interval i and dst in interval j, canonical order.
  std::span<const Edge> shard(std::size_t i, std::size_t j) const { return shards_.at(i * q() + j); }
  std::size_t interval_of(VertexId v) const;

 private:
  std::vector<Interval> intervals_;
  std::vector<std::vector<Edge>> shards_;  // row-major q x q
};

/// Buckets an arbitrary edge list over given intervals.
TileGrid partition_edges(std::span<const Edge> edges, std::vector<Interval> intervals);
TileGrid grid_partition(const Graph& g, std::size_t q);

}  // namespace engn
