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

#include "engn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>
#include <tuple>
#include <unordered_set>

namespace engn {

bool canonical_less(const Edge& a, const Edge& b) {
  return std::tie(a.dst, a.src, a.relation, a.weight) < std::tie(b.dst, b.src, b.relation, b.weight);
}

void sort_canonical(std::vector<Edge>& edges) { std::stable_sort(edges.begin(), edges.end(), canonical_less); }

Graph Graph::from_edges(std::size_t num_vertices, std::vector<Edge> edges) {
  if (num_vertices > std::numeric_limits<VertexId>::max()) throw GraphError("vertex count exceeds 32-bit ids");
  Graph g;
  g.num_vertices_ = num_vertices;
  g.in_degree_.assign(num_vertices, 0);
  g.out_degree_.assign(num_vertices, 0);
  for (const Edge& e : edges) {
    if (e.src >= num_vertices || e.dst >= num_vertices) {
      throw GraphError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) + " out of range for " +
                       std::to_string(num_vertices) + " vertices");
    }
    ++g.out_degree_[e.src];
    ++g.in_degree_[e.dst];
    if (e.relation) g.num_relations_ = std::max<std::size_t>(g.num_relations_, std::size_t{*e.relation} + 1);
  }
  sort_canonical(edges);
  g.edges_ = std::move(edges);
  return g;
}

namespace {

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

Graph parse_edge_list(std::istream& in, std::optional<std::size_t> num_vertices) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(std::move(t));
    auto fail = [&](const std::string& why) {
      return GraphError("line " + std::to_string(line_no) + ": " + why + ": '" + line + "'");
    };
    if (tokens.size() < 2 || tokens.size() > 4) throw fail("expected 'src dst [relation] [weight]'");

    std::uint64_t src = 0;
    std::uint64_t dst = 0;
    if (!parse_number(tokens[0], src) || !parse_number(tokens[1], dst)) throw fail("malformed vertex id");
    if (src > std::numeric_limits<VertexId>::max() || dst > std::numeric_limits<VertexId>::max()) {
      throw fail("vertex id too large");
    }
    Edge e{static_cast<VertexId>(src), static_cast<VertexId>(dst), std::nullopt, std::nullopt};
    if (tokens.size() >= 3) {
      unsigned rel = 0;
      if (!parse_number(tokens[2], rel) || rel > std::numeric_limits<Relation>::max()) throw fail("malformed relation");
      e.relation = static_cast<Relation>(rel);
    }
    if (tokens.size() == 4) {
      double w = 0.0;
      if (!parse_number(tokens[3], w)) throw fail("malformed weight");
      e.weight = w;
    }
    if (num_vertices && (src >= *num_vertices || dst >= *num_vertices)) {
      throw fail("vertex id exceeds declared vertex count " + std::to_string(*num_vertices));
    }
    max_id = std::max({max_id, src, dst});
    edges.push_back(e);
  }
  if (edges.empty()) throw GraphError("edge list is empty");
  const std::size_t n = num_vertices.value_or(static_cast<std::size_t>(max_id) + 1);
  return Graph::from_edges(n, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> num_vertices) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list '" + path.string() + "'");
  try {
    return parse_edge_list(in, num_vertices);
  } catch (const GraphError& e) {
    throw GraphError(path.string() + ": " + e.what());
  }
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "# vertices " << g.num_vertices() << " edges " << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.src << ' ' << e.dst;
    if (e.relation) out << ' ' << *e.relation;
    if (e.weight) {
      if (!e.relation) out << " 0";
      out << ' ' << *e.weight;
    }
    out << '\n';
  }
}

Graph generate_synthetic(std::size_t n, std::size_t e, std::uint64_t seed, const RmatParams& params) {
  if (n == 0 || e == 0) throw GraphError("synthetic graph needs n >= 1 and e >= 1");
  if (n < 2) throw GraphError("synthetic graph needs at least 2 vertices");
  if (e > n * n) throw GraphError("cannot place " + std::to_string(e) + " distinct edges on " + std::to_string(n) + " vertices");
  const double total = params.a + params.b + params.c + params.d;
  if (!(total > 0.0)) throw GraphError("RMAT probabilities must be positive");

  unsigned scale = 0;
  while ((std::size_t{1} << scale) < n) ++scale;

  std::mt19937_64 rng(seed);
  // 53 random bits -> [0, 1); independent of the standard library's distributions.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double pa = params.a / total;
  const double pab = (params.a + params.b) / total;
  const double pabc = (params.a + params.b + params.c) / total;

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(e * 2);
  std::vector<Edge> edges;
  edges.reserve(e);
  while (edges.size() < e) {
    std::uint64_t src = 0;
    std::uint64_t dst = 0;
    for (unsigned level = 0; level < scale; ++level) {
      const double r = uniform();
      src <<= 1;
      dst <<= 1;
      if (r < pa) {
      } else if (r < pab) {
        dst |= 1;
      } else if (r < pabc) {
        src |= 1;
      } else {
        src |= 1;
        dst |= 1;
      }
    }
    if (src >= n || dst >= n) continue;
    if (!seen.insert(src * n + dst).second) continue;
    edges.push_back(Edge{static_cast<VertexId>(src), static_cast<VertexId>(dst), std::nullopt, std::nullopt});
  }
  return Graph::from_edges(n, std::move(edges));
}

std::vector<std::string> check_invariants(const Graph& g) {
  std::vector<std::string> problems;
  std::vector<std::uint32_t> in(g.num_vertices(), 0);
  std::vector<std::uint32_t> out(g.num_vertices(), 0);
  const auto edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.src >= g.num_vertices() || e.dst >= g.num_vertices()) {
      problems.push_back("edge " + std::to_string(k) + " has an out-of-range endpoint");
      continue;
    }
    ++in[e.dst];
    ++out[e.src];
    if (k > 0 && canonical_less(e, edges[k - 1])) problems.push_back("edge " + std::to_string(k) + " breaks canonical order");
  }
  if (!std::equal(in.begin(), in.end(), g.in_degree().begin(), g.in_degree().end())) problems.emplace_back("in-degree mismatch");
  if (!std::equal(out.begin(), out.end(), g.out_degree().begin(), g.out_degree().end())) problems.emplace_back("out-degree mismatch");
  return problems;
}

// ---------------------------------------------------------------------------

std::vector<Interval> make_intervals(std::size_t n, std::size_t q) {
  if (q == 0) throw GraphError("partition count q must be at least 1");
  if (q > n) throw GraphError("partition count q=" + std::to_string(q) + " exceeds vertex count " + std::to_string(n));
  std::vector<Interval> intervals;
  intervals.reserve(q);
  const std::size_t base = n / q;
  const std::size_t extra = n % q;
  VertexId lo = 0;
  for (std::size_t i = 0; i < q; ++i) {
    const auto size = static_cast<VertexId>(base + (i < extra ? 1 : 0));
    intervals.push_back(Interval{i, lo, static_cast<VertexId>(lo + size)});
    lo += size;
  }
  return intervals;
}

TileGrid::TileGrid(std::vector<Interval> intervals, std::vector<std::vector<Edge>> shards)
    : intervals_(std::move(intervals)), shards_(std::move(shards)) {}

std::size_t TileGrid::interval_of(VertexId v) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), v,
                             [](VertexId x, const Interval& iv) { return x < iv.hi; });
  if (it == intervals_.end()) throw GraphError("vertex " + std::to_string(v) + " outside the tiled range");
  return it->index;
}

TileGrid partition_edges(std::span<const Edge> edges, std::vector<Interval> intervals) {
  const std::size_t q = intervals.size();
  std::vector<std::vector<Edge>> shards(q * q);
  TileGrid lookup(intervals, {});
  for (const Edge& e : edges) {
    const std::size_t i = lookup.interval_of(e.src);
    const std::size_t j = lookup.interval_of(e.dst);
    shards[i * q + j].push_back(e);
  }
  // Input order is preserved per shard; canonical input stays canonical.
  return TileGrid(std::move(intervals), std::move(shards));
}

TileGrid grid_partition(const Graph& g, std::size_t q) {
  return partition_edges(g.edges(), make_intervals(g.num_vertices(), q));
}

}  // namespace engn
