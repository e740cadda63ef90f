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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "engn/davc.hpp"
#include "engn/report.hpp"
#include "engn/simcore.hpp"
#include "oracles.hpp"

using namespace engn;

namespace {

Graph example_graph() {
  std::vector<Edge> edges;
  for (auto [s, d] : std::vector<std::pair<VertexId, VertexId>>{{2, 0}, {3, 0}, {0, 1}, {1, 2}, {2, 3}}) {
    edges.push_back(Edge{s, d, std::nullopt, std::nullopt});
  }
  return Graph::from_edges(4, edges);
}

SimConfig golden_config() {
  SimConfig cfg;
  cfg.rows = 4;
  cfg.cols = 3;
  cfg.ideal_memory = true;
  cfg.record_events = true;
  return cfg;
}

SimConfig bare_memory() {
  SimConfig cfg;
  cfg.davc_enabled = false;
  cfg.prefetch_enabled = false;
  return cfg;
}

SimPlan plan_for(std::size_t q, StageOrder order, TileMajor major, bool s_shape = true) {
  return SimPlan{order, tile_order(q, major, s_shape)};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);)
    if (!l.empty() && l[0] != '#') lines.push_back(l);
  return lines;
}

}  // namespace

// ---------------------------------------------------------------------------
// DAVC

TEST_CASE("DAVC: a cache as large as the graph only takes compulsory misses") {
  Davc cache(10, {});
  std::mt19937_64 rng(1);
  std::vector<char> seen(10, 0);
  std::uint64_t first_touches = 0;
  for (int k = 0; k < 500; ++k) {
    const auto v = static_cast<VertexId>(rng() % 10);
    const bool hit = cache.access(v);
    CHECK(hit == static_cast<bool>(seen[v]));
    if (!seen[v]) ++first_touches;
    seen[v] = 1;
  }
  CHECK(cache.misses() == first_touches);
}

TEST_CASE("DAVC: all-static cache hits exactly the edges into the static set") {
  const Graph g = generate_synthetic(2000, 20000, 3);
  const std::size_t lines = 100;
  Davc cache = Davc::for_graph(g, lines, 1.0);
  CHECK(cache.static_lines() == lines);
  CHECK(cache.dynamic_capacity() == 0);
  // Independent top-k: sort (degree desc, id asc).
  std::vector<std::pair<std::int64_t, VertexId>> by_deg;
  for (VertexId v = 0; v < g.num_vertices(); ++v) by_deg.emplace_back(-static_cast<std::int64_t>(g.in_degree()[v]), v);
  std::sort(by_deg.begin(), by_deg.end());
  std::vector<char> top(g.num_vertices(), 0);
  for (std::size_t k = 0; k < lines; ++k) top[by_deg[k].second] = 1;
  std::uint64_t expect = 0;
  for (const Edge& e : g.edges()) {
    cache.access(e.dst);
    expect += top[e.dst];
  }
  CHECK(cache.hits() == expect);
  CHECK(cache.misses() == g.num_edges() - expect);
}

TEST_CASE("DAVC: one dynamic line thrashes on alternating accesses") {
  Davc cache(1, {});
  for (int k = 0; k < 20; ++k) cache.access(k % 2 ? 7 : 9);
  CHECK(cache.hits() == 0);
  CHECK(cache.misses() == 20);
}

TEST_CASE("DAVC: dynamic region is plain LRU; static and dynamic never overlap") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cap = rng() % 8;
    std::vector<VertexId> trace(300);
    for (auto& v : trace) v = static_cast<VertexId>(rng() % 12);
    Davc cache(cap, {});
    for (VertexId v : trace) cache.access(v);
    REQUIRE(cache.hits() == oracle::lru_hits(trace, cap));
    REQUIRE(cache.dynamic_size() <= cache.dynamic_capacity());
  }
  Davc mixed(4, {3, 5});
  for (VertexId v : {3u, 5u, 1u, 2u, 3u, 4u, 1u}) mixed.access(v);
  CHECK(mixed.is_static(3));
  CHECK(mixed.dynamic_size() == 2);
  CHECK(mixed.hits() == 3);  // static lines are preloaded: 3, 5, 3
  CHECK_THROWS(Davc(1, {1, 2}));
}

TEST_CASE("DAVC: static fraction rounds down to whole lines") {
  const Graph g = generate_synthetic(100, 500, 2);
  CHECK(Davc::for_graph(g, 10, 0.55).static_lines() == 5);
  CHECK(Davc::for_graph(g, 10, 0.0).static_lines() == 0);
  CHECK_THROWS(Davc::for_graph(g, 10, 1.5));
}

// ---------------------------------------------------------------------------
// Timeline

TEST_CASE("golden trace of the 4x3 array on the example graph") {
  const Graph g = example_graph();
  LayerSpec layer = make_layer(ModelKind::GCN, 5, 3, 1);
  const auto x = quantize<Fixed32>(random_matrix(4, 5, 2));
  const auto res = simulate_layer<Fixed32>(g, grid_partition(g, 1), layer, x,
                                           plan_for(1, StageOrder::FAU, TileMajor::Column), golden_config());

  auto find = [&](EventKind kind, VertexId v) -> std::uint64_t {
    for (const auto& e : res.events)
      if (e.kind == kind && e.vertex == v) return e.cycle;
    FAIL("missing event");
    return 0;
  };
  CHECK(find(EventKind::FeatureReady, 0) == 4);
  CHECK(find(EventKind::AggregateDone, 0) == 8);
  CHECK(find(EventKind::UpdateDone, 0) == 9);

  std::vector<std::uint64_t> acc0;
  std::vector<VertexId> src0;
  for (const auto& e : res.events)
    if (e.kind == EventKind::Accumulate && e.vertex == 0) {
      acc0.push_back(e.cycle);
      src0.push_back(e.src);
    }
  CHECK(acc0 == std::vector<std::uint64_t>{5, 7, 8});
  CHECK(src0 == std::vector<VertexId>{0, 2, 3});

  std::vector<std::string> got;
  for (const auto& e : res.events) got.push_back(format_event(e));
  CHECK(got == read_lines(std::string(ENGN_TEST_DATA_DIR) + "/golden_trace.txt"));
}

TEST_CASE("simulated values are bit-identical to the functional engine") {
  std::mt19937_64 rng(12);
  const ModelKind kinds[] = {ModelKind::GCN, ModelKind::GSPool, ModelKind::RGCN, ModelKind::GatedGCN, ModelKind::GRN};
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 8 + rng() % 40;
    const Graph g = oracle::random_graph(rng, n, 4 * n, 2);
    for (ModelKind kind : kinds) {
      const std::size_t f = 1 + rng() % 12;
      const std::size_t h = kind == ModelKind::GRN ? f : 1 + rng() % 12;
      const LayerSpec layer = make_layer(kind, f, h, rng(), LayerOptions{.num_relations = 2});
      const auto x = quantize<Fixed32>(random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f), rng()));
      SimConfig cfg;
      cfg.rows = 1 + rng() % 8;
      cfg.cols = 1 + rng() % 5;
      cfg.reorganize_edges = rng() % 2;
      cfg.davc_enabled = rng() % 2;
      const std::size_t q = 1 + rng() % 4;
      const auto order = kind == ModelKind::GCN && rng() % 2 ? StageOrder::AFU : StageOrder::FAU;
      const auto res = simulate_layer<Fixed32>(g, grid_partition(g, q), layer, x,
                                               plan_for(q, order, rng() % 2 ? TileMajor::Row : TileMajor::Column), cfg);
      REQUIRE(res.output == forward_layer<Fixed32>(layer, x, g, order));
    }
  }
}

TEST_CASE("pipeline bound holds") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng() % 60;
    const Graph g = oracle::random_graph(rng, n, 6 * n);
    const std::size_t f = 1 + rng() % 20, h = 1 + rng() % 20;
    const LayerSpec layer = make_layer(rng() % 2 ? ModelKind::GCN : ModelKind::GatedGCN, f, h, rng());
    const auto x = quantize<Fixed32>(random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f), 1));
    SimConfig cfg;
    cfg.rows = 1 + rng() % 8;
    cfg.cols = 1 + rng() % 8;
    cfg.ideal_memory = rng() % 2;
    const std::size_t q = 1 + rng() % 3;
    const auto st = simulate_layer<Fixed32>(g, grid_partition(g, q), layer, x,
                                            plan_for(q, StageOrder::FAU, TileMajor::Column), cfg)
                        .stats;
    const std::uint64_t lower = std::max(st.cycles_feature, st.cycles_aggregate) + st.cycles_update;
    const std::uint64_t upper = st.cycles_feature + st.cycles_aggregate + st.cycles_update + st.cycles_fill +
                                st.cycles_memory_stall;
    CHECK(st.cycles_total >= lower);
    CHECK(st.cycles_total <= upper);
    CHECK(st.utilization <= 1.0);
    CHECK(st.feature_utilization <= 1.0);
  }
}

// ---------------------------------------------------------------------------
// Traffic

TEST_CASE("vertex traffic equals the I/O closed form (q=4, f=8, h=2, column)") {
  const Graph g = example_graph();
  const LayerSpec layer = make_layer(ModelKind::GCN, 8, 2, 1);
  const auto x = quantize<Fixed32>(random_matrix(4, 8, 1));
  const auto st = simulate_layer<Fixed32>(g, grid_partition(g, 4), layer, x,
                                          plan_for(4, StageOrder::FAU, TileMajor::Column), bare_memory())
                      .stats;
  CHECK(st.dram_vertex_read_words == 112);
  CHECK(st.dram_vertex_write_words == 8);
  CHECK(st.dram_write_bytes == 8 * 4);
  CHECK(st.analytic_read_words == 112);
  CHECK(st.analytic_write_words == 8);
}

TEST_CASE("traffic conservation across q and both orders") {
  const Graph g = generate_synthetic(64, 400, 9);
  for (std::size_t q : {1, 2, 4, 8})
    for (TileMajor m : {TileMajor::Column, TileMajor::Row})
      for (auto [f, h] : std::vector<std::pair<std::size_t, std::size_t>>{{8, 2}, {2, 8}, {16, 16}}) {
        const LayerSpec layer = make_layer(ModelKind::GCN, f, h, 3);
        const auto x = quantize<Fixed32>(random_matrix(64, static_cast<Eigen::Index>(f), 2));
        const auto st = simulate_layer<Fixed32>(g, grid_partition(g, q), layer, x, plan_for(q, StageOrder::FAU, m),
                                                bare_memory())
                            .stats;
        const auto [r, w] = oracle::io_words(q, f, h, 64 / q, m == TileMajor::Column);
        CHECK(st.dram_vertex_read_words == r);
        CHECK(st.dram_vertex_write_words == w);
        CHECK(st.analytic_read_words == r);
        CHECK(st.analytic_write_words == w);
      }
}

TEST_CASE("prefetch hides transfers behind compute") {
  const Graph g = generate_synthetic(256, 4000, 2);
  const LayerSpec layer = make_layer(ModelKind::GCN, 32, 16, 3);
  const auto x = quantize<Fixed32>(random_matrix(256, 32, 2));
  SimConfig on;
  on.rows = 16;
  SimConfig off = on;
  off.prefetch_enabled = false;
  const auto plan = plan_for(4, StageOrder::FAU, TileMajor::Column);
  const auto a = simulate_layer<Fixed32>(g, grid_partition(g, 4), layer, x, plan, on).stats;
  const auto b = simulate_layer<Fixed32>(g, grid_partition(g, 4), layer, x, plan, off).stats;
  CHECK(a.dram_read_bytes == b.dram_read_bytes);
  CHECK(a.cycles_memory_stall < b.cycles_memory_stall);
  CHECK(a.cycles_total < b.cycles_total);
  SimConfig ideal = on;
  ideal.ideal_memory = true;
  CHECK(simulate_layer<Fixed32>(g, grid_partition(g, 4), layer, x, plan, ideal).stats.cycles_memory_stall == 0);
}

// ---------------------------------------------------------------------------
// Utilization and cache sweeps

TEST_CASE("feature-stage utilization does not depend on the input dimension") {
  const Graph g = generate_synthetic(256, 2048, 4);
  for (std::size_t f : {63, 64, 100}) {
    const LayerSpec layer = make_layer(ModelKind::GCN, f, 16, 1);
    const auto x = quantize<Fixed32>(random_matrix(256, static_cast<Eigen::Index>(f), 1));
    const auto st = simulate_layer<Fixed32>(g, grid_partition(g, 1), layer, x,
                                            plan_for(1, StageOrder::FAU, TileMajor::Column), SimConfig{})
                        .stats;
    CHECK(st.feature_utilization == 1.0);
  }
  // Padding lanes are idle when H is not a multiple of C.
  const LayerSpec odd = make_layer(ModelKind::GCN, 8, 20, 1);
  const auto st = simulate_layer<Fixed32>(g, grid_partition(g, 1), odd, quantize<Fixed32>(random_matrix(256, 8, 1)),
                                          plan_for(1, StageOrder::FAU, TileMajor::Column), SimConfig{})
                      .stats;
  CHECK(st.feature_utilization == doctest::Approx(20.0 / 32.0));
}

TEST_CASE("all-static DAVC hits grow with capacity") {
  const Graph g = generate_synthetic(3000, 30000, 6);
  const LayerSpec layer = make_layer(ModelKind::GCN, 16, 16, 1);
  const auto x = quantize<Fixed32>(random_matrix(3000, 16, 1));
  std::uint64_t prev = 0;
  for (std::size_t kb : {4, 8, 16, 32, 64}) {
    SimConfig cfg;
    cfg.davc_bytes = kb * 1024;
    cfg.davc_static_fraction = 1.0;
    const auto st = simulate_layer<Fixed32>(g, grid_partition(g, 1), layer, x,
                                            plan_for(1, StageOrder::FAU, TileMajor::Column), cfg)
                        .stats;
    CHECK(st.davc_hits >= prev);
    prev = st.davc_hits;
  }
}

// ---------------------------------------------------------------------------
// Errors and edge cases

TEST_CASE("result-bank capacity and plan mismatches are rejected") {
  const Graph g = generate_synthetic(64, 200, 1);
  const LayerSpec layer = make_layer(ModelKind::GCN, 8, 8, 1);
  const auto x = quantize<Fixed32>(random_matrix(64, 8, 1));
  SimConfig small;
  small.result_bank_bytes = 64 * 8 * 4 - 1;
  CHECK_THROWS_AS(simulate_layer<Fixed32>(g, grid_partition(g, 1), layer, x,
                                          plan_for(1, StageOrder::FAU, TileMajor::Column), small),
                  SimError);
  CHECK_NOTHROW(simulate_layer<Fixed32>(g, grid_partition(g, 2), layer, x,
                                        plan_for(2, StageOrder::FAU, TileMajor::Column), small));
  const LayerSpec pool = make_layer(ModelKind::GSPool, 8, 8, 1);
  CHECK_THROWS_AS(simulate_layer<Fixed32>(g, grid_partition(g, 1), pool, x,
                                          plan_for(1, StageOrder::AFU, TileMajor::Column), SimConfig{}),
                  SimError);
  CHECK_THROWS_AS(simulate_layer<Fixed32>(g, grid_partition(g, 2), layer, x,
                                          plan_for(1, StageOrder::FAU, TileMajor::Column), SimConfig{}),
                  SimError);
  SimConfig bad;
  bad.davc_static_fraction = 2.0;
  CHECK_THROWS_AS(bad.validate(), SimError);
}

TEST_CASE("graph without edges: no aggregation and no edge traffic") {
  const Graph g = Graph::from_edges(10, {});
  const LayerSpec layer = make_layer(ModelKind::GatedGCN, 4, 3, 1);
  const auto x = quantize<Fixed32>(random_matrix(10, 4, 1));
  const auto res = simulate_layer<Fixed32>(g, grid_partition(g, 2), layer, x,
                                           plan_for(2, StageOrder::FAU, TileMajor::Column), SimConfig{});
  CHECK(res.stats.cycles_aggregate == 0);
  CHECK(res.stats.cycles_feature == 0);
  CHECK(res.stats.dram_edge_read_bytes == 0);
  CHECK(res.stats.davc_hits + res.stats.davc_misses == 0);
  const auto width = static_cast<Eigen::Index>(layer.aggregate_width(StageOrder::FAU));
  const auto zero = PropertyMatrix<Fixed32>::Zero(10, width).eval();
  CHECK(res.output == update<Fixed32>(layer, zero, x));
}

TEST_CASE("config keys round trip") {
  SimConfig cfg;
  cfg.set("rows", "32");
  cfg.set("rho", "0.25");
  cfg.set("prefetch_enabled", "false");
  CHECK(cfg.rows == 32);
  CHECK(cfg.davc_static_fraction == 0.25);
  CHECK_FALSE(cfg.prefetch_enabled);
  SimConfig copy;
  for (const auto& [k, v] : cfg.entries()) copy.set(k, v);
  CHECK(copy.entries() == cfg.entries());
  CHECK_THROWS_AS(cfg.set("nonsense", "1"), SimError);
  CHECK_THROWS_AS(cfg.set("rows", "many"), SimError);
  CHECK_THROWS_AS(cfg.set("davc_enabled", "maybe"), SimError);
  CHECK(cfg.davc_lines() == 65536 / 64);
}

TEST_CASE("q is chosen so each interval fits the result banks") {
  SimConfig cfg;
  cfg.result_bank_bytes = 1000 * 16 * 4;
  const std::vector<LayerSpec> layers{make_layer(ModelKind::GCN, 32, 16, 1)};
  CHECK(choose_q(1000, layers, cfg) == 1);                    // FAU keeps 16-wide destinations
  CHECK(choose_q(1000, layers, cfg, StageOrder::AFU) == 2);  // 32-wide aggregates need two intervals
  CHECK(choose_q(10, layers, SimConfig{}) == 1);
}

TEST_CASE("reports are deterministic and pick plans per layer") {
  const Graph g = generate_synthetic(300, 3000, 1);
  const std::vector<LayerSpec> layers{make_layer(ModelKind::GCN, 64, 16, 1), make_layer(ModelKind::GCN, 16, 48, 2)};
  const auto x = quantize<Fixed32>(random_matrix(300, 64, 1));
  RunOptions opts;
  opts.q = 3;
  const auto a = run_report(g, layers, x, SimConfig{}, opts);
  const auto b = run_report(g, layers, x, SimConfig{}, opts);
  std::ostringstream ja, jb, ca, cb;
  write_jsonl(a, ja);
  write_jsonl(b, jb);
  write_csv(a, ca);
  write_csv(b, cb);
  CHECK(ja.str() == jb.str());
  CHECK(ca.str() == cb.str());
  REQUIRE(a.size() == 2);
  CHECK(a[0].order == StageOrder::FAU);
  CHECK(a[1].order == StageOrder::AFU);
  CHECK(a[0].major == io_cost(3, 64, 16).chosen);
  CHECK(a[1].major == io_cost(3, 16, 48).chosen);
  CHECK(a[0].stats.dram_vertex_read_words + a[0].stats.dram_vertex_write_words <=
        std::min(io_cost(3, 64, 16).total_col(), io_cost(3, 64, 16).total_row()) * 100);
}

TEST_CASE("sweep produces one row per point and layer") {
  const Graph g = generate_synthetic(200, 2000, 1);
  const std::vector<LayerSpec> layers{make_layer(ModelKind::GCN, 16, 8, 1)};
  const auto x = quantize<Fixed32>(random_matrix(200, 16, 1));
  std::vector<std::pair<std::string, SimConfig>> points;
  for (std::size_t kb : {1, 2, 4}) {
    SimConfig c;
    c.davc_bytes = kb * 1024;
    points.emplace_back("davc_bytes=" + std::to_string(kb * 1024), c);
  }
  const auto rows = run_sweep(g, layers, x, points, RunOptions{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == "davc_bytes=1024");
  CHECK(rows[0].stats.davc_hits <= rows[1].stats.davc_hits);
  CHECK(rows[1].stats.davc_hits <= rows[2].stats.davc_hits);
}
