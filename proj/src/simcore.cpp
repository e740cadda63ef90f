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

#include "engn/simcore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>

#include "engn/dataflow.hpp"
#include "engn/davc.hpp"

namespace engn {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T out{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw SimError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "off" || text == "no") return false;
  throw SimError("config key '" + std::string(key) + "': expected a boolean, got '" + std::string(text) + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// SimConfig

void SimConfig::validate() const {
  auto positive = [](std::uint64_t v, const char* name) {
    if (v == 0) throw SimError(std::string(name) + " must be positive");
  };
  positive(rows, "rows");
  positive(cols, "cols");
  positive(rf_words, "rf_words");
  positive(davc_bytes, "davc_bytes");
  positive(davc_line_words, "davc_line_words");
  positive(result_bank_bytes, "result_bank_bytes");
  positive(dram_bandwidth_bytes_per_cycle, "dram_bandwidth_bytes_per_cycle");
  positive(element_bytes, "element_bytes");
  if (!(davc_static_fraction >= 0.0 && davc_static_fraction <= 1.0)) {
    throw SimError("davc_static_fraction must be in [0, 1]");
  }
}

std::size_t SimConfig::davc_lines() const { return davc_bytes / (davc_line_words * element_bytes); }

void SimConfig::set(std::string_view key, std::string_view value) {
  using U = std::uint64_t;
  if (key == "rows") rows = parse_value<U>(key, value);
  else if (key == "cols") cols = parse_value<U>(key, value);
  else if (key == "rf_words") rf_words = parse_value<U>(key, value);
  else if (key == "davc_bytes") davc_bytes = parse_value<U>(key, value);
  else if (key == "davc_static_fraction" || key == "rho") davc_static_fraction = parse_value<double>(key, value);
  else if (key == "davc_line_words") davc_line_words = parse_value<U>(key, value);
  else if (key == "davc_enabled") davc_enabled = parse_bool(key, value);
  else if (key == "result_bank_bytes") result_bank_bytes = parse_value<U>(key, value);
  else if (key == "result_bank_latency") result_bank_latency = parse_value<U>(key, value);
  else if (key == "dram_bandwidth_bytes_per_cycle") dram_bandwidth_bytes_per_cycle = parse_value<U>(key, value);
  else if (key == "dram_latency_cycles") dram_latency_cycles = parse_value<U>(key, value);
  else if (key == "element_bytes") element_bytes = parse_value<U>(key, value);
  else if (key == "prefetch_enabled") prefetch_enabled = parse_bool(key, value);
  else if (key == "ideal_memory") ideal_memory = parse_bool(key, value);
  else if (key == "reorganize_edges") reorganize_edges = parse_bool(key, value);
  else if (key == "pipeline_fill") pipeline_fill = parse_bool(key, value);
  else if (key == "record_events") record_events = parse_bool(key, value);
  else throw SimError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> SimConfig::entries() const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"rows", std::to_string(rows)},
      {"cols", std::to_string(cols)},
      {"rf_words", std::to_string(rf_words)},
      {"davc_bytes", std::to_string(davc_bytes)},
      {"davc_static_fraction", format_double(davc_static_fraction)},
      {"davc_line_words", std::to_string(davc_line_words)},
      {"davc_enabled", b(davc_enabled)},
      {"result_bank_bytes", std::to_string(result_bank_bytes)},
      {"result_bank_latency", std::to_string(result_bank_latency)},
      {"dram_bandwidth_bytes_per_cycle", std::to_string(dram_bandwidth_bytes_per_cycle)},
      {"dram_latency_cycles", std::to_string(dram_latency_cycles)},
      {"element_bytes", std::to_string(element_bytes)},
      {"prefetch_enabled", b(prefetch_enabled)},
      {"ideal_memory", b(ideal_memory)},
      {"reorganize_edges", b(reorganize_edges)},
      {"pipeline_fill", b(pipeline_fill)},
      {"record_events", b(record_events)},
  };
}

double SimStats::davc_hit_rate() const {
  const auto total = davc_hits + davc_misses;
  return total == 0 ? 0.0 : static_cast<double>(davc_hits) / static_cast<double>(total);
}

std::vector<std::pair<std::string, double>> SimStats::entries() const {
  auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  return {
      {"cycles_feature", d(cycles_feature)},
      {"cycles_aggregate", d(cycles_aggregate)},
      {"cycles_update", d(cycles_update)},
      {"cycles_memory_stall", d(cycles_memory_stall)},
      {"cycles_fill", d(cycles_fill)},
      {"cycles_total", d(cycles_total)},
      {"dram_read_bytes", d(dram_read_bytes)},
      {"dram_write_bytes", d(dram_write_bytes)},
      {"dram_vertex_read_words", d(dram_vertex_read_words)},
      {"dram_vertex_write_words", d(dram_vertex_write_words)},
      {"dram_edge_read_bytes", d(dram_edge_read_bytes)},
      {"dram_weight_read_bytes", d(dram_weight_read_bytes)},
      {"davc_hits", d(davc_hits)},
      {"davc_misses", d(davc_misses)},
      {"davc_hit_rate", davc_hit_rate()},
      {"davc_stall_cycles", d(davc_stall_cycles)},
      {"edges_processed", d(edges_processed)},
      {"ring_rotations", d(ring_rotations)},
      {"source_batches", d(source_batches)},
      {"pe_busy_cycles", d(pe_busy_cycles)},
      {"feature_busy_cycles", d(feature_busy_cycles)},
      {"utilization", utilization},
      {"feature_utilization", feature_utilization},
      {"analytic_read_words", d(analytic_read_words)},
      {"analytic_write_words", d(analytic_write_words)},
  };
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::FeatureReady: return "feature_ready";
    case EventKind::Accumulate: return "accumulate";
    case EventKind::AggregateDone: return "aggregate_done";
    case EventKind::UpdateDone: return "update_done";
  }
  return "?";
}

std::string format_event(const TraceEvent& e) {
  std::string s = std::to_string(e.cycle) + ' ' + std::string(to_string(e.kind)) + " v=" + std::to_string(e.vertex);
  if (e.kind == EventKind::Accumulate) s += " src=" + std::to_string(e.src);
  return s;
}

// ---------------------------------------------------------------------------
// Per-model stage costs
//
//   model       feature / source batch     update / destination batch
//   GCN FAU     f ceil(h/C)                1
//   GCN AFU     0                          f ceil(h/C) + 1
//   GS-Pool     f ceil(P/C)                (P + f) ceil(h/C) + 1
//   R-GCN       0                          (R + 1) f ceil(h/C) + 1
//   Gated-GCN   2 f ceil(f/C)              f ceil(h/C) + 1
//   GRN         0                          f ceil(h/C) + 6 h ceil(h/C) + 1

namespace {

struct StageCost {
  std::uint64_t feature_cycles = 0;  // per source batch
  std::uint64_t feature_macs = 0;    // per source vertex
  std::uint64_t update_cycles = 0;   // per destination batch
  std::uint64_t update_macs = 0;     // per destination vertex
};

StageCost stage_cost(const LayerSpec& layer, StageOrder order, std::uint64_t c) {
  const std::uint64_t f = layer.f;
  const std::uint64_t h = layer.h;
  const std::uint64_t hs = ceil_div(h, c);
  StageCost s;
  switch (layer.kind) {
    case ModelKind::GCN:
      if (order == StageOrder::FAU) {
        s.feature_cycles = f * hs;
        s.feature_macs = f * h;
      } else {
        s.update_cycles = f * hs;
        s.update_macs = f * h;
      }
      break;
    case ModelKind::GSPool: {
      const std::uint64_t p = layer.pool_dim;
      s.feature_cycles = f * ceil_div(p, c);
      s.feature_macs = f * p;
      s.update_cycles = (p + f) * hs;
      s.update_macs = (p + f) * h;
      break;
    }
    case ModelKind::RGCN: {
      const std::uint64_t in = (layer.num_relations + 1) * f;
      s.update_cycles = in * hs;
      s.update_macs = in * h;
      break;
    }
    case ModelKind::GatedGCN:
      s.feature_cycles = 2 * f * ceil_div(f, c);
      s.feature_macs = 2 * f * f;
      s.update_cycles = f * hs;
      s.update_macs = f * h;
      break;
    case ModelKind::GRN:
      s.update_cycles = f * hs + 6 * h * hs;
      s.update_macs = f * h + 6 * h * h;
      break;
  }
  s.update_cycles += 1;  // XPE: activation, bias, rounding
  return s;
}

std::uint64_t weight_words(const LayerSpec& layer) {
  const WeightSet& w = layer.weights;
  std::uint64_t n = static_cast<std::uint64_t>(w.feature.size() + w.self.size() + w.pool.size() + w.pool_bias.size() +
                                                w.update.size() + w.gate_dst.size() + w.gate_src.size() + w.bias.size());
  for (const auto& m : w.relation) n += static_cast<std::uint64_t>(m.size());
  const GruWeights& g = w.gru;
  n += static_cast<std::uint64_t>(g.w_z.size() + g.u_z.size() + g.w_r.size() + g.u_r.size() + g.w_h.size() +
                                  g.u_h.size() + g.b_z.size() + g.b_r.size() + g.b_h.size());
  return n;
}

void check_plan(const Graph& g, const TileGrid& tiles, const LayerSpec& layer, const SimPlan& plan, const SimConfig& cfg) {
  if (!order_is_valid(layer, plan.order)) {
    throw SimError("plan stage order " + std::string(to_string(plan.order)) + " is not valid for " +
                   std::string(to_string(layer.kind)) + " with " + std::string(to_string(layer.aggregator)) +
                   " aggregation");
  }
  const std::size_t q = tiles.q();
  if (q == 0) throw SimError("tile grid is empty");
  const auto ivs = tiles.intervals();
  if (ivs.front().lo != 0 || ivs.back().hi != g.num_vertices()) throw SimError("tile grid does not cover the graph's vertices");
  if (plan.tiles.tiles.size() != q * q) throw SimError("tile order has " + std::to_string(plan.tiles.tiles.size()) +
                                                       " tiles, grid needs " + std::to_string(q * q));
  std::vector<char> seen(q * q, 0);
  for (const TileCoord& t : plan.tiles.tiles) {
    if (t.i >= q || t.j >= q || seen[t.i * q + t.j]) throw SimError("tile order is not a permutation of the grid");
    seen[t.i * q + t.j] = 1;
  }
  const std::size_t width = std::max(layer.aggregate_width(plan.order), layer.h);
  for (const Interval& iv : ivs) {
    const std::size_t need = iv.size() * width * cfg.element_bytes;
    if (need > cfg.result_bank_bytes) {
      throw SimError("interval " + std::to_string(iv.index) + " needs " + std::to_string(need) +
                     " result-bank bytes, capacity is " + std::to_string(cfg.result_bank_bytes));
    }
  }
}

// DRAM transfer accounting with one-tile-ahead prefetch.
class Memory {
 public:
  Memory(const SimConfig& cfg, SimStats& stats) : cfg_(cfg), stats_(stats) {}

  void read_words(std::uint64_t words) {
    stats_.dram_vertex_read_words += words;
    read_bytes(words * cfg_.element_bytes);
  }
  void write_words(std::uint64_t words) {
    stats_.dram_vertex_write_words += words;
    const std::uint64_t bytes = words * cfg_.element_bytes;
    stats_.dram_write_bytes += bytes;
    pending_ += bytes;
  }
  void read_bytes(std::uint64_t bytes) {
    stats_.dram_read_bytes += bytes;
    pending_ += bytes;
  }

  /// Cycles the compute timeline must wait before the next tile starts, given
  /// the compute length of the previous tile (0 for the first tile).
  std::uint64_t settle(std::uint64_t previous_compute, bool first) {
    const std::uint64_t cost = transfer_cycles(pending_);
    pending_ = 0;
    if (cfg_.prefetch_enabled && !first) return cost > previous_compute ? cost - previous_compute : 0;
    return cost;
  }

 private:
  std::uint64_t transfer_cycles(std::uint64_t bytes) const {
    if (bytes == 0 || cfg_.ideal_memory) return 0;
    return ceil_div(bytes, cfg_.dram_bandwidth_bytes_per_cycle) + cfg_.dram_latency_cycles;
  }

  const SimConfig& cfg_;
  SimStats& stats_;
  std::uint64_t pending_ = 0;
};

}  // namespace

std::uint64_t feature_batch_cycles(const LayerSpec& layer, StageOrder order, std::size_t cols) {
  return stage_cost(layer, order, cols).feature_cycles;
}

std::uint64_t update_batch_cycles(const LayerSpec& layer, StageOrder order, std::size_t cols) {
  return stage_cost(layer, order, cols).update_cycles;
}

std::size_t choose_q(std::size_t num_vertices, const std::vector<LayerSpec>& layers, const SimConfig& cfg,
                     std::optional<StageOrder> force_order) {
  if (num_vertices == 0) throw SimError("graph has no vertices");
  std::size_t width = 1;
  for (const LayerSpec& l : layers) {
    const StageOrder order = force_order.value_or(dasr_decide(l.f, l.h, l.aggregator, l.kind));
    width = std::max({width, l.h, l.aggregate_width(order)});
  }
  const std::size_t per_vertex = width * cfg.element_bytes;
  const std::size_t fit = cfg.result_bank_bytes / per_vertex;
  if (fit == 0) throw SimError("a single vertex does not fit the result banks");
  const std::size_t q = (num_vertices + fit - 1) / fit;
  return std::min(q, num_vertices);
}

template <typename Scalar>
SimResult<Scalar> simulate_layer(const Graph& g, const TileGrid& tiles, const LayerSpec& layer,
                                 const PropertyMatrix<Scalar>& props, const SimPlan& plan, const SimConfig& cfg) {
  cfg.validate();
  layer.validate();
  check_plan(g, tiles, layer, plan, cfg);

  SimResult<Scalar> result;
  result.output = forward_layer<Scalar>(layer, props, g, plan.order);
  SimStats& st = result.stats;

  const std::size_t r = cfg.rows;
  const std::size_t c = cfg.cols;
  const std::size_t q = tiles.q();
  const StageCost cost = stage_cost(layer, plan.order, c);
  const std::uint64_t width = layer.message_width(plan.order);
  const std::uint64_t passes = std::max<std::uint64_t>(1, ceil_div(width, c));
  const std::uint64_t src_words = layer.f;
  const std::uint64_t dst_words = layer.h;
  const std::uint64_t edge_bytes = (layer.kind == ModelKind::RGCN ? 3 : 2) * cfg.element_bytes;

  const std::vector<Edge> agg_edges = aggregation_edges(layer, g);
  const TileGrid grid = partition_edges(agg_edges, {tiles.intervals().begin(), tiles.intervals().end()});

  std::optional<Davc> davc;
  if (cfg.davc_enabled) davc.emplace(Davc::for_graph(g, cfg.davc_lines(), cfg.davc_static_fraction));

  // Last position of each destination interval in the tile order.
  std::vector<std::size_t> last_tile(q, 0);
  for (std::size_t k = 0; k < plan.tiles.tiles.size(); ++k) last_tile[plan.tiles.tiles[k].j] = k;

  std::vector<std::uint64_t> last_accumulate(g.num_vertices(), 0);
  std::vector<char> accumulated(g.num_vertices(), 0);
  auto& events = result.events;

  Memory mem(cfg, st);
  st.dram_weight_read_bytes = weight_words(layer) * cfg.element_bytes;
  mem.read_bytes(st.dram_weight_read_bytes);

  const bool column = plan.tiles.major == TileMajor::Column;
  std::optional<std::size_t> held_src;
  std::optional<std::size_t> held_dst;
  std::uint64_t t = 0;
  std::uint64_t previous_compute = 0;

  for (std::size_t k = 0; k < plan.tiles.tiles.size(); ++k) {
    const TileCoord tc = plan.tiles.tiles[k];
    const Interval& src_iv = grid.interval(tc.i);
    const Interval& dst_iv = grid.interval(tc.j);
    const auto shard = grid.shard(tc.i, tc.j);

    if (column) {
      if (held_dst != tc.j) {
        if (held_dst) mem.write_words(dst_words * grid.interval(*held_dst).size());
        mem.read_words(dst_words * dst_iv.size());
        held_dst = tc.j;
      }
      if (held_src != tc.i) {
        mem.read_words(src_words * src_iv.size());
        held_src = tc.i;
      }
    } else {
      if (held_src != tc.i) {
        mem.read_words(src_words * src_iv.size());
        held_src = tc.i;
      }
      if (held_dst != tc.j) {
        mem.read_words(dst_words * dst_iv.size());
        held_dst = tc.j;
      }
    }
    st.dram_edge_read_bytes += shard.size() * edge_bytes;
    mem.read_bytes(shard.size() * edge_bytes);

    const std::uint64_t stall = mem.settle(previous_compute, k == 0);
    st.cycles_memory_stall += stall;
    t += stall;
    const std::uint64_t tile_start = t;

    // Bucket the shard's edges by source batch of R vertices.
    const std::size_t num_batches = (src_iv.size() + r - 1) / r;
    std::vector<std::vector<Edge>> by_batch(num_batches);
    for (const Edge& e : shard) by_batch[(e.src - src_iv.lo) / r].push_back(e);

    std::uint64_t fe_free = tile_start;
    std::uint64_t ag_free = tile_start;
    for (std::size_t b = 0; b < num_batches; ++b) {
      if (by_batch[b].empty()) continue;
      const SourceBatch batch{static_cast<VertexId>(src_iv.lo + b * r),
                              std::min<std::size_t>(r, src_iv.hi - (src_iv.lo + b * r))};
      ++st.source_batches;

      const std::uint64_t fe_end = fe_free + cost.feature_cycles;
      fe_free = fe_end;
      st.cycles_feature += cost.feature_cycles;
      st.feature_busy_cycles += batch.size * cost.feature_macs;
      if (cfg.record_events && cost.feature_cycles > 0) {
        for (std::size_t s = 0; s < batch.size; ++s) {
          events.push_back({fe_end - 1, EventKind::FeatureReady, static_cast<VertexId>(batch.first + s), 0});
        }
      }

      EdgeBankLayout layout = hash_edges(by_batch[b], r);
      if (cfg.reorganize_edges) layout = reorganize(layout, batch);
      const RingTrace trace = ring_trace(layout, batch);

      // Destination accesses go through the DAVC. A ring cycle with any miss
      // (or any access at all when the cache is off) stalls the ring.
      std::vector<std::uint64_t> stall_before(trace.events.size(), 0);
      std::uint64_t davc_stall = 0;
      for (std::size_t e = 0; e < trace.events.size();) {
        const std::uint64_t cyc = trace.events[e].cycle;
        bool miss = !davc.has_value();
        std::size_t end = e;
        for (; end < trace.events.size() && trace.events[end].cycle == cyc; ++end) {
          if (davc && !davc->access(trace.events[end].edge.dst)) miss = true;
        }
        if (miss) davc_stall += cfg.result_bank_latency;
        for (std::size_t x = e; x < end; ++x) stall_before[x] = davc_stall;
        e = end;
      }

      const std::uint64_t ring_cycles = trace.cycles * passes;
      const std::uint64_t ag = ring_cycles + davc_stall * passes;
      const std::uint64_t ag_start = std::max(fe_end, ag_free);
      ag_free = ag_start + ag;
      st.cycles_aggregate += ag;
      st.davc_stall_cycles += davc_stall * passes;
      st.ring_rotations += trace.rotations * passes;
      st.edges_processed += trace.events.size();
      st.pe_busy_cycles += trace.events.size() * width;

      // Events report the final pass, when each accumulation becomes definitive.
      const std::uint64_t final_pass = ag_start + (passes - 1) * (trace.cycles + davc_stall);
      for (std::size_t x = 0; x < trace.events.size(); ++x) {
        const Consumption& ev = trace.events[x];
        const std::uint64_t when = final_pass + ev.cycle + stall_before[x];
        const VertexId dst = ev.edge.dst;
        if (!accumulated[dst] || when > last_accumulate[dst]) last_accumulate[dst] = when;
        accumulated[dst] = 1;
        if (cfg.record_events) events.push_back({when, EventKind::Accumulate, dst, ev.edge.src});
      }
    }
    t = std::max(fe_free, ag_free);

    if (k == last_tile[tc.j]) {
      if (cfg.record_events) {
        for (VertexId v = dst_iv.lo; v < dst_iv.hi; ++v) {
          if (accumulated[v]) events.push_back({last_accumulate[v], EventKind::AggregateDone, v, 0});
        }
      }
      for (VertexId first = dst_iv.lo; first < dst_iv.hi; first += static_cast<VertexId>(r)) {
        const VertexId last = static_cast<VertexId>(std::min<std::size_t>(dst_iv.hi, first + r));
        t += cost.update_cycles;
        st.cycles_update += cost.update_cycles;
        st.pe_busy_cycles += (last - first) * cost.update_macs;
        if (cfg.record_events) {
          for (VertexId v = first; v < last; ++v) events.push_back({t - 1, EventKind::UpdateDone, v, 0});
        }
      }
    }

    if (!column) mem.write_words(dst_words * dst_iv.size());
    previous_compute = t - tile_start;
  }
  if (column && held_dst) mem.write_words(dst_words * grid.interval(*held_dst).size());
  const std::uint64_t tail = mem.settle(previous_compute, false);
  st.cycles_memory_stall += tail;
  t += tail;

  st.pe_busy_cycles += st.feature_busy_cycles;
  st.cycles_fill = cfg.pipeline_fill && t > 0 ? r + c : 0;
  st.cycles_total = t + st.cycles_fill;

  if (davc) {
    st.davc_hits = davc->hits();
    st.davc_misses = davc->misses();
  }
  const double lanes = static_cast<double>(r) * static_cast<double>(c);
  // Stages overlap on the timeline, so occupancy is measured against the
  // summed stage-active time rather than wall-clock cycles.
  const std::uint64_t active = st.cycles_feature + st.cycles_aggregate + st.cycles_update;
  if (active > 0) st.utilization = static_cast<double>(st.pe_busy_cycles) / (static_cast<double>(active) * lanes);
  if (st.cycles_feature > 0) {
    st.feature_utilization = static_cast<double>(st.feature_busy_cycles) / (static_cast<double>(st.cycles_feature) * lanes);
  }

  const IoCostReport io = io_cost(q, layer.f, layer.h);
  const std::uint64_t n = g.num_vertices();
  st.analytic_read_words = io.read(plan.tiles.major) * n / q;
  st.analytic_write_words = io.write(plan.tiles.major) * n / q;

  if (cfg.record_events) {
    std::stable_sort(events.begin(), events.end(), [](const TraceEvent& a, const TraceEvent& b) {
      return std::tie(a.cycle, a.kind, a.vertex, a.src) < std::tie(b.cycle, b.kind, b.vertex, b.src);
    });
  }
  return result;
}

template SimResult<double> simulate_layer(const Graph&, const TileGrid&, const LayerSpec&, const PropertyMatrix<double>&,
                                          const SimPlan&, const SimConfig&);
template SimResult<Fixed32> simulate_layer(const Graph&, const TileGrid&, const LayerSpec&,
                                           const PropertyMatrix<Fixed32>&, const SimPlan&, const SimConfig&);

// ---------------------------------------------------------------------------

std::string_view to_string(MajorChoice m) {
  switch (m) {
    case MajorChoice::Adaptive: return "adaptive";
    case MajorChoice::Column: return "column";
    case MajorChoice::Row: return "row";
  }
  return "?";
}

MajorChoice parse_major_choice(std::string_view s) {
  if (s == "adaptive" || s == "auto") return MajorChoice::Adaptive;
  if (s == "column" || s == "col") return MajorChoice::Column;
  if (s == "row") return MajorChoice::Row;
  throw SimError("unknown tile order '" + std::string(s) + "' (expected adaptive, column or row)");
}

std::vector<ReportRow> run_report(const Graph& g, const std::vector<LayerSpec>& layers,
                                  const PropertyMatrix<Fixed32>& input, const SimConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const std::size_t q = options.q.value_or(choose_q(g.num_vertices(), layers, cfg, options.force_order));
  const TileGrid tiles = grid_partition(g, q);
  std::vector<ReportRow> rows;
  PropertyMatrix<Fixed32> x = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerSpec& layer = layers[l];
    SimPlan plan;
    plan.order = options.force_order.value_or(dasr_decide(layer.f, layer.h, layer.aggregator, layer.kind));
    TileMajor major = TileMajor::Column;
    if (options.major == MajorChoice::Adaptive) major = io_cost(q, layer.f, layer.h).chosen;
    else if (options.major == MajorChoice::Row) major = TileMajor::Row;
    plan.tiles = tile_order(q, major, options.s_shape);

    SimConfig run_cfg = cfg;
    run_cfg.record_events = false;
    SimResult<Fixed32> res = simulate_layer<Fixed32>(g, tiles, layer, x, plan, run_cfg);

    ReportRow row;
    row.label = options.label;
    row.layer = l;
    row.kind = layer.kind;
    row.f = layer.f;
    row.h = layer.h;
    row.order = plan.order;
    row.major = major;
    row.s_shape = options.s_shape;
    row.q = q;
    row.num_vertices = g.num_vertices();
    row.num_edges = g.num_edges();
    row.config = run_cfg;
    row.stats = res.stats;
    row.run = options.run;
    rows.push_back(std::move(row));
    x = std::move(res.output);
  }
  return rows;
}

std::vector<ReportRow> run_sweep(const Graph& g, const std::vector<LayerSpec>& layers,
                                 const PropertyMatrix<Fixed32>& input,
                                 const std::vector<std::pair<std::string, SimConfig>>& points, const RunOptions& options) {
  std::vector<ReportRow> all;
  for (const auto& [label, cfg] : points) {
    RunOptions opts = options;
    opts.label = label;
    auto rows = run_report(g, layers, input, cfg, opts);
    all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return all;
}

}  // namespace engn
