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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "engn/fixed32.hpp"
#include "engn/graph.hpp"
#include "engn/model.hpp"
#include "engn/schedule.hpp"

namespace engn {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  std::size_t rows = 128;
  std::size_t cols = 16;
  std::size_t rf_words = 64;
  std::size_t davc_bytes = 65536;
  double davc_static_fraction = 1.0;
  std::size_t davc_line_words = 16;
  bool davc_enabled = true;
  std::size_t result_bank_bytes = std::size_t{1} << 20;
  std::uint64_t result_bank_latency = 4;
  std::uint64_t dram_bandwidth_bytes_per_cycle = 256;
  std::uint64_t dram_latency_cycles = 100;
  std::size_t element_bytes = 4;
  bool prefetch_enabled = true;
  bool ideal_memory = false;
  bool reorganize_edges = true;
  bool pipeline_fill = true;
  bool record_events = false;

  /// Throws SimError on zero sizes or a static fraction outside [0, 1].
  void validate() const;
  std::size_t davc_lines() const;
  /// Sets one field by its name (as listed by entries()); throws SimError on
  /// unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Every field as (name, value text), in declaration order.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

struct SimStats {
  std::uint64_t cycles_feature = 0;
  std::uint64_t cycles_aggregate = 0;
  std::uint64_t cycles_update = 0;
  std::uint64_t cycles_memory_stall = 0;
  std::uint64_t cycles_fill = 0;
  std::uint64_t cycles_total = 0;

  std::uint64_t dram_read_bytes = 0;
  std::uint64_t dram_write_bytes = 0;
  std::uint64_t dram_vertex_read_words = 0;
  std::uint64_t dram_vertex_write_words = 0;
  std::uint64_t dram_edge_read_bytes = 0;
  std::uint64_t dram_weight_read_bytes = 0;

  std::uint64_t davc_hits = 0;
  std::uint64_t davc_misses = 0;
  std::uint64_t davc_stall_cycles = 0;

  std::uint64_t edges_processed = 0;
  std::uint64_t ring_rotations = 0;
  std::uint64_t source_batches = 0;

  std::uint64_t pe_busy_cycles = 0;  // MAC-lane cycles, summed over PEs
  std::uint64_t feature_busy_cycles = 0;
  double utilization = 0.0;          // pe_busy / ((feature + aggregate + update cycles) * R * C)
  double feature_utilization = 0.0;  // feature_busy / (cycles_feature * R * C)

  std::uint64_t analytic_read_words = 0;
  std::uint64_t analytic_write_words = 0;

  double davc_hit_rate() const;
  /// Name/value pairs for reports, in a fixed order.
  std::vector<std::pair<std::string, double>> entries() const;
};

enum class EventKind { FeatureReady, Accumulate, AggregateDone, UpdateDone };
std::string_view to_string(EventKind k);

/// One timeline event. Cycles are on the compute timeline (cycle index during
/// which the event happens). `src` is only meaningful for Accumulate.
struct TraceEvent {
  std::uint64_t cycle = 0;
  EventKind kind = EventKind::FeatureReady;
  VertexId vertex = 0;
  VertexId src = 0;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};
std::string format_event(const TraceEvent& e);

struct SimPlan {
  StageOrder order = StageOrder::FAU;
  TileOrder tiles;
};

template <typename Scalar>
struct SimResult {
  PropertyMatrix<Scalar> output;
  SimStats stats;
  std::vector<TraceEvent> events;  // empty unless cfg.record_events
};

/// Per source batch of R vertices, feature-extraction cycles for this layer/order.
std::uint64_t feature_batch_cycles(const LayerSpec& layer, StageOrder order, std::size_t cols);
/// Per destination batch of R vertices, update cycles (matmul slices + one XPE cycle).
std::uint64_t update_batch_cycles(const LayerSpec& layer, StageOrder order, std::size_t cols);

/// Smallest q whose largest interval fits the result banks for every layer,
/// sized for the stage order each layer will run (DASR unless forced).
std::size_t choose_q(std::size_t num_vertices, const std::vector<LayerSpec>& layers, const SimConfig& cfg,
                     std::optional<StageOrder> force_order = std::nullopt);

/// Simulates one layer. The value output is forward_layer's, bit for bit; the
/// plan and config only affect statistics and events.
template <typename Scalar>
SimResult<Scalar> simulate_layer(const Graph& g, const TileGrid& tiles, const LayerSpec& layer,
                                 const PropertyMatrix<Scalar>& props, const SimPlan& plan, const SimConfig& cfg);

extern template SimResult<double> simulate_layer(const Graph&, const TileGrid&, const LayerSpec&,
                                                 const PropertyMatrix<double>&, const SimPlan&, const SimConfig&);
extern template SimResult<Fixed32> simulate_layer(const Graph&, const TileGrid&, const LayerSpec&,
                                                  const PropertyMatrix<Fixed32>&, const SimPlan&, const SimConfig&);

// ---------------------------------------------------------------------------
// Multi-layer runs and sweeps

enum class MajorChoice { Adaptive, Column, Row };
std::string_view to_string(MajorChoice m);
MajorChoice parse_major_choice(std::string_view s);

struct RunOptions {
  std::optional<StageOrder> force_order;  // empty: DASR
  MajorChoice major = MajorChoice::Adaptive;
  bool s_shape = true;
  std::optional<std::size_t> q;  // empty: choose_q
  std::string label;             // copied into each row (sweep point)
  std::vector<std::pair<std::string, std::string>> run;  // copied into each row
};

struct ReportRow {
  std::string label;
  std::size_t layer = 0;
  ModelKind kind = ModelKind::GCN;
  std::size_t f = 0;
  std::size_t h = 0;
  StageOrder order = StageOrder::FAU;
  TileMajor major = TileMajor::Column;
  bool s_shape = true;
  std::size_t q = 1;
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;
  SimConfig config;
  SimStats stats;
  /// Run-level settings outside SimConfig (graph source, seed, ...), reported verbatim.
  std::vector<std::pair<std::string, std::string>> run;
};

/// Runs the layer stack in Fixed32, feeding each layer's output to the next.
std::vector<ReportRow> run_report(const Graph& g, const std::vector<LayerSpec>& layers,
                                  const PropertyMatrix<Fixed32>& input, const SimConfig& cfg, const RunOptions& options);

/// One run per config point, concatenated in point order.
std::vector<ReportRow> run_sweep(const Graph& g, const std::vector<LayerSpec>& layers,
                                 const PropertyMatrix<Fixed32>& input,
                                 const std::vector<std::pair<std::string, SimConfig>>& points, const RunOptions& options);

}  // namespace engn
