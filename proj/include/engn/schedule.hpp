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
#include <string_view>
#include <vector>

#include "engn/model.hpp"

namespace engn {

// Dimension-aware stage reordering --------------------------------------------

/// Reordering is legal only when aggregation is a sum and extraction is
/// linear in the source property (GCN).
bool reorder_is_legal(ModelKind kind, Aggregator aggregator);

/// FAU when f >= h (ties go to FAU), AFU when f < h; FAU whenever reordering is illegal.
StageOrder dasr_decide(std::size_t f, std::size_t h, Aggregator aggregator, ModelKind kind);

struct OpCounts {
  std::uint64_t mac = 0;    // N * F * H
  std::uint64_t accum = 0;  // E * H (FAU) or E * F (AFU)
};
OpCounts count_ops(std::uint64_t n, std::uint64_t e, std::uint64_t f, std::uint64_t h, StageOrder order);

// Tile scheduling ----------------------------------------------------------

enum class TileMajor { Column, Row };
std::string_view to_string(TileMajor m);
TileMajor parse_tile_major(std::string_view s);

/// Vertex-property I/O in units of (interval x dimension):
///   column: read (Q^2 - Q + 1) F + Q H, write Q H
///   row:    read Q F + (Q^2 - Q + 1) H, write Q^2 H
struct IoCostReport {
  std::uint64_t q = 0, f = 0, h = 0;
  std::uint64_t read_col = 0, write_col = 0;
  std::uint64_t read_row = 0, write_row = 0;
  TileMajor chosen = TileMajor::Column;

  std::uint64_t total_col() const { return read_col + write_col; }
  std::uint64_t total_row() const { return read_row + write_row; }
  std::uint64_t total(TileMajor m) const { return m == TileMajor::Column ? total_col() : total_row(); }
  std::uint64_t read(TileMajor m) const { return m == TileMajor::Column ? read_col : read_row; }
  std::uint64_t write(TileMajor m) const { return m == TileMajor::Column ? write_col : write_row; }
};

/// Throws std::invalid_argument when q == 0. Equal totals choose column.
IoCostReport io_cost(std::uint64_t q, std::uint64_t f, std::uint64_t h);

struct TileCoord {
  std::size_t i = 0;  // source interval
  std::size_t j = 0;  // destination interval
  friend bool operator==(const TileCoord&, const TileCoord&) = default;
};

struct TileOrder {
  TileMajor major = TileMajor::Column;
  bool s_shape = true;
  std::vector<TileCoord> tiles;
};

/// Column-major walks j outer, i inner; row-major the reverse. S-shape flips
/// the inner direction on every other outer step so consecutive major steps
/// share the interval at the turn.
TileOrder tile_order(std::size_t q, TileMajor major, bool s_shape);

// Map strategies -----------------------------------------------------------

enum class MapStrategy { VS, VFS, HS };
std::string_view to_string(MapStrategy s);
MapStrategy parse_map_strategy(std::string_view s);

struct MapStrategyReport {
  MapStrategy strategy = MapStrategy::HS;
  double latency_cycles = 0.0;       // N F H / (R C)
  std::uint64_t bandwidth_words = 0; // per cycle: R C + 1 (VS, VFS) or R + C (HS)
  double utilization = 1.0;          // HS: H / (C ceil(H / C)), padding counted idle
};

MapStrategyReport map_strategy_metrics(MapStrategy strategy, std::uint64_t n, std::uint64_t f, std::uint64_t h,
                                       std::uint64_t r, std::uint64_t c);

}  // namespace engn
