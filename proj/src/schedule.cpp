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

#include "engn/schedule.hpp"

#include <stdexcept>
#include <string>

namespace engn {

bool reorder_is_legal(ModelKind kind, Aggregator aggregator) {
  return kind == ModelKind::GCN && aggregator == Aggregator::Sum;
}

StageOrder dasr_decide(std::size_t f, std::size_t h, Aggregator aggregator, ModelKind kind) {
  if (!reorder_is_legal(kind, aggregator)) return StageOrder::FAU;
  return f < h ? StageOrder::AFU : StageOrder::FAU;
}

OpCounts count_ops(std::uint64_t n, std::uint64_t e, std::uint64_t f, std::uint64_t h, StageOrder order) {
  return OpCounts{n * f * h, e * (order == StageOrder::FAU ? h : f)};
}

std::string_view to_string(TileMajor m) { return m == TileMajor::Column ? "column" : "row"; }

TileMajor parse_tile_major(std::string_view s) {
  if (s == "column" || s == "col") return TileMajor::Column;
  if (s == "row") return TileMajor::Row;
  throw std::invalid_argument("unknown tile order '" + std::string(s) + "'");
}

IoCostReport io_cost(std::uint64_t q, std::uint64_t f, std::uint64_t h) {
  if (q == 0) throw std::invalid_argument("io_cost: q must be at least 1");
  IoCostReport r;
  r.q = q;
  r.f = f;
  r.h = h;
  const std::uint64_t reused = q * q - q + 1;
  r.read_col = reused * f + q * h;
  r.write_col = q * h;
  r.read_row = q * f + reused * h;
  r.write_row = q * q * h;
  r.chosen = r.total_col() <= r.total_row() ? TileMajor::Column : TileMajor::Row;
  return r;
}

TileOrder tile_order(std::size_t q, TileMajor major, bool s_shape) {
  TileOrder order;
  order.major = major;
  order.s_shape = s_shape;
  order.tiles.reserve(q * q);
  for (std::size_t outer = 0; outer < q; ++outer) {
    const bool reversed = s_shape && (outer % 2 == 1);
    for (std::size_t step = 0; step < q; ++step) {
      const std::size_t inner = reversed ? q - 1 - step : step;
      order.tiles.push_back(major == TileMajor::Column ? TileCoord{inner, outer} : TileCoord{outer, inner});
    }
  }
  return order;
}

std::string_view to_string(MapStrategy s) {
  switch (s) {
    case MapStrategy::VS: return "VS";
    case MapStrategy::VFS: return "VFS";
    case MapStrategy::HS: return "HS";
  }
  return "?";
}

MapStrategy parse_map_strategy(std::string_view s) {
  if (s == "vs" || s == "VS") return MapStrategy::VS;
  if (s == "vfs" || s == "VFS") return MapStrategy::VFS;
  if (s == "hs" || s == "HS") return MapStrategy::HS;
  throw std::invalid_argument("unknown map strategy '" + std::string(s) + "'");
}

MapStrategyReport map_strategy_metrics(MapStrategy strategy, std::uint64_t n, std::uint64_t f, std::uint64_t h,
                                       std::uint64_t r, std::uint64_t c) {
  if (r == 0 || c == 0) throw std::invalid_argument("map_strategy_metrics: array dimensions must be positive");
  MapStrategyReport rep;
  rep.strategy = strategy;
  rep.latency_cycles = static_cast<double>(n) * static_cast<double>(f) * static_cast<double>(h) /
                       (static_cast<double>(r) * static_cast<double>(c));
  if (strategy == MapStrategy::HS) {
    rep.bandwidth_words = r + c;
    const std::uint64_t passes = (h + c - 1) / c;
    rep.utilization = h == 0 ? 1.0 : static_cast<double>(h) / static_cast<double>(c * passes);
  } else {
    rep.bandwidth_words = r * c + 1;
    rep.utilization = 1.0;
  }
  return rep;
}

}  // namespace engn
