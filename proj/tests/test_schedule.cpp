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

#include <algorithm>
#include <random>
#include <set>

#include "engn/schedule.hpp"
#include "oracles.hpp"

using namespace engn;

TEST_CASE("DASR decisions") {
  CHECK(dasr_decide(1433, 16, Aggregator::Sum, ModelKind::GCN) == StageOrder::FAU);
  CHECK(dasr_decide(16, 16, Aggregator::Sum, ModelKind::GCN) == StageOrder::FAU);
  CHECK(dasr_decide(16, 64, Aggregator::Sum, ModelKind::GCN) == StageOrder::AFU);
  CHECK(dasr_decide(8, 512, Aggregator::Max, ModelKind::GSPool) == StageOrder::FAU);
  CHECK(dasr_decide(8, 512, Aggregator::Sum, ModelKind::GRN) == StageOrder::FAU);
  CHECK(reorder_is_legal(ModelKind::GCN, Aggregator::Sum));
  CHECK_FALSE(reorder_is_legal(ModelKind::GCN, Aggregator::Max));
  CHECK_FALSE(reorder_is_legal(ModelKind::GatedGCN, Aggregator::Sum));
}

TEST_CASE("operation counts on Cora dimensions") {
  const auto fau = count_ops(2708, 10556, 1433, 16, StageOrder::FAU);
  const auto afu = count_ops(2708, 10556, 1433, 16, StageOrder::AFU);
  CHECK(fau.accum == 168896);
  CHECK(afu.accum == 15126748);
  CHECK(fau.mac == std::uint64_t{2708} * 1433 * 16);
  CHECK(afu.mac == fau.mac);
  CHECK(count_ops(10, 0, 5, 5, StageOrder::FAU).accum == 0);
}

TEST_CASE("DASR minimizes accumulations whenever the other order is legal") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 2000; ++k) {
    const std::uint64_t e = rng() % 100000, f = 1 + rng() % 2048, h = 1 + rng() % 2048;
    const StageOrder pick = dasr_decide(f, h, Aggregator::Sum, ModelKind::GCN);
    const StageOrder other = pick == StageOrder::FAU ? StageOrder::AFU : StageOrder::FAU;
    REQUIRE(count_ops(100, e, f, h, pick).accum <= count_ops(100, e, f, h, other).accum);
  }
}

TEST_CASE("I/O cost closed forms") {
  const auto one = io_cost(1, 7, 3);
  CHECK(one.read_col == 10);
  CHECK(one.read_row == 10);
  CHECK(one.write_col == 3);
  CHECK(one.write_row == 3);
  CHECK(one.chosen == TileMajor::Column);

  const auto a = io_cost(4, 8, 2);
  CHECK(a.read_col == 112);
  CHECK(a.write_col == 8);
  CHECK(a.total_col() == 120);
  CHECK(a.read_row == 58);
  CHECK(a.write_row == 32);
  CHECK(a.total_row() == 90);
  CHECK(a.chosen == TileMajor::Row);

  const auto b = io_cost(4, 2, 8);
  CHECK(b.total_col() == 90);
  CHECK(b.total_row() == 240);
  CHECK(b.chosen == TileMajor::Column);

  CHECK_THROWS_AS(io_cost(0, 1, 1), std::invalid_argument);
}

TEST_CASE("I/O decision rule matches the exact expansion") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5000; ++k) {
    const std::int64_t q = 2 + static_cast<std::int64_t>(rng() % 30);
    const std::int64_t f = 1 + static_cast<std::int64_t>(rng() % 4096);
    const std::int64_t h = 1 + static_cast<std::int64_t>(rng() % 4096);
    const auto r = io_cost(static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(h));
    const std::int64_t diff = (q - 1) * ((q - 1) * f - (2 * q - 1) * h);
    REQUIRE(static_cast<std::int64_t>(r.total_col()) - static_cast<std::int64_t>(r.total_row()) == diff);
    REQUIRE((r.chosen == TileMajor::Column) == (diff <= 0));
    REQUIRE(r.total(r.chosen) <= std::min(r.total_col(), r.total_row()));
    const auto [rc, wc] = oracle::io_words(static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(f),
                                           static_cast<std::uint64_t>(h), 1, true);
    REQUIRE(r.read_col == rc);
    REQUIRE(r.write_col == wc);
  }
}

TEST_CASE("tile orders") {
  const auto s = tile_order(2, TileMajor::Column, true);
  const std::vector<TileCoord> expect{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(s.tiles == expect);
  for (TileMajor m : {TileMajor::Column, TileMajor::Row})
    for (bool sh : {false, true}) CHECK(tile_order(1, m, sh).tiles == std::vector<TileCoord>{{0, 0}});
  const auto raster = tile_order(3, TileMajor::Row, false);
  REQUIRE(raster.tiles.size() == 9);
  for (std::size_t k = 0; k < 9; ++k) CHECK(raster.tiles[k] == TileCoord{k / 3, k % 3});
}

TEST_CASE("tile orders are permutations; S-shape turns share an interval") {
  for (std::size_t q = 1; q <= 9; ++q)
    for (TileMajor m : {TileMajor::Column, TileMajor::Row})
      for (bool sh : {false, true}) {
        const auto order = tile_order(q, m, sh);
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& t : order.tiles) seen.emplace(t.i, t.j);
        REQUIRE(order.tiles.size() == q * q);
        REQUIRE(seen.size() == q * q);
        if (!sh) continue;
        for (std::size_t k = 1; k < order.tiles.size(); ++k) {
          const auto& a = order.tiles[k - 1];
          const auto& b = order.tiles[k];
          // Consecutive tiles always share the source or the destination interval.
          REQUIRE((a.i == b.i || a.j == b.j));
        }
      }
}

TEST_CASE("map strategies") {
  const auto hs = map_strategy_metrics(MapStrategy::HS, 128, 64, 32, 128, 16);
  CHECK(hs.latency_cycles == 128.0);
  CHECK(hs.bandwidth_words == 144);
  CHECK(hs.utilization == 1.0);
  CHECK(map_strategy_metrics(MapStrategy::VS, 128, 64, 32, 32, 32).bandwidth_words == 1025);
  CHECK(map_strategy_metrics(MapStrategy::VFS, 128, 64, 32, 32, 32).bandwidth_words == 1025);
  CHECK(map_strategy_metrics(MapStrategy::VS, 128, 64, 32, 32, 32).utilization == 1.0);
  CHECK(map_strategy_metrics(MapStrategy::HS, 10, 10, 24, 8, 16).utilization == doctest::Approx(24.0 / 32.0));
  for (std::uint64_t h = 1; h <= 200; ++h) {
    const double u = map_strategy_metrics(MapStrategy::HS, 64, 8, h, 128, 16).utilization;
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    if (h % 16 == 0) CHECK(u == 1.0);
  }
  CHECK(parse_map_strategy("hs") == MapStrategy::HS);
  CHECK(parse_tile_major("row") == TileMajor::Row);
}
