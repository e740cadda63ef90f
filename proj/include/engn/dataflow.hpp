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
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "engn/graph.hpp"

namespace engn {

class DataflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-PE-row edge queues: edge e sits in bank (e.dst mod r).
struct EdgeBankLayout {
  std::size_t r = 0;
  std::vector<std::vector<Edge>> banks;

  std::size_t num_edges() const;
  std::size_t max_bank_length() const;
};

EdgeBankLayout hash_edges(std::span<const Edge> edges, std::size_t r);

/// The source batch whose extracted features circulate on the ring; vertex v
/// occupies slot v - first (the PE row that computed it).
struct SourceBatch {
  VertexId first = 0;
  std::size_t size = 0;

  bool contains(VertexId v) const { return v >= first && v - first < size; }
  /// Throws DataflowError for vertices outside the batch.
  std::size_t slot(VertexId v) const;
};

/// Northward ring: PE row `row` holds the feature of source slot
/// (row + t) mod r at ring cycle t. Each row sees every slot once per r cycles.
struct RingSchedule {
  std::size_t r = 0;

  std::size_t arrival(std::size_t row, std::uint64_t t) const { return (row + t) % r; }
  /// First t >= 0 with arrival(row, t) == slot.
  std::size_t offset(std::size_t row, std::size_t slot) const { return (slot + r - row % r) % r; }
};

/// Orders a bank so features are consumed as they flow past: edges are taken
/// round by round (k-th occurrence of each arrival offset forms round k), and
/// by ascending arrival offset within a round. Stable; the multiset is kept.
std::vector<Edge> reorganize_bank(std::span<const Edge> bank, std::size_t row, const RingSchedule& ring,
                                  const SourceBatch& batch);
EdgeBankLayout reorganize(const EdgeBankLayout& layout, const SourceBatch& batch);

struct Consumption {
  std::uint64_t cycle = 0;  // ring cycle, relative to the start of aggregation
  std::size_t bank = 0;
  std::size_t position = 0;  // index within the bank
  Edge edge;
};

/// Greedy in-order ring simulation. A bank consumes its head edge at the first
/// cycle its source arrives, strictly in list order. The ring advances in whole
/// rotations, so `cycles` is r * ceil((last consumption + 1) / r), 0 when empty.
struct RingTrace {
  std::uint64_t cycles = 0;
  std::uint64_t rotations = 0;
  std::vector<Consumption> events;  // sorted by (cycle, bank)
};

RingTrace ring_trace(const EdgeBankLayout& layout, const SourceBatch& batch);

/// Ring cycles for one source batch; `reorganized` reorders each bank first.
std::uint64_t aggregate_cycles(const EdgeBankLayout& layout, const SourceBatch& batch, bool reorganized);

/// Feature-extraction cycles on a C-column array: each batch streams f input
/// dimensions once per weight slice of c output columns (fully pipelined).
std::uint64_t feature_cycles(std::uint64_t f, std::uint64_t h, std::uint64_t c, std::uint64_t batches);

/// Column slices of a weight matrix, each at most c columns wide.
struct WeightPartition {
  std::size_t h = 0;
  std::size_t c = 0;
  std::vector<Eigen::MatrixXd> parts;

  Eigen::MatrixXd assemble() const;
};

WeightPartition partition_weights(const Eigen::MatrixXd& w, std::size_t c);

}  // namespace engn
