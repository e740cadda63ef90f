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

#include "engn/dataflow.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>

namespace engn {

std::size_t EdgeBankLayout::num_edges() const {
  std::size_t n = 0;
  for (const auto& b : banks) n += b.size();
  return n;
}

std::size_t EdgeBankLayout::max_bank_length() const {
  std::size_t n = 0;
  for (const auto& b : banks) n = std::max(n, b.size());
  return n;
}

EdgeBankLayout hash_edges(std::span<const Edge> edges, std::size_t r) {
  if (r == 0) throw DataflowError("hash_edges: row count must be positive");
  EdgeBankLayout layout;
  layout.r = r;
  layout.banks.resize(r);
  for (const Edge& e : edges) layout.banks[e.dst % r].push_back(e);
  return layout;
}

std::size_t SourceBatch::slot(VertexId v) const {
  if (!contains(v)) {
    throw DataflowError("source vertex " + std::to_string(v) + " is not in the batch starting at " + std::to_string(first));
  }
  return v - first;
}

std::vector<Edge> reorganize_bank(std::span<const Edge> bank, std::size_t row, const RingSchedule& ring,
                                  const SourceBatch& batch) {
  struct Keyed {
    std::size_t round;
    std::size_t offset;
    std::size_t index;
  };
  std::vector<std::size_t> seen(ring.r, 0);
  std::vector<Keyed> keyed;
  keyed.reserve(bank.size());
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const std::size_t off = ring.offset(row, batch.slot(bank[k].src) % ring.r);
    keyed.push_back(Keyed{seen[off]++, off, k});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const Keyed& a, const Keyed& b) { return std::tie(a.round, a.offset) < std::tie(b.round, b.offset); });
  std::vector<Edge> out;
  out.reserve(bank.size());
  for (const Keyed& k : keyed) out.push_back(bank[k.index]);
  return out;
}

EdgeBankLayout reorganize(const EdgeBankLayout& layout, const SourceBatch& batch) {
  const RingSchedule ring{layout.r};
  EdgeBankLayout out;
  out.r = layout.r;
  out.banks.reserve(layout.r);
  for (std::size_t row = 0; row < layout.r; ++row) out.banks.push_back(reorganize_bank(layout.banks[row], row, ring, batch));
  return out;
}

RingTrace ring_trace(const EdgeBankLayout& layout, const SourceBatch& batch) {
  const RingSchedule ring{layout.r};
  RingTrace trace;
  std::uint64_t last = 0;
  bool any = false;
  for (std::size_t row = 0; row < layout.r; ++row) {
    std::uint64_t next_free = 0;  // earliest cycle the bank may consume again
    const auto& bank = layout.banks[row];
    for (std::size_t k = 0; k < bank.size(); ++k) {
      const std::uint64_t off = ring.offset(row, batch.slot(bank[k].src) % layout.r);
      // smallest t >= next_free with t == off (mod r)
      const std::uint64_t base = next_free - next_free % layout.r;
      std::uint64_t t = base + off;
      if (t < next_free) t += layout.r;
      trace.events.push_back(Consumption{t, row, k, bank[k]});
      next_free = t + 1;
      last = std::max(last, t);
      any = true;
    }
  }
  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const Consumption& a, const Consumption& b) { return std::tie(a.cycle, a.bank) < std::tie(b.cycle, b.bank); });
  if (any) {
    trace.rotations = last / layout.r + 1;
    trace.cycles = trace.rotations * layout.r;
  }
  return trace;
}

std::uint64_t aggregate_cycles(const EdgeBankLayout& layout, const SourceBatch& batch, bool reorganized) {
  return reorganized ? ring_trace(reorganize(layout, batch), batch).cycles : ring_trace(layout, batch).cycles;
}

std::uint64_t feature_cycles(std::uint64_t f, std::uint64_t h, std::uint64_t c, std::uint64_t batches) {
  if (c == 0) throw DataflowError("feature_cycles: column count must be positive");
  return batches * f * ((h + c - 1) / c);
}

Eigen::MatrixXd WeightPartition::assemble() const {
  Eigen::Index rows = parts.empty() ? 0 : parts.front().rows();
  Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(h));
  Eigen::Index col = 0;
  for (const auto& p : parts) {
    out.middleCols(col, p.cols()) = p;
    col += p.cols();
  }
  return out;
}

WeightPartition partition_weights(const Eigen::MatrixXd& w, std::size_t c) {
  if (c == 0) throw DataflowError("partition_weights: column count must be positive");
  WeightPartition p;
  p.h = static_cast<std::size_t>(w.cols());
  p.c = c;
  for (Eigen::Index col = 0; col < w.cols(); col += static_cast<Eigen::Index>(c)) {
    const Eigen::Index width = std::min<Eigen::Index>(static_cast<Eigen::Index>(c), w.cols() - col);
    p.parts.emplace_back(w.middleCols(col, width));
  }
  return p;
}

}  // namespace engn
