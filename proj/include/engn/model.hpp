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

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "engn/fixed32.hpp"
#include "engn/graph.hpp"

namespace engn {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { GCN, GSPool, RGCN, GatedGCN, GRN };
enum class Aggregator { Sum, Max, Mean };
/// FAU: feature extraction -> aggregate -> update; AFU: aggregate first.
enum class StageOrder { FAU, AFU };

std::string_view to_string(ModelKind k);
std::string_view to_string(Aggregator a);
std::string_view to_string(StageOrder o);
ModelKind parse_model_kind(std::string_view s);
Aggregator parse_aggregator(std::string_view s);
StageOrder parse_stage_order(std::string_view s);

/// Vertex properties are row vectors: one row per vertex, X * W convention.
template <typename Scalar>
using PropertyMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// Scalar policy

template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
};

template <>
struct ScalarTraits<Fixed32> {
  static Fixed32 from_double(double x) { return Fixed32::from_double(x); }
  static double to_double(Fixed32 x) { return x.to_double(); }
};

/// Dot-product accumulator. Fixed point accumulates exact raw products and
/// rounds once per output element.
template <typename Scalar>
struct Accumulator;

template <>
struct Accumulator<double> {
  double sum = 0.0;
  void mac(double a, double b) { sum += a * b; }
  void add(double a) { sum += a; }
  double result() const { return sum; }
};

template <>
struct Accumulator<Fixed32> {
  __int128 sum = 0;  // Q32.32 raw
  void mac(Fixed32 a, Fixed32 b) { sum += static_cast<__int128>(a.raw()) * b.raw(); }
  void add(Fixed32 a) { sum += static_cast<__int128>(a.raw()) << Fixed32::kFracBits; }
  Fixed32 result() const {
    return Fixed32::from_raw(Fixed32::saturate_wide(Fixed32::round_shift(sum, Fixed32::kFracBits)));
  }
};

template <typename Scalar>
Scalar relu(Scalar x) {
  return x > Scalar(0) ? x : Scalar(0);
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  const double v = ScalarTraits<Scalar>::to_double(x);
  return ScalarTraits<Scalar>::from_double(1.0 / (1.0 + std::exp(-v)));
}

template <typename Scalar>
Scalar tanh_act(Scalar x) {
  return ScalarTraits<Scalar>::from_double(std::tanh(ScalarTraits<Scalar>::to_double(x)));
}

template <typename Scalar>
PropertyMatrix<Scalar> quantize(const Eigen::MatrixXd& m) {
  PropertyMatrix<Scalar> out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = ScalarTraits<Scalar>::from_double(m(r, c));
  return out;
}

template <typename Scalar>
Eigen::MatrixXd dequantize(const PropertyMatrix<Scalar>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = ScalarTraits<Scalar>::to_double(m(r, c));
  return out;
}

/// a * b with the scalar's accumulator; inner dimension reduced in index order.
template <typename Scalar>
PropertyMatrix<Scalar> matmul(const PropertyMatrix<Scalar>& a, const PropertyMatrix<Scalar>& b) {
  if (a.cols() != b.rows()) throw ModelError("matmul: inner dimensions differ");
  PropertyMatrix<Scalar> out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Accumulator<Scalar> acc;
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc.mac(a(i, k), b(k, j));
      out(i, j) = acc.result();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Layer description

/// Standard GRU gates (row-vector convention, x * W):
///   z = sigmoid(x W_z + h U_z + b_z),  r = sigmoid(x W_r + h U_r + b_r)
///   c = tanh(x W_h + (r . h) U_h + b_h),  out = (1 - z) . h + z . c
struct GruWeights {
  Eigen::MatrixXd w_z, u_z, w_r, u_r, w_h, u_h;  // H x H
  Eigen::RowVectorXd b_z, b_r, b_h;             // H
};

struct WeightSet {
  Eigen::MatrixXd feature;                // GCN: F x H
  std::vector<Eigen::MatrixXd> relation;  // R-GCN W_r: F x H each
  Eigen::MatrixXd self;                   // R-GCN W_0: F x H
  Eigen::MatrixXd pool;                   // GS-Pool W_pool: F x P
  Eigen::RowVectorXd pool_bias;           // GS-Pool b: P
  Eigen::MatrixXd update;                 // GS-Pool (P+F) x H; Gated-GCN, GRN: F x H
  Eigen::MatrixXd gate_dst;               // Gated-GCN W_H: F x F
  Eigen::MatrixXd gate_src;               // Gated-GCN W_C: F x F
  GruWeights gru;                         // GRN
  Eigen::RowVectorXd bias;                // update-stage bias, H (empty = none)
};

struct LayerSpec {
  ModelKind kind = ModelKind::GCN;
  std::size_t f = 0;
  std::size_t h = 0;
  Aggregator aggregator = Aggregator::Sum;
  std::size_t num_relations = 1;  // R-GCN
  std::size_t pool_dim = 0;       // GS-Pool hidden width P
  WeightSet weights;

  /// Throws ModelError on any inconsistent dimension or aggregator.
  void validate() const;
  /// Width of one aggregated message (per relation for R-GCN).
  std::size_t message_width(StageOrder order) const;
  /// Width of the aggregated row (R * F for R-GCN).
  std::size_t aggregate_width(StageOrder order) const;
};

struct LayerOptions {
  std::size_t num_relations = 1;
  std::size_t pool_dim = 0;  // 0 -> H
  std::optional<Aggregator> aggregator = std::nullopt;
  double weight_scale = 0.0;  // 0 -> 1/sqrt(fan_in)
  bool with_bias = true;
};

/// Default aggregator per model (GS-Pool: max; all others: sum).
Aggregator default_aggregator(ModelKind kind);

/// Seeded uniform random weights of the right shapes.
LayerSpec make_layer(ModelKind kind, std::size_t f, std::size_t h, std::uint64_t seed, const LayerOptions& options = {});

/// Deterministic uniform [lo, hi) matrix from a seed.
Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

// ---------------------------------------------------------------------------
// Three-stage functional engine

/// GCN edge list with implicit self-loops and coefficients
/// 1 / sqrt((out_degree(src) + 1) * (in_degree(dst) + 1)), canonical order.
struct NormalizedEdges {
  std::vector<Edge> edges;
  std::vector<double> coef;
};
NormalizedEdges gcn_edge_norm(const Graph& g);

/// Output of the feature-extraction stage, ready for aggregation.
template <typename Scalar>
struct Messages {
  std::vector<Edge> edges;          // aggregation order (canonical)
  PropertyMatrix<Scalar> rows;      // payloads: per vertex, or per edge if per_edge
  bool per_edge = false;
  std::vector<Scalar> coef;         // per-edge scale; empty means 1
  std::vector<std::uint32_t> segment;  // per-edge output block (R-GCN relation); empty means 0
  std::size_t segments = 1;

  std::size_t width() const { return static_cast<std::size_t>(rows.cols()); }
  auto payload(std::size_t e) const { return rows.row(per_edge ? e : edges[e].src); }
};

/// The edge list the aggregate stage walks for this layer (GCN adds self-loops).
std::vector<Edge> aggregation_edges(const LayerSpec& layer, const Graph& g);

/// Stage order legality: AFU only for GCN with a sum aggregator.
bool order_is_valid(const LayerSpec& layer, StageOrder order);

template <typename Scalar>
Messages<Scalar> feature_extraction(const LayerSpec& layer, const PropertyMatrix<Scalar>& props, const Graph& g,
                                    StageOrder order = StageOrder::FAU);

template <typename Scalar>
PropertyMatrix<Scalar> aggregate(const LayerSpec& layer, const Messages<Scalar>& messages, std::size_t num_vertices);

template <typename Scalar>
PropertyMatrix<Scalar> update(const LayerSpec& layer, const PropertyMatrix<Scalar>& aggregated,
                              const PropertyMatrix<Scalar>& props, StageOrder order = StageOrder::FAU);

/// Batched GRU over rows of h (state) and x (input).
template <typename Scalar>
PropertyMatrix<Scalar> gru(const PropertyMatrix<Scalar>& h, const PropertyMatrix<Scalar>& x, const GruWeights& w);

template <typename Scalar>
RowVector<Scalar> gru_cell(const RowVector<Scalar>& h, const RowVector<Scalar>& x, const GruWeights& w);

template <typename Scalar>
PropertyMatrix<Scalar> forward_layer(const LayerSpec& layer, const PropertyMatrix<Scalar>& props, const Graph& g,
                                     StageOrder order = StageOrder::FAU);

extern template Messages<double> feature_extraction(const LayerSpec&, const PropertyMatrix<double>&, const Graph&, StageOrder);
extern template Messages<Fixed32> feature_extraction(const LayerSpec&, const PropertyMatrix<Fixed32>&, const Graph&, StageOrder);
extern template PropertyMatrix<double> aggregate(const LayerSpec&, const Messages<double>&, std::size_t);
extern template PropertyMatrix<Fixed32> aggregate(const LayerSpec&, const Messages<Fixed32>&, std::size_t);
extern template PropertyMatrix<double> update(const LayerSpec&, const PropertyMatrix<double>&, const PropertyMatrix<double>&, StageOrder);
extern template PropertyMatrix<Fixed32> update(const LayerSpec&, const PropertyMatrix<Fixed32>&, const PropertyMatrix<Fixed32>&, StageOrder);
extern template PropertyMatrix<double> gru(const PropertyMatrix<double>&, const PropertyMatrix<double>&, const GruWeights&);
extern template PropertyMatrix<Fixed32> gru(const PropertyMatrix<Fixed32>&, const PropertyMatrix<Fixed32>&, const GruWeights&);
extern template RowVector<double> gru_cell(const RowVector<double>&, const RowVector<double>&, const GruWeights&);
extern template RowVector<Fixed32> gru_cell(const RowVector<Fixed32>&, const RowVector<Fixed32>&, const GruWeights&);
extern template PropertyMatrix<double> forward_layer(const LayerSpec&, const PropertyMatrix<double>&, const Graph&, StageOrder);
extern template PropertyMatrix<Fixed32> forward_layer(const LayerSpec&, const PropertyMatrix<Fixed32>&, const Graph&, StageOrder);

}  // namespace engn
