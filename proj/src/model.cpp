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

#include "engn/model.hpp"

#include <algorithm>
#include <cctype>
#include <random>

namespace engn {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::GCN: return "gcn";
    case ModelKind::GSPool: return "gs-pool";
    case ModelKind::RGCN: return "r-gcn";
    case ModelKind::GatedGCN: return "gated-gcn";
    case ModelKind::GRN: return "grn";
  }
  return "?";
}

std::string_view to_string(Aggregator a) {
  switch (a) {
    case Aggregator::Sum: return "sum";
    case Aggregator::Max: return "max";
    case Aggregator::Mean: return "mean";
  }
  return "?";
}

std::string_view to_string(StageOrder o) { return o == StageOrder::FAU ? "FAU" : "AFU"; }

namespace {

std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

ModelKind parse_model_kind(std::string_view s) {
  const std::string n = normalize(s);
  if (n == "gcn") return ModelKind::GCN;
  if (n == "gspool" || n == "graphsagepool") return ModelKind::GSPool;
  if (n == "rgcn") return ModelKind::RGCN;
  if (n == "gatedgcn") return ModelKind::GatedGCN;
  if (n == "grn") return ModelKind::GRN;
  throw ModelError("unknown model kind '" + std::string(s) + "'");
}

Aggregator parse_aggregator(std::string_view s) {
  const std::string n = normalize(s);
  if (n == "sum") return Aggregator::Sum;
  if (n == "max") return Aggregator::Max;
  if (n == "mean") return Aggregator::Mean;
  throw ModelError("unknown aggregator '" + std::string(s) + "'");
}

StageOrder parse_stage_order(std::string_view s) {
  const std::string n = normalize(s);
  if (n == "fau") return StageOrder::FAU;
  if (n == "afu") return StageOrder::AFU;
  throw ModelError("unknown stage order '" + std::string(s) + "'");
}

Aggregator default_aggregator(ModelKind kind) {
  return kind == ModelKind::GSPool ? Aggregator::Max : Aggregator::Sum;
}

// ---------------------------------------------------------------------------

namespace {

void expect_shape(const Eigen::MatrixXd& m, std::size_t rows, std::size_t cols, const char* name) {
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
    throw ModelError(std::string(name) + " must be " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void expect_len(const Eigen::RowVectorXd& v, std::size_t n, const char* name, bool optional) {
  if (optional && v.size() == 0) return;
  if (static_cast<std::size_t>(v.size()) != n) {
    throw ModelError(std::string(name) + " must have length " + std::to_string(n));
  }
}

}  // namespace

void LayerSpec::validate() const {
  if (f == 0 || h == 0) throw ModelError("layer dimensions must be positive");
  const WeightSet& w = weights;
  expect_len(w.bias, h, "bias", true);
  switch (kind) {
    case ModelKind::GCN:
      if (aggregator != Aggregator::Sum) throw ModelError("GCN aggregates with sum");
      expect_shape(w.feature, f, h, "GCN feature weight");
      break;
    case ModelKind::GSPool:
      if (aggregator == Aggregator::Sum) throw ModelError("GS-Pool aggregates with max (or mean)");
      if (pool_dim == 0) throw ModelError("GS-Pool pool dimension must be positive");
      expect_shape(w.pool, f, pool_dim, "GS-Pool pool weight");
      expect_len(w.pool_bias, pool_dim, "GS-Pool pool bias", true);
      expect_shape(w.update, pool_dim + f, h, "GS-Pool update weight");
      break;
    case ModelKind::RGCN:
      if (aggregator != Aggregator::Sum) throw ModelError("R-GCN aggregates with sum");
      if (num_relations == 0 || w.relation.size() != num_relations) throw ModelError("R-GCN needs one weight per relation");
      for (const auto& wr : w.relation) expect_shape(wr, f, h, "R-GCN relation weight");
      expect_shape(w.self, f, h, "R-GCN self weight");
      break;
    case ModelKind::GatedGCN:
      if (aggregator != Aggregator::Sum) throw ModelError("Gated-GCN aggregates with sum");
      expect_shape(w.gate_dst, f, f, "Gated-GCN W_H");
      expect_shape(w.gate_src, f, f, "Gated-GCN W_C");
      expect_shape(w.update, f, h, "Gated-GCN update weight");
      break;
    case ModelKind::GRN: {
      if (aggregator != Aggregator::Sum) throw ModelError("GRN aggregates with sum");
      if (f != h) throw ModelError("GRN needs equal input and output dimensions (GRU state is the vertex property)");
      expect_shape(w.update, f, h, "GRN input weight");
      const GruWeights& g = w.gru;
      for (const auto* m : {&g.w_z, &g.u_z, &g.w_r, &g.u_r, &g.w_h, &g.u_h}) expect_shape(*m, h, h, "GRU weight");
      for (const auto* b : {&g.b_z, &g.b_r, &g.b_h}) expect_len(*b, h, "GRU bias", false);
      break;
    }
  }
}

std::size_t LayerSpec::message_width(StageOrder order) const {
  switch (kind) {
    case ModelKind::GCN: return order == StageOrder::FAU ? h : f;
    case ModelKind::GSPool: return pool_dim;
    case ModelKind::RGCN:
    case ModelKind::GatedGCN:
    case ModelKind::GRN: return f;
  }
  return f;
}

std::size_t LayerSpec::aggregate_width(StageOrder order) const {
  return kind == ModelKind::RGCN ? num_relations * f : message_width(order);
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  return m;
}

LayerSpec make_layer(ModelKind kind, std::size_t f, std::size_t h, std::uint64_t seed, const LayerOptions& options) {
  LayerSpec layer;
  layer.kind = kind;
  layer.f = f;
  layer.h = h;
  layer.aggregator = options.aggregator.value_or(default_aggregator(kind));
  layer.num_relations = kind == ModelKind::RGCN ? std::max<std::size_t>(options.num_relations, 1) : 1;
  layer.pool_dim = kind == ModelKind::GSPool ? (options.pool_dim ? options.pool_dim : h) : 0;

  std::uint64_t stream = seed * 0x9E3779B97F4A7C15ULL + 1;
  auto next_seed = [&stream] { return stream += 0xBF58476D1CE4E5B9ULL; };
  auto init = [&](std::size_t rows, std::size_t cols) {
    const double s = options.weight_scale > 0.0 ? options.weight_scale : 1.0 / std::sqrt(static_cast<double>(rows));
    return random_matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols), next_seed(), -s, s);
  };
  auto init_row = [&](std::size_t n) -> Eigen::RowVectorXd {
    return random_matrix(1, static_cast<Eigen::Index>(n), next_seed(), -0.1, 0.1);
  };

  WeightSet& w = layer.weights;
  switch (kind) {
    case ModelKind::GCN: w.feature = init(f, h); break;
    case ModelKind::GSPool:
      w.pool = init(f, layer.pool_dim);
      w.pool_bias = init_row(layer.pool_dim);
      w.update = init(layer.pool_dim + f, h);
      break;
    case ModelKind::RGCN:
      for (std::size_t r = 0; r < layer.num_relations; ++r) w.relation.push_back(init(f, h));
      w.self = init(f, h);
      break;
    case ModelKind::GatedGCN:
      w.gate_dst = init(f, f);
      w.gate_src = init(f, f);
      w.update = init(f, h);
      break;
    case ModelKind::GRN: {
      w.update = init(f, h);
      GruWeights& g = w.gru;
      g.w_z = init(h, h);
      g.u_z = init(h, h);
      g.w_r = init(h, h);
      g.u_r = init(h, h);
      g.w_h = init(h, h);
      g.u_h = init(h, h);
      g.b_z = init_row(h);
      g.b_r = init_row(h);
      g.b_h = init_row(h);
      break;
    }
  }
  if (options.with_bias && kind != ModelKind::GRN) w.bias = init_row(h);
  layer.validate();
  return layer;
}

// ---------------------------------------------------------------------------

NormalizedEdges gcn_edge_norm(const Graph& g) {
  NormalizedEdges out;
  out.edges.reserve(g.num_edges() + g.num_vertices());
  out.edges.assign(g.edges().begin(), g.edges().end());
  for (VertexId v = 0; v < g.num_vertices(); ++v) out.edges.push_back(Edge{v, v, std::nullopt, std::nullopt});
  sort_canonical(out.edges);
  out.coef.reserve(out.edges.size());
  for (const Edge& e : out.edges) {
    const double d_src = static_cast<double>(g.out_degree()[e.src]) + 1.0;
    const double d_dst = static_cast<double>(g.in_degree()[e.dst]) + 1.0;
    out.coef.push_back(1.0 / std::sqrt(d_src * d_dst));
  }
  return out;
}

std::vector<Edge> aggregation_edges(const LayerSpec& layer, const Graph& g) {
  if (layer.kind == ModelKind::GCN) return gcn_edge_norm(g).edges;
  return {g.edges().begin(), g.edges().end()};
}

bool order_is_valid(const LayerSpec& layer, StageOrder order) {
  if (order == StageOrder::FAU) return true;
  return layer.kind == ModelKind::GCN && layer.aggregator == Aggregator::Sum;
}

namespace {

template <typename Scalar>
void expect_props(const LayerSpec& layer, const PropertyMatrix<Scalar>& props, const Graph& g) {
  if (static_cast<std::size_t>(props.rows()) != g.num_vertices() || static_cast<std::size_t>(props.cols()) != layer.f) {
    throw ModelError("property matrix must be " + std::to_string(g.num_vertices()) + "x" + std::to_string(layer.f) +
                     ", got " + std::to_string(props.rows()) + "x" + std::to_string(props.cols()));
  }
}

template <typename Scalar>
void add_bias_relu(PropertyMatrix<Scalar>& m, const Eigen::RowVectorXd& bias) {
  const bool has_bias = bias.size() > 0;
  RowVector<Scalar> b;
  if (has_bias) b = quantize<Scalar>(bias);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = relu<Scalar>(has_bias ? m(r, c) + b(c) : m(r, c));
}

std::size_t relation_of(const Edge& e) { return e.relation.value_or(0); }

}  // namespace

template <typename Scalar>
Messages<Scalar> feature_extraction(const LayerSpec& layer, const PropertyMatrix<Scalar>& props, const Graph& g,
                                    StageOrder order) {
  layer.validate();
  expect_props(layer, props, g);
  if (!order_is_valid(layer, order)) throw ModelError(std::string("stage order AFU is not valid for ") + std::string(to_string(layer.kind)));
  const WeightSet& w = layer.weights;
  Messages<Scalar> m;

  switch (layer.kind) {
    case ModelKind::GCN: {
      NormalizedEdges norm = gcn_edge_norm(g);
      m.edges = std::move(norm.edges);
      m.coef.reserve(norm.coef.size());
      for (double c : norm.coef) m.coef.push_back(ScalarTraits<Scalar>::from_double(c));
      // AFU aggregates raw properties and applies W afterwards.
      m.rows = order == StageOrder::FAU ? matmul(props, quantize<Scalar>(w.feature)) : props;
      break;
    }
    case ModelKind::GSPool: {
      m.edges.assign(g.edges().begin(), g.edges().end());
      m.rows = matmul(props, quantize<Scalar>(w.pool));
      add_bias_relu(m.rows, w.pool_bias);
      break;
    }
    case ModelKind::RGCN: {
      m.edges.assign(g.edges().begin(), g.edges().end());
      m.segments = layer.num_relations;
      // c_{i,r}: number of incoming edges of i under relation r.
      std::vector<std::uint32_t> count(g.num_vertices() * layer.num_relations, 0);
      for (const Edge& e : m.edges) {
        const std::size_t r = relation_of(e);
        if (r >= layer.num_relations) {
          throw ModelError("edge relation " + std::to_string(r) + " exceeds the layer's " +
                           std::to_string(layer.num_relations) + " relations");
        }
        ++count[e.dst * layer.num_relations + r];
      }
      m.coef.reserve(m.edges.size());
      m.segment.reserve(m.edges.size());
      for (const Edge& e : m.edges) {
        const std::size_t r = relation_of(e);
        m.coef.push_back(ScalarTraits<Scalar>::from_double(1.0 / count[e.dst * layer.num_relations + r]));
        m.segment.push_back(static_cast<std::uint32_t>(r));
      }
      m.rows = props;
      break;
    }
    case ModelKind::GatedGCN: {
      m.edges.assign(g.edges().begin(), g.edges().end());
      m.per_edge = true;
      const PropertyMatrix<Scalar> proj_dst = matmul(props, quantize<Scalar>(w.gate_dst));
      const PropertyMatrix<Scalar> proj_src = matmul(props, quantize<Scalar>(w.gate_src));
      m.rows.resize(static_cast<Eigen::Index>(m.edges.size()), static_cast<Eigen::Index>(layer.f));
      for (std::size_t k = 0; k < m.edges.size(); ++k) {
        const Edge& e = m.edges[k];
        for (std::size_t c = 0; c < layer.f; ++c) {
          const Scalar gate = sigmoid<Scalar>(proj_dst(e.dst, c) + proj_src(e.src, c));
          m.rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = gate * props(e.src, c);
        }
      }
      break;
    }
    case ModelKind::GRN:
      m.edges.assign(g.edges().begin(), g.edges().end());
      m.rows = props;
      break;
  }
  return m;
}

template <typename Scalar>
PropertyMatrix<Scalar> aggregate(const LayerSpec& layer, const Messages<Scalar>& messages, std::size_t num_vertices) {
  const std::size_t width = messages.width();
  const auto n = static_cast<Eigen::Index>(num_vertices);
  const auto cols = static_cast<Eigen::Index>(width * messages.segments);
  PropertyMatrix<Scalar> out = PropertyMatrix<Scalar>::Zero(n, cols);

  if (layer.aggregator == Aggregator::Max) {
    if (messages.per_edge || messages.segments != 1 || messages.rows.rows() != n) {
      throw ModelError("max aggregation needs per-vertex messages");
    }
    // Every destination starts from its own extracted feature.
    out = messages.rows;
    for (std::size_t k = 0; k < messages.edges.size(); ++k) {
      const Edge& e = messages.edges[k];
      auto row = messages.payload(k);
      for (Eigen::Index c = 0; c < cols; ++c) out(e.dst, c) = std::max(out(e.dst, c), row(c));
    }
    return out;
  }

  std::vector<std::int64_t> count(num_vertices, 0);
  for (std::size_t k = 0; k < messages.edges.size(); ++k) {
    const Edge& e = messages.edges[k];
    auto row = messages.payload(k);
    const Eigen::Index base = messages.segment.empty() ? 0 : static_cast<Eigen::Index>(messages.segment[k] * width);
    if (messages.coef.empty()) {
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(width); ++c) out(e.dst, base + c) += row(c);
    } else {
      const Scalar s = messages.coef[k];
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(width); ++c) out(e.dst, base + c) += s * row(c);
    }
    ++count[e.dst];
  }
  if (layer.aggregator == Aggregator::Mean) {
    for (Eigen::Index v = 0; v < n; ++v) {
      if (count[v] == 0) continue;  // stays 0
      for (Eigen::Index c = 0; c < cols; ++c) {
        if constexpr (std::is_same_v<Scalar, Fixed32>) {
          out(v, c) = out(v, c) / count[v];
        } else {
          out(v, c) = out(v, c) / static_cast<double>(count[v]);
        }
      }
    }
  }
  return out;
}

template <typename Scalar>
PropertyMatrix<Scalar> gru(const PropertyMatrix<Scalar>& h, const PropertyMatrix<Scalar>& x, const GruWeights& w) {
  if (h.rows() != x.rows() || h.cols() != x.cols() || h.cols() != w.w_z.rows()) throw ModelError("gru: dimension mismatch");
  const Eigen::Index n = h.rows();
  const Eigen::Index d = h.cols();
  auto gate = [&](const Eigen::MatrixXd& wx, const Eigen::MatrixXd& uh, const PropertyMatrix<Scalar>& state,
                  const Eigen::RowVectorXd& bias) {
    PropertyMatrix<Scalar> a = matmul(x, quantize<Scalar>(wx));
    const PropertyMatrix<Scalar> b = matmul(state, quantize<Scalar>(uh));
    const RowVector<Scalar> bq = quantize<Scalar>(bias);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < d; ++c) a(r, c) = a(r, c) + b(r, c) + bq(c);
    return a;
  };
  PropertyMatrix<Scalar> z = gate(w.w_z, w.u_z, h, w.b_z);
  PropertyMatrix<Scalar> r = gate(w.w_r, w.u_r, h, w.b_r);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < d; ++c) {
      z(i, c) = sigmoid<Scalar>(z(i, c));
      r(i, c) = sigmoid<Scalar>(r(i, c));
    }
  PropertyMatrix<Scalar> rh(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < d; ++c) rh(i, c) = r(i, c) * h(i, c);
  PropertyMatrix<Scalar> cand = gate(w.w_h, w.u_h, rh, w.b_h);
  PropertyMatrix<Scalar> out(n, d);
  const Scalar one = ScalarTraits<Scalar>::from_double(1.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < d; ++c) {
      const Scalar ch = tanh_act<Scalar>(cand(i, c));
      out(i, c) = (one - z(i, c)) * h(i, c) + z(i, c) * ch;
    }
  return out;
}

template <typename Scalar>
RowVector<Scalar> gru_cell(const RowVector<Scalar>& h, const RowVector<Scalar>& x, const GruWeights& w) {
  const PropertyMatrix<Scalar> hm = h;
  const PropertyMatrix<Scalar> xm = x;
  return gru<Scalar>(hm, xm, w).row(0);
}

template <typename Scalar>
PropertyMatrix<Scalar> update(const LayerSpec& layer, const PropertyMatrix<Scalar>& aggregated,
                              const PropertyMatrix<Scalar>& props, StageOrder order) {
  layer.validate();
  if (aggregated.rows() != props.rows()) throw ModelError("update: aggregated and property rows differ");
  if (static_cast<std::size_t>(aggregated.cols()) != layer.aggregate_width(order)) {
    throw ModelError("update: aggregated width " + std::to_string(aggregated.cols()) + " does not match layer (" +
                     std::to_string(layer.aggregate_width(order)) + ")");
  }
  if (static_cast<std::size_t>(props.cols()) != layer.f) throw ModelError("update: property width does not match layer F");
  const WeightSet& w = layer.weights;
  const Eigen::Index n = props.rows();

  switch (layer.kind) {
    case ModelKind::GCN: {
      PropertyMatrix<Scalar> out = order == StageOrder::FAU ? aggregated : matmul(aggregated, quantize<Scalar>(w.feature));
      add_bias_relu(out, w.bias);
      return out;
    }
    case ModelKind::GSPool: {
      PropertyMatrix<Scalar> cat(n, aggregated.cols() + props.cols());
      cat << aggregated, props;
      PropertyMatrix<Scalar> out = matmul(cat, quantize<Scalar>(w.update));
      add_bias_relu(out, w.bias);
      return out;
    }
    case ModelKind::RGCN: {
      // One wide accumulation: [agg_0 .. agg_{R-1}, h_v] * [W_0; ..; W_{R-1}; W_self].
      PropertyMatrix<Scalar> cat(n, aggregated.cols() + props.cols());
      cat << aggregated, props;
      Eigen::MatrixXd stacked(static_cast<Eigen::Index>((layer.num_relations + 1) * layer.f), static_cast<Eigen::Index>(layer.h));
      for (std::size_t r = 0; r < layer.num_relations; ++r)
        stacked.block(static_cast<Eigen::Index>(r * layer.f), 0, static_cast<Eigen::Index>(layer.f), static_cast<Eigen::Index>(layer.h)) = w.relation[r];
      stacked.bottomRows(static_cast<Eigen::Index>(layer.f)) = w.self;
      PropertyMatrix<Scalar> out = matmul(cat, quantize<Scalar>(stacked));
      add_bias_relu(out, w.bias);
      return out;
    }
    case ModelKind::GatedGCN: {
      PropertyMatrix<Scalar> out = matmul(aggregated, quantize<Scalar>(w.update));
      add_bias_relu(out, w.bias);
      return out;
    }
    case ModelKind::GRN: {
      const PropertyMatrix<Scalar> x = matmul(aggregated, quantize<Scalar>(w.update));
      return gru<Scalar>(props, x, w.gru);
    }
  }
  throw ModelError("unknown model kind");
}

template <typename Scalar>
PropertyMatrix<Scalar> forward_layer(const LayerSpec& layer, const PropertyMatrix<Scalar>& props, const Graph& g,
                                     StageOrder order) {
  const Messages<Scalar> messages = feature_extraction(layer, props, g, order);
  const PropertyMatrix<Scalar> aggregated = aggregate(layer, messages, g.num_vertices());
  return update(layer, aggregated, props, order);
}

template Messages<double> feature_extraction(const LayerSpec&, const PropertyMatrix<double>&, const Graph&, StageOrder);
template Messages<Fixed32> feature_extraction(const LayerSpec&, const PropertyMatrix<Fixed32>&, const Graph&, StageOrder);
template PropertyMatrix<double> aggregate(const LayerSpec&, const Messages<double>&, std::size_t);
template PropertyMatrix<Fixed32> aggregate(const LayerSpec&, const Messages<Fixed32>&, std::size_t);
template PropertyMatrix<double> update(const LayerSpec&, const PropertyMatrix<double>&, const PropertyMatrix<double>&, StageOrder);
template PropertyMatrix<Fixed32> update(const LayerSpec&, const PropertyMatrix<Fixed32>&, const PropertyMatrix<Fixed32>&, StageOrder);
template PropertyMatrix<double> gru(const PropertyMatrix<double>&, const PropertyMatrix<double>&, const GruWeights&);
template PropertyMatrix<Fixed32> gru(const PropertyMatrix<Fixed32>&, const PropertyMatrix<Fixed32>&, const GruWeights&);
template RowVector<double> gru_cell(const RowVector<double>&, const RowVector<double>&, const GruWeights&);
template RowVector<Fixed32> gru_cell(const RowVector<Fixed32>&, const RowVector<Fixed32>&, const GruWeights&);
template PropertyMatrix<double> forward_layer(const LayerSpec&, const PropertyMatrix<double>&, const Graph&, StageOrder);
template PropertyMatrix<Fixed32> forward_layer(const LayerSpec&, const PropertyMatrix<Fixed32>&, const Graph&, StageOrder);

}  // namespace engn
