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

#include "engn/oracle.hpp"

#include <cmath>

namespace engn {

namespace {

Eigen::MatrixXd relu_m(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }
Eigen::MatrixXd sigmoid_m(const Eigen::MatrixXd& m) { return (1.0 + (-m.array()).exp()).inverse().matrix(); }

Eigen::MatrixXd add_row(Eigen::MatrixXd m, const Eigen::RowVectorXd& b) {
  if (b.size() > 0) m.rowwise() += b;
  return m;
}

}  // namespace

Eigen::MatrixXd dense_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) a(e.dst, e.src) += 1.0;
  return a;
}

Eigen::MatrixXd dense_oracle(const LayerSpec& layer, const Eigen::MatrixXd& x, const Graph& g) {
  if (g.num_vertices() > kDenseOracleLimit) {
    throw ModelError("dense oracle limited to " + std::to_string(kDenseOracleLimit) + " vertices");
  }
  layer.validate();
  if (static_cast<std::size_t>(x.rows()) != g.num_vertices() || static_cast<std::size_t>(x.cols()) != layer.f) {
    throw ModelError("dense oracle: property matrix shape mismatch");
  }
  const WeightSet& w = layer.weights;
  const Eigen::MatrixXd a = dense_adjacency(g);
  const Eigen::Index n = a.rows();

  switch (layer.kind) {
    case ModelKind::GCN: {
      // A~ = A + I; rows are destinations, columns sources.
      const Eigen::MatrixXd at = a + Eigen::MatrixXd::Identity(n, n);
      const Eigen::VectorXd d_row = at.rowwise().sum().cwiseSqrt().cwiseInverse();
      const Eigen::VectorXd d_col = at.colwise().sum().transpose().cwiseSqrt().cwiseInverse();
      const Eigen::MatrixXd a_hat = d_row.asDiagonal() * at * d_col.asDiagonal();
      return relu_m(add_row(a_hat * (x * w.feature), w.bias));
    }
    case ModelKind::GSPool: {
      Eigen::MatrixXd pooled = relu_m(add_row(x * w.pool, w.pool_bias));
      Eigen::MatrixXd agg(n, pooled.cols());
      if (layer.aggregator == Aggregator::Mean) {
        const Eigen::VectorXd deg = a.rowwise().sum();
        agg = a * pooled;
        for (Eigen::Index v = 0; v < n; ++v) agg.row(v) = deg(v) > 0 ? Eigen::RowVectorXd(agg.row(v) / deg(v)) : Eigen::RowVectorXd::Zero(agg.cols());
      } else {
        for (Eigen::Index v = 0; v < n; ++v) {
          Eigen::RowVectorXd best = pooled.row(v);
          for (Eigen::Index u = 0; u < n; ++u)
            if (a(v, u) > 0.0) best = best.cwiseMax(pooled.row(u));
          agg.row(v) = best;
        }
      }
      Eigen::MatrixXd cat(n, agg.cols() + x.cols());
      cat << agg, x;
      return relu_m(add_row(cat * w.update, w.bias));
    }
    case ModelKind::RGCN: {
      Eigen::MatrixXd out = x * w.self;
      for (std::size_t r = 0; r < layer.num_relations; ++r) {
        Eigen::MatrixXd ar = Eigen::MatrixXd::Zero(n, n);
        for (const Edge& e : g.edges())
          if (e.relation.value_or(0) == r) ar(e.dst, e.src) += 1.0;
        const Eigen::VectorXd c = ar.rowwise().sum();
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
        for (Eigen::Index v = 0; v < n; ++v)
          if (c(v) > 0) inv(v) = 1.0 / c(v);
        out += inv.asDiagonal() * ar * x * w.relation[r];
      }
      return relu_m(add_row(out, w.bias));
    }
    case ModelKind::GatedGCN: {
      const Eigen::MatrixXd pd = x * w.gate_dst;
      const Eigen::MatrixXd ps = x * w.gate_src;
      Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(n, x.cols());
      for (Eigen::Index v = 0; v < n; ++v)
        for (Eigen::Index u = 0; u < n; ++u) {
          if (a(v, u) == 0.0) continue;
          const Eigen::MatrixXd eta = sigmoid_m(pd.row(v) + ps.row(u));
          agg.row(v) += a(v, u) * eta.cwiseProduct(x.row(u));
        }
      return relu_m(add_row(agg * w.update, w.bias));
    }
    case ModelKind::GRN: {
      const Eigen::MatrixXd in = (a * x) * w.update;
      const GruWeights& gw = w.gru;
      const Eigen::MatrixXd z = sigmoid_m(add_row(in * gw.w_z + x * gw.u_z, gw.b_z));
      const Eigen::MatrixXd r = sigmoid_m(add_row(in * gw.w_r + x * gw.u_r, gw.b_r));
      const Eigen::MatrixXd c = add_row(in * gw.w_h + r.cwiseProduct(x) * gw.u_h, gw.b_h).array().tanh().matrix();
      return (Eigen::MatrixXd::Ones(n, x.cols()) - z).cwiseProduct(x) + z.cwiseProduct(c);
    }
  }
  throw ModelError("unknown model kind");
}

}  // namespace engn
