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

#include <Eigen/Dense>

#include "engn/graph.hpp"
#include "engn/model.hpp"

namespace engn {

/// Largest graph the dense reference accepts (it materialises N x N matrices).
inline constexpr std::size_t kDenseOracleLimit = 4096;

/// Dense adjacency with A(dst, src) = number of dst <- src edges.
Eigen::MatrixXd dense_adjacency(const Graph& g);

/// Reference layer evaluation with dense matrix algebra in double precision.
/// Works on whole matrices (adjacency products, concatenations) rather than
/// walking edges, so it shares no code path with forward_layer.
Eigen::MatrixXd dense_oracle(const LayerSpec& layer, const Eigen::MatrixXd& props, const Graph& g);

}  // namespace engn
