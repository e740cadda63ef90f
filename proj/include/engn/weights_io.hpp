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

#include <filesystem>
#include <stdexcept>
#include <string_view>

#include <Eigen/Core>

#include "engn/model.hpp"

namespace engn {

class WeightIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two on-disk formats, told apart by the first four bytes:
//   binary: "EWGT", uint32 rows, uint32 cols (little endian), rows*cols float32, row-major
//   text:   "rows cols" then rows*cols whitespace-separated values, row-major; '#' lines ignored
Eigen::MatrixXd load_weight_matrix(const std::filesystem::path& path);
void save_weight_matrix_text(const Eigen::MatrixXd& m, const std::filesystem::path& path);
void save_weight_matrix_binary(const Eigen::MatrixXd& m, const std::filesystem::path& path);

/// Replaces the named weight of a layer after checking its shape. Names:
/// feature, self, pool, pool_bias, update, gate_dst, gate_src, bias,
/// relation<k>, gru_w_z, gru_u_z, gru_w_r, gru_u_r, gru_w_h, gru_u_h,
/// gru_b_z, gru_b_r, gru_b_h. Row vectors accept a 1 x n matrix.
void set_layer_weight(LayerSpec& layer, std::string_view name, const Eigen::MatrixXd& value);

}  // namespace engn
