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

#include "engn/weights_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace engn {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'W', 'G', 'T'};

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff), static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

Eigen::MatrixXd parse_binary(const std::vector<unsigned char>& bytes, const std::string& where) {
  if (bytes.size() < 12) throw WeightIoError(where + ": truncated header");
  const std::uint32_t rows = read_u32_le(bytes.data() + 4);
  const std::uint32_t cols = read_u32_le(bytes.data() + 8);
  const std::uint64_t count = std::uint64_t{rows} * cols;
  if (bytes.size() != 12 + count * 4) {
    throw WeightIoError(where + ": expected " + std::to_string(count) + " float32 values for " + std::to_string(rows) +
                        "x" + std::to_string(cols));
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint32_t raw = read_u32_le(bytes.data() + 12 + 4 * k);
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) = std::bit_cast<float>(raw);
  }
  return m;
}

Eigen::MatrixXd parse_text(const std::string& text, const std::string& where) {
  std::istringstream lines(text);
  std::vector<std::string> tokens;
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    for (std::string t; fields >> t;) tokens.push_back(std::move(t));
  }
  auto number = [&](std::size_t k, auto& out) {
    const std::string& t = tokens[k];
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw WeightIoError(where + ": malformed value '" + t + "'");
  };
  if (tokens.size() < 2) throw WeightIoError(where + ": missing 'rows cols' header");
  std::size_t rows = 0;
  std::size_t cols = 0;
  number(0, rows);
  number(1, cols);
  if (tokens.size() - 2 != rows * cols) {
    throw WeightIoError(where + ": header says " + std::to_string(rows) + "x" + std::to_string(cols) + " but found " +
                        std::to_string(tokens.size() - 2) + " values");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < rows * cols; ++k) {
    double v = 0.0;
    number(k + 2, v);
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) = v;
  }
  return m;
}

void assign(Eigen::MatrixXd& slot, const Eigen::MatrixXd& value, Eigen::Index rows, Eigen::Index cols,
            std::string_view name) {
  if (value.rows() != rows || value.cols() != cols) {
    throw WeightIoError("weight '" + std::string(name) + "' must be " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", got " + std::to_string(value.rows()) + "x" +
                        std::to_string(value.cols()));
  }
  slot = value;
}

void assign_row(Eigen::RowVectorXd& slot, const Eigen::MatrixXd& value, Eigen::Index cols, std::string_view name) {
  Eigen::MatrixXd tmp;
  assign(tmp, value, 1, cols, name);
  slot = tmp.row(0);
}

}  // namespace

Eigen::MatrixXd load_weight_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightIoError("cannot open weight file '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic.data(), 4) == 0) return parse_binary(bytes, path.string());
  return parse_text(std::string(bytes.begin(), bytes.end()), path.string());
}

void save_weight_matrix_text(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw WeightIoError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << '\n';
  }
}

void save_weight_matrix_binary(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WeightIoError("cannot write '" + path.string() + "'");
  out.write(kMagic.data(), 4);
  write_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  write_u32_le(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c))));
}

namespace {

bool used_by(ModelKind kind, std::string_view name) {
  switch (kind) {
    case ModelKind::GCN:
      return name == "feature" || name == "bias";
    case ModelKind::GSPool:
      return name == "pool" || name == "pool_bias" || name == "update" || name == "bias";
    case ModelKind::RGCN:
      return name.starts_with("relation") || name == "self" || name == "bias";
    case ModelKind::GatedGCN:
      return name == "gate_dst" || name == "gate_src" || name == "update" || name == "bias";
    case ModelKind::GRN:
      return name.starts_with("gru_") || name == "update";
  }
  return false;
}

}  // namespace

void set_layer_weight(LayerSpec& layer, std::string_view name, const Eigen::MatrixXd& value) {
  if (!used_by(layer.kind, name)) {
    throw WeightIoError("weight '" + std::string(name) + "' is not used by " + std::string(to_string(layer.kind)));
  }
  const auto f = static_cast<Eigen::Index>(layer.f);
  const auto h = static_cast<Eigen::Index>(layer.h);
  const auto p = static_cast<Eigen::Index>(layer.pool_dim);
  WeightSet& w = layer.weights;
  if (name == "feature") assign(w.feature, value, f, h, name);
  else if (name == "self") assign(w.self, value, f, h, name);
  else if (name == "pool") assign(w.pool, value, f, p, name);
  else if (name == "pool_bias") assign_row(w.pool_bias, value, p, name);
  else if (name == "update") {
    const Eigen::Index in = layer.kind == ModelKind::GSPool ? p + f : f;
    assign(w.update, value, in, h, name);
  } else if (name == "gate_dst") assign(w.gate_dst, value, f, f, name);
  else if (name == "gate_src") assign(w.gate_src, value, f, f, name);
  else if (name == "bias") assign_row(w.bias, value, h, name);
  else if (name.starts_with("relation")) {
    std::size_t k = 0;
    const auto digits = name.substr(8);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || k >= w.relation.size()) {
      throw WeightIoError("unknown relation weight '" + std::string(name) + "'");
    }
    assign(w.relation[k], value, f, h, name);
  } else if (name == "gru_w_z") assign(w.gru.w_z, value, h, h, name);
  else if (name == "gru_u_z") assign(w.gru.u_z, value, h, h, name);
  else if (name == "gru_w_r") assign(w.gru.w_r, value, h, h, name);
  else if (name == "gru_u_r") assign(w.gru.u_r, value, h, h, name);
  else if (name == "gru_w_h") assign(w.gru.w_h, value, h, h, name);
  else if (name == "gru_u_h") assign(w.gru.u_h, value, h, h, name);
  else if (name == "gru_b_z") assign_row(w.gru.b_z, value, h, name);
  else if (name == "gru_b_r") assign_row(w.gru.b_r, value, h, name);
  else if (name == "gru_b_h") assign_row(w.gru.b_h, value, h, name);
  else throw WeightIoError("unknown weight name '" + std::string(name) + "'");
}

}  // namespace engn
