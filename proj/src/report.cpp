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

#include "engn/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace engn {

namespace {

// Config values are kept as typed JSON where they parse as numbers or booleans.
nlohmann::ordered_json config_json(const SimConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, text] : cfg.entries()) {
    if (text == "true" || text == "false") j[key] = text == "true";
    else j[key] = nlohmann::ordered_json::parse(text);
  }
  return j;
}

bool is_integral(double v) { return v == static_cast<double>(static_cast<std::int64_t>(v)); }

std::string csv_number(double v) {
  std::ostringstream os;
  if (is_integral(v)) os << static_cast<std::int64_t>(v);
  else os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string row_to_json(const ReportRow& row) {
  nlohmann::ordered_json j;
  j["label"] = row.label;
  j["layer"] = row.layer;
  j["model"] = to_string(row.kind);
  j["f"] = row.f;
  j["h"] = row.h;
  j["order"] = to_string(row.order);
  j["tile_major"] = to_string(row.major);
  j["s_shape"] = row.s_shape;
  j["q"] = row.q;
  j["num_vertices"] = row.num_vertices;
  j["num_edges"] = row.num_edges;
  if (!row.run.empty()) {
    nlohmann::ordered_json run = nlohmann::ordered_json::object();
    for (const auto& [key, value] : row.run) run[key] = value;
    j["run"] = std::move(run);
  }
  j["config"] = config_json(row.config);
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  for (const auto& [key, value] : row.stats.entries()) {
    if (is_integral(value) && key.find("rate") == std::string::npos && key.find("utilization") == std::string::npos) {
      stats[key] = static_cast<std::uint64_t>(value);
    } else {
      stats[key] = value;
    }
  }
  j["stats"] = std::move(stats);
  return j.dump();
}

void write_jsonl(const std::vector<ReportRow>& rows, std::ostream& out) {
  for (const ReportRow& r : rows) out << row_to_json(r) << '\n';
}

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "label,layer,model,f,h,order,tile_major,s_shape,q,num_vertices,num_edges";
  for (const auto& [key, _] : SimConfig{}.entries()) out << ",config_" << key;
  for (const auto& [key, _] : SimStats{}.entries()) out << ',' << key;
  out << '\n';
  for (const ReportRow& r : rows) {
    out << r.label << ',' << r.layer << ',' << to_string(r.kind) << ',' << r.f << ',' << r.h << ','
        << to_string(r.order) << ',' << to_string(r.major) << ',' << (r.s_shape ? "true" : "false") << ',' << r.q
        << ',' << r.num_vertices << ',' << r.num_edges;
    for (const auto& [_, text] : r.config.entries()) out << ',' << text;
    for (const auto& [_, value] : r.stats.entries()) out << ',' << csv_number(value);
    out << '\n';
  }
}

void write_summary(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << std::left << std::setw(10) << "label" << std::setw(6) << "layer" << std::setw(10) << "model" << std::setw(12)
      << "dims" << std::setw(6) << "order" << std::setw(8) << "tiles" << std::setw(5) << "q" << std::right
      << std::setw(14) << "cycles" << std::setw(12) << "GB moved" << std::setw(8) << "util" << std::setw(10)
      << "hit rate" << '\n';
  for (const ReportRow& r : rows) {
    const double gb = static_cast<double>(r.stats.dram_read_bytes + r.stats.dram_write_bytes) / 1e9;
    out << std::left << std::setw(10) << (r.label.empty() ? "-" : r.label) << std::setw(6) << r.layer << std::setw(10)
        << to_string(r.kind) << std::setw(12) << (std::to_string(r.f) + ":" + std::to_string(r.h)) << std::setw(6)
        << to_string(r.order) << std::setw(8) << to_string(r.major) << std::setw(5) << r.q << std::right
        << std::setw(14) << r.stats.cycles_total << std::setw(12) << std::fixed << std::setprecision(6) << gb
        << std::setw(8) << std::setprecision(3) << r.stats.utilization << std::setw(10) << r.stats.davc_hit_rate()
        << std::defaultfloat << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace engn
