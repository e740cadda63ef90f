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
#include <ostream>
#include <string>
#include <vector>

#include "engn/simcore.hpp"

namespace engn {

/// One JSON object per row: identification fields, "config" (every SimConfig
/// field) and "stats" (every SimStats field).
std::string row_to_json(const ReportRow& row);
void write_jsonl(const std::vector<ReportRow>& rows, std::ostream& out);

/// Flat CSV: identification columns, then config_* and stats columns.
void write_csv(const std::vector<ReportRow>& rows, std::ostream& out);

/// Human-readable summary (cycles, GB moved, utilization, hit rate).
void write_summary(const std::vector<ReportRow>& rows, std::ostream& out);

/// Writes via a temporary file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace engn
