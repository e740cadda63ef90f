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
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "engn/simcore.hpp"

namespace engn::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInputError = 2, kInternalError = 3 };

/// Entry point shared by the engn-sim binary and the tests.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Default seed: ENGN_SEED when set (and numeric), else 1.
std::uint64_t default_seed();

/// "n=1000,e=8000,seed=1" -> key/value map. Throws std::invalid_argument.
std::map<std::string, std::string> parse_kv_list(std::string_view text);

/// Flat "key = value" lines; '#' starts a comment. Throws std::invalid_argument.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

/// "1433:16" -> (1433, 16).
std::pair<std::size_t, std::size_t> parse_dims(std::string_view text);

/// Cross product of "key=v1,v2,..." axes over a base config, in row-major
/// order (the last axis varies fastest). Labels read "key=v;key=v".
std::vector<std::pair<std::string, SimConfig>> expand_sweep(const SimConfig& base,
                                                            const std::vector<std::string>& axes);

}  // namespace engn::cli
