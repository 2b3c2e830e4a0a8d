// Copyright 2026 The Treesum Authors.
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
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace treesum::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

/// Runs one invocation. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Comma-separated worker counts. "a,b,...,z" expands geometrically when b
/// is a multiple of a greater than a, arithmetically otherwise, and must land
/// on z exactly. Throws std::invalid_argument.
std::vector<std::uint64_t> parse_p_list(std::string_view text);

/// Comma-separated positive numbers. Throws std::invalid_argument.
std::vector<double> parse_number_list(std::string_view text);

/// Help text of the top-level command ("") or of one subcommand.
std::string help_text(const std::string& subcommand = "");

}  // namespace treesum::cli
