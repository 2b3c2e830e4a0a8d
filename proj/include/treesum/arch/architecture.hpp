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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace treesum::arch {

enum class LayerKind { kConvolution, kFullyConnected, kPool, kOther };

std::string_view to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view name);

/// One layer of an architecture description. Field names follow the
/// size-accounting notation: ch input channels, num_filt output channels.
struct AnalyzerLayer {
  std::string name;
  LayerKind kind = LayerKind::kOther;
  std::uint64_t ch = 0;
  std::uint64_t num_filt = 0;
  std::uint64_t filter_w = 1;
  std::uint64_t filter_h = 1;
  std::uint64_t stride = 1;
  std::uint64_t pad = 0;
  bool has_bias = false;
  std::uint64_t activation_w = 0;  // output
  std::uint64_t activation_h = 0;
  /// Producers of this layer's input; empty means the previous layer (or the
  /// network input for the first layer). Several inputs are concatenated
  /// along channels.
  std::vector<std::string> inputs;

  bool has_weights() const { return kind == LayerKind::kConvolution || kind == LayerKind::kFullyConnected; }

  friend bool operator==(const AnalyzerLayer&, const AnalyzerLayer&) = default;
};

struct InputDims {
  std::uint64_t channels = 0;
  std::uint64_t height = 0;
  std::uint64_t width = 0;
  friend bool operator==(const InputDims&, const InputDims&) = default;
};

struct ArchitectureSpec {
  std::string name;
  InputDims input;
  std::vector<AnalyzerLayer> layers;
  std::string notes;

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

/// Parses a JSON architecture document. Dimensions that are not pinned in the
/// file are derived from the input geometry. Throws ConfigError naming the
/// layer and field on any problem.
ArchitectureSpec parse_architecture(std::string_view document);

/// Fully populated JSON document; parse_architecture(serialize(a)) == a.
std::string serialize_architecture(const ArchitectureSpec& arch);

ArchitectureSpec load_architecture(const std::string& path);

/// Names of the architectures compiled into the library.
std::vector<std::string> bundled_architectures();
bool is_bundled(std::string_view name);
ArchitectureSpec bundled_architecture(std::string_view name);

/// A bundled name or a path to a JSON file.
ArchitectureSpec resolve_architecture(const std::string& name_or_path);

}  // namespace treesum::arch
