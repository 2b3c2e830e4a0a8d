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
#include <vector>

#include "treesum/arch/architecture.hpp"

namespace treesum::arch {

inline constexpr std::uint64_t kBytesPerValue = 4;

/// |W|: weights of convolution and fully-connected layers, plus biases where
/// present.
std::uint64_t weight_bytes(const ArchitectureSpec& arch);
std::uint64_t weight_bytes(const AnalyzerLayer& layer);

/// |D|: output activations of convolution and fully-connected layers.
std::uint64_t activation_bytes(const ArchitectureSpec& arch, std::uint64_t batch);
std::uint64_t activation_bytes(const AnalyzerLayer& layer, std::uint64_t batch);

/// Forward multiply-accumulates for one sample.
std::uint64_t forward_macs(const ArchitectureSpec& arch);

/// Forward plus backward floating-point operations: 2 per MAC, backward
/// counted as twice the forward pass.
double flops_per_batch(const ArchitectureSpec& arch, std::uint64_t batch);

double data_weight_ratio(const ArchitectureSpec& arch, std::uint64_t batch);

enum class Parallelism { kData, kModel };
std::string_view to_string(Parallelism p);

struct Advice {
  Parallelism choice = Parallelism::kData;
  double ratio = 0.0;
  std::string rationale;
};

/// Data parallelism when the activations outweigh the weights (ties go to
/// data parallelism).
Advice advise_parallelism(const ArchitectureSpec& arch, std::uint64_t batch);

struct SizeReport {
  std::string arch;
  std::uint64_t batch = 0;
  std::uint64_t weight_bytes = 0;
  std::uint64_t activation_bytes = 0;
  double data_weight_ratio = 0.0;
  double flops_fwd_bwd = 0.0;
};

SizeReport analyze(const ArchitectureSpec& arch, std::uint64_t batch);

/// Columns arch,batch,weight_bytes,activation_bytes,ratio,flops.
void write_report_csv(const std::vector<SizeReport>& reports, std::ostream& out);
void write_report_table(const std::vector<SizeReport>& reports, std::ostream& out);

}  // namespace treesum::arch
