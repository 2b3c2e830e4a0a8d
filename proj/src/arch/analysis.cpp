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

#include "treesum/arch/analysis.hpp"

#include <iomanip>
#include <sstream>

#include "treesum/error.hpp"
#include "treesum/format.hpp"

namespace treesum::arch {

std::uint64_t weight_bytes(const AnalyzerLayer& l) {
  if (!l.has_weights()) return 0;
  std::uint64_t values = l.ch * l.num_filt * l.filter_w * l.filter_h;
  if (l.has_bias) values += l.num_filt;
  return values * kBytesPerValue;
}

std::uint64_t weight_bytes(const ArchitectureSpec& arch) {
  std::uint64_t total = 0;
  for (const auto& l : arch.layers) total += weight_bytes(l);
  return total;
}

std::uint64_t activation_bytes(const AnalyzerLayer& l, std::uint64_t batch) {
  if (!l.has_weights()) return 0;
  return l.num_filt * l.activation_w * l.activation_h * batch * kBytesPerValue;
}

std::uint64_t activation_bytes(const ArchitectureSpec& arch, std::uint64_t batch) {
  if (batch == 0) throw std::invalid_argument("activation_bytes: batch must be >= 1");
  std::uint64_t total = 0;
  for (const auto& l : arch.layers) total += activation_bytes(l, batch);
  return total;
}

std::uint64_t forward_macs(const ArchitectureSpec& arch) {
  std::uint64_t macs = 0;
  for (const auto& l : arch.layers) {
    if (l.has_weights()) macs += l.ch * l.num_filt * l.filter_w * l.filter_h * l.activation_w * l.activation_h;
  }
  return macs;
}

double flops_per_batch(const ArchitectureSpec& arch, std::uint64_t batch) {
  if (batch == 0) throw std::invalid_argument("flops_per_batch: batch must be >= 1");
  return 6.0 * static_cast<double>(forward_macs(arch)) * static_cast<double>(batch);
}

double data_weight_ratio(const ArchitectureSpec& arch, std::uint64_t batch) {
  const std::uint64_t w = weight_bytes(arch);
  if (w == 0) throw ConfigError("architecture '" + arch.name + "' has no weights; data/weight ratio undefined");
  return static_cast<double>(activation_bytes(arch, batch)) / static_cast<double>(w);
}

std::string_view to_string(Parallelism p) {
  return p == Parallelism::kData ? "data-parallel" : "model-parallel";
}

Advice advise_parallelism(const ArchitectureSpec& arch, std::uint64_t batch) {
  Advice a;
  a.ratio = data_weight_ratio(arch, batch);
  const std::uint64_t d = activation_bytes(arch, batch);
  const std::uint64_t w = weight_bytes(arch);
  a.choice = d >= w ? Parallelism::kData : Parallelism::kModel;
  std::ostringstream r;
  r << to_string(a.choice) << ": |D| = " << d << " bytes, |W| = " << w << " bytes at batch " << batch
    << " (ratio " << fixed(a.ratio, 3) << "); ";
  if (a.choice == Parallelism::kData) {
    r << "exchanging weight gradients moves less data than exchanging activations";
  } else {
    r << "exchanging activations moves less data than exchanging weight gradients";
  }
  a.rationale = r.str();
  return a;
}

SizeReport analyze(const ArchitectureSpec& arch, std::uint64_t batch) {
  SizeReport s;
  s.arch = arch.name;
  s.batch = batch;
  s.weight_bytes = weight_bytes(arch);
  s.activation_bytes = activation_bytes(arch, batch);
  s.data_weight_ratio = data_weight_ratio(arch, batch);
  s.flops_fwd_bwd = flops_per_batch(arch, batch);
  return s;
}

void write_report_csv(const std::vector<SizeReport>& reports, std::ostream& out) {
  out << "arch,batch,weight_bytes,activation_bytes,ratio,flops\n";
  for (const auto& r : reports) {
    out << r.arch << ',' << r.batch << ',' << r.weight_bytes << ',' << r.activation_bytes << ','
        << shortest(r.data_weight_ratio) << ',' << shortest(r.flops_fwd_bwd) << '\n';
  }
}

void write_report_table(const std::vector<SizeReport>& reports, std::ostream& out) {
  std::size_t name_w = 4;
  for (const auto& r : reports) name_w = std::max(name_w, r.arch.size());
  out << std::left << std::setw(static_cast<int>(name_w)) << "arch" << std::right << std::setw(7) << "batch"
      << std::setw(14) << "|W| MB" << std::setw(14) << "|D| MB" << std::setw(12) << "|D|/|W|" << std::setw(14)
      << "TFLOP/batch" << std::setw(16) << "advice" << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(name_w)) << r.arch << std::right << std::setw(7) << r.batch
        << std::setw(14) << fixed(static_cast<double>(r.weight_bytes) / 1e6, 2) << std::setw(14)
        << fixed(static_cast<double>(r.activation_bytes) / 1e6, 2) << std::setw(12)
        << fixed(r.data_weight_ratio, 3) << std::setw(14) << fixed(r.flops_fwd_bwd / 1e12, 4) << std::setw(16)
        << to_string(r.activation_bytes >= r.weight_bytes ? Parallelism::kData : Parallelism::kModel) << '\n';
  }
}

}  // namespace treesum::arch
