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

#include "treesum/arch/architecture.hpp"

namespace treesum::comm {

struct HardwareModel {
  double bandwidth = 1e9;      // bytes/s per node, full duplex
  double latency = 0.0;        // s per message hop
  double worker_flops = 1e12;  // flop/s per worker

  void validate() const;
  friend bool operator==(const HardwareModel&, const HardwareModel&) = default;
};

enum class TopologyKind { kSingle, kParameterServer, kReductionTree };

struct Topology {
  TopologyKind kind = TopologyKind::kReductionTree;
  std::uint64_t k = 2;  // branching factor, reduction tree only

  static Topology single() { return {TopologyKind::kSingle, 2}; }
  static Topology parameter_server() { return {TopologyKind::kParameterServer, 2}; }
  static Topology tree(std::uint64_t k = 2) { return {TopologyKind::kReductionTree, k}; }

  void validate() const;
  friend bool operator==(const Topology&, const Topology&) = default;
};

/// "single", "ps", "tree" (k = 2) or "tree:K".
std::string to_string(const Topology& t);
Topology parse_topology(std::string_view text);

struct CommEstimate {
  std::uint64_t workers = 1;
  double gradient_bytes = 0.0;
  double comm_seconds = 0.0;
  double compute_seconds = 0.0;
  double total_seconds = 0.0;
};

/// ceil(log_k p) for p >= 1, computed in integers.
std::uint64_t tree_levels(std::uint64_t p, std::uint64_t k);

/// Serialized transfers of a full gradient: p for the parameter server,
/// k per level for the tree.
std::uint64_t ps_transfer_factor(std::uint64_t p);
std::uint64_t tree_transfer_factor(std::uint64_t p, std::uint64_t k);

/// Reduce-phase time. Besides the serialized transfers, each message hop on
/// the critical path costs hw.latency: p - 1 hops for the parameter server,
/// k - 1 per level for the tree.
double ps_comm_time(double gradient_bytes, std::uint64_t p, const HardwareModel& hw);
double tree_comm_time(double gradient_bytes, std::uint64_t p, std::uint64_t k, const HardwareModel& hw);
double comm_time(double gradient_bytes, std::uint64_t p, const Topology& topo, const HardwareModel& hw);

CommEstimate iteration_time(const arch::ArchitectureSpec& arch, std::uint64_t batch, std::uint64_t p,
                            const Topology& topo, const HardwareModel& hw);

/// Same composition from precomputed totals.
CommEstimate iteration_time(double gradient_bytes, double flops_per_batch, std::uint64_t batch, std::uint64_t p,
                            const Topology& topo, const HardwareModel& hw);

struct CurvePoint {
  CommEstimate estimate;
  double speedup = 1.0;
};

std::vector<CurvePoint> speedup_curve(const arch::ArchitectureSpec& arch, std::uint64_t batch,
                                      const Topology& topo, const HardwareModel& hw,
                                      const std::vector<std::uint64_t>& p_list);
std::vector<CurvePoint> speedup_curve(double gradient_bytes, double flops_per_batch, std::uint64_t batch,
                                      const Topology& topo, const HardwareModel& hw,
                                      const std::vector<std::uint64_t>& p_list);

/// Smallest p = 2^m at which the tree is strictly faster than the parameter
/// server. Depends only on k when the latency is 0.
std::uint64_t crossover_workers(double gradient_bytes, std::uint64_t k, const HardwareModel& hw);

std::uint64_t iterations_for_epochs(std::uint64_t epochs, std::uint64_t dataset_size, std::uint64_t batch);

/// Bandwidth at which tree communication equals compute for the given
/// architecture, batch and worker count.
double calibrate_bandwidth(const arch::ArchitectureSpec& arch, std::uint64_t batch, std::uint64_t p,
                           std::uint64_t k, double worker_flops);

/// Default profile: worker_flops 1e12, latency 0, bandwidth calibrated so
/// NiN at batch 1024 on a binary tree of 32 workers spends as long
/// communicating as computing.
HardwareModel calibrated_profile();

/// Columns p,comm_s,compute_s,total_s,speedup.
void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out);
void write_curve_table(const std::vector<CurvePoint>& curve, std::ostream& out);

}  // namespace treesum::comm
