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
#include <ostream>
#include <vector>

#include "treesum/comm/model.hpp"
#include "treesum/sim/plan.hpp"

namespace treesum::sim {

struct SimClockReport {
  double reduce_seconds = 0.0;
  double broadcast_seconds = 0.0;
  double comm_seconds = 0.0;
  std::vector<double> compute_seconds;  // per rank

  double max_compute_seconds() const;
  double total_seconds() const { return max_compute_seconds() + comm_seconds; }
  friend bool operator==(const SimClockReport&, const SimClockReport&) = default;
};

/// Virtual-clock evaluation of a plan. Each receiving node works its
/// receive port serially within a level: first its own running partial
/// (payload/bandwidth, no hop), then each child in ascending rank order
/// (latency + payload/bandwidth, starting no earlier than the child's partial
/// is complete). Broadcast mirrors the tree: a parent sends to its children
/// one after another. Disjoint pairs proceed in parallel.
SimClockReport simulate_comm_time(const CommPlan& plan, double payload_bytes, const comm::HardwareModel& hw);

struct ClockRow {
  std::size_t iter = 0;
  SimClockReport report;
};

/// Columns iter,reduce_s,broadcast_s,comm_s,max_compute_s,total_s.
void write_clock_csv(const std::vector<ClockRow>& rows, std::ostream& out);

}  // namespace treesum::sim
