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

#include "treesum/sim/timing.hpp"

#include <algorithm>
#include <stdexcept>

#include "treesum/format.hpp"

namespace treesum::sim {

double SimClockReport::max_compute_seconds() const {
  double m = 0.0;
  for (double c : compute_seconds) m = std::max(m, c);
  return m;
}

SimClockReport simulate_comm_time(const CommPlan& plan, double payload_bytes, const comm::HardwareModel& hw) {
  if (!(payload_bytes >= 0.0)) throw std::invalid_argument("payload bytes must be >= 0");
  hw.validate();
  SimClockReport rep;
  if (plan.empty()) return rep;
  const double transfer = payload_bytes / hw.bandwidth;
  const std::size_t p = plan.workers;

  std::vector<double> ready(p, 0.0);  // time each rank's partial (or the sum) is complete
  std::vector<double> port(p, 0.0);   // receive port free
  for (const auto& level : plan.reduce) {
    std::size_t i = 0;
    while (i < level.size()) {
      const std::uint64_t r = level[i].receiver;
      double t = std::max(port[r], ready[r]) + transfer;
      for (; i < level.size() && level[i].receiver == r; ++i) {
        t = std::max(t, ready[level[i].sender]) + hw.latency + transfer;
      }
      ready[r] = port[r] = t;
    }
  }
  const double reduce_end = ready[plan.root];
  rep.reduce_seconds = reduce_end;

  std::vector<double> has(p, -1.0);
  std::vector<double> send_port(p, 0.0);
  has[plan.root] = reduce_end;
  send_port[plan.root] = reduce_end;
  double end = reduce_end;
  for (const auto& level : plan.broadcast) {
    for (const auto& e : level) {
      const double start = std::max(send_port[e.sender], has[e.sender]);
      const double done = start + hw.latency + transfer;
      send_port[e.sender] = done;
      has[e.receiver] = done;
      send_port[e.receiver] = std::max(send_port[e.receiver], done);
      end = std::max(end, done);
    }
  }
  rep.broadcast_seconds = end - reduce_end;
  rep.comm_seconds = end;
  return rep;
}

void write_clock_csv(const std::vector<ClockRow>& rows, std::ostream& out) {
  out << "iter,reduce_s,broadcast_s,comm_s,max_compute_s,total_s\n";
  for (const auto& r : rows) {
    out << r.iter << ',' << shortest(r.report.reduce_seconds) << ',' << shortest(r.report.broadcast_seconds) << ','
        << shortest(r.report.comm_seconds) << ',' << shortest(r.report.max_compute_seconds()) << ','
        << shortest(r.report.total_seconds()) << '\n';
  }
}

}  // namespace treesum::sim
