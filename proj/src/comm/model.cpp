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

#include "treesum/comm/model.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "treesum/arch/analysis.hpp"
#include "treesum/error.hpp"
#include "treesum/format.hpp"

namespace treesum::comm {

void HardwareModel::validate() const {
  if (!(bandwidth > 0.0)) throw ConfigError("hardware: bandwidth must be > 0");
  if (!(latency >= 0.0) || !std::isfinite(latency)) throw ConfigError("hardware: latency must be >= 0");
  if (!(worker_flops > 0.0)) throw ConfigError("hardware: worker_flops must be > 0");
}

void Topology::validate() const {
  if (kind == TopologyKind::kReductionTree && k < 2) {
    throw ConfigError("reduction tree branching factor must be >= 2, got " + std::to_string(k));
  }
}

std::string to_string(const Topology& t) {
  switch (t.kind) {
    case TopologyKind::kSingle: return "single";
    case TopologyKind::kParameterServer: return "ps";
    case TopologyKind::kReductionTree: return t.k == 2 ? "tree" : "tree:" + std::to_string(t.k);
  }
  return "?";
}

Topology parse_topology(std::string_view text) {
  if (text == "single") return Topology::single();
  if (text == "ps" || text == "parameter-server") return Topology::parameter_server();
  if (text == "tree" || text == "reduction-tree") return Topology::tree();
  if (text.starts_with("tree:")) {
    std::uint64_t k = 0;
    const auto digits = text.substr(5);
    const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (r.ec == std::errc() && r.ptr == digits.data() + digits.size()) {
      Topology t = Topology::tree(k);
      t.validate();
      return t;
    }
  }
  throw ConfigError("unknown topology '" + std::string(text) + "' (expected single, ps, tree or tree:K)");
}

std::uint64_t tree_levels(std::uint64_t p, std::uint64_t k) {
  if (p == 0) throw std::invalid_argument("p must be >= 1");
  if (k < 2) throw std::invalid_argument("branching factor must be >= 2");
  std::uint64_t levels = 0;
  for (std::uint64_t reach = 1; reach < p; ++levels) {
    reach = reach > p / k ? p : reach * k;
  }
  return levels;
}

std::uint64_t ps_transfer_factor(std::uint64_t p) {
  if (p == 0) throw std::invalid_argument("p must be >= 1");
  return p;
}

std::uint64_t tree_transfer_factor(std::uint64_t p, std::uint64_t k) { return k * tree_levels(p, k); }

double ps_comm_time(double gradient_bytes, std::uint64_t p, const HardwareModel& hw) {
  if (p == 0) throw std::invalid_argument("p must be >= 1");
  return gradient_bytes * static_cast<double>(p) / hw.bandwidth + static_cast<double>(p - 1) * hw.latency;
}

double tree_comm_time(double gradient_bytes, std::uint64_t p, std::uint64_t k, const HardwareModel& hw) {
  return gradient_bytes * static_cast<double>(tree_transfer_factor(p, k)) / hw.bandwidth +
         static_cast<double>((k - 1) * tree_levels(p, k)) * hw.latency;
}

double comm_time(double gradient_bytes, std::uint64_t p, const Topology& topo, const HardwareModel& hw) {
  if (p == 1) return 0.0;
  switch (topo.kind) {
    case TopologyKind::kSingle:
      throw ConfigError("topology 'single' requires p = 1, got " + std::to_string(p));
    case TopologyKind::kParameterServer: return ps_comm_time(gradient_bytes, p, hw);
    case TopologyKind::kReductionTree: return tree_comm_time(gradient_bytes, p, topo.k, hw);
  }
  return 0.0;
}

CommEstimate iteration_time(double gradient_bytes, double flops, std::uint64_t batch, std::uint64_t p,
                            const Topology& topo, const HardwareModel& hw) {
  if (p == 0) throw std::invalid_argument("p must be >= 1");
  if (batch == 0 || batch % p != 0) {
    throw ConfigError("batch " + std::to_string(batch) + " is not divisible by " + std::to_string(p) + " workers");
  }
  topo.validate();
  CommEstimate e;
  e.workers = p;
  e.gradient_bytes = gradient_bytes;
  e.compute_seconds = flops / (static_cast<double>(p) * hw.worker_flops);
  e.comm_seconds = comm_time(gradient_bytes, p, topo, hw);
  e.total_seconds = e.comm_seconds + e.compute_seconds;
  return e;
}

CommEstimate iteration_time(const arch::ArchitectureSpec& a, std::uint64_t batch, std::uint64_t p,
                            const Topology& topo, const HardwareModel& hw) {
  return iteration_time(static_cast<double>(arch::weight_bytes(a)), arch::flops_per_batch(a, batch), batch, p,
                        topo, hw);
}

std::vector<CurvePoint> speedup_curve(double gradient_bytes, double flops, std::uint64_t batch,
                                      const Topology& topo, const HardwareModel& hw,
                                      const std::vector<std::uint64_t>& p_list) {
  if (p_list.empty()) throw std::invalid_argument("speedup_curve: worker list is empty");
  const double base = iteration_time(gradient_bytes, flops, batch, 1, topo, hw).total_seconds;
  std::vector<CurvePoint> out;
  out.reserve(p_list.size());
  for (std::uint64_t p : p_list) {
    CurvePoint c;
    c.estimate = iteration_time(gradient_bytes, flops, batch, p, topo, hw);
    c.speedup = p == 1 ? 1.0 : base / c.estimate.total_seconds;
    out.push_back(c);
  }
  return out;
}

std::vector<CurvePoint> speedup_curve(const arch::ArchitectureSpec& a, std::uint64_t batch, const Topology& topo,
                                      const HardwareModel& hw, const std::vector<std::uint64_t>& p_list) {
  return speedup_curve(static_cast<double>(arch::weight_bytes(a)), arch::flops_per_batch(a, batch), batch, topo,
                       hw, p_list);
}

std::uint64_t crossover_workers(double gradient_bytes, std::uint64_t k, const HardwareModel& hw) {
  if (k < 2) throw std::invalid_argument("branching factor must be >= 2");
  for (std::uint64_t p = 2; p != 0; p *= 2) {
    // Without latency both models are linear in bytes / bandwidth, so the
    // transfer counts decide exactly.
    const bool tree_wins = hw.latency == 0.0
                               ? tree_transfer_factor(p, k) < ps_transfer_factor(p)
                               : tree_comm_time(gradient_bytes, p, k, hw) < ps_comm_time(gradient_bytes, p, hw);
    if (tree_wins) return p;
  }
  throw std::logic_error("no crossover below 2^64");
}

std::uint64_t iterations_for_epochs(std::uint64_t epochs, std::uint64_t dataset_size, std::uint64_t batch) {
  if (epochs == 0 || dataset_size == 0 || batch == 0) {
    throw std::invalid_argument("iterations_for_epochs: epochs, dataset size and batch must be >= 1");
  }
  const std::uint64_t items = epochs * dataset_size;
  return items / batch + (items % batch != 0);
}

double calibrate_bandwidth(const arch::ArchitectureSpec& a, std::uint64_t batch, std::uint64_t p, std::uint64_t k,
                           double worker_flops) {
  if (p < 2) throw std::invalid_argument("calibration needs p >= 2");
  const double compute = arch::flops_per_batch(a, batch) / (static_cast<double>(p) * worker_flops);
  return static_cast<double>(arch::weight_bytes(a)) * static_cast<double>(tree_transfer_factor(p, k)) / compute;
}

HardwareModel calibrated_profile() {
  HardwareModel hw;
  hw.worker_flops = 1e12;
  hw.latency = 0.0;
  hw.bandwidth = calibrate_bandwidth(arch::bundled_architecture("nin"), 1024, 32, 2, hw.worker_flops);
  return hw;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out) {
  out << "p,comm_s,compute_s,total_s,speedup\n";
  for (const auto& c : curve) {
    out << c.estimate.workers << ',' << shortest(c.estimate.comm_seconds) << ','
        << shortest(c.estimate.compute_seconds) << ',' << shortest(c.estimate.total_seconds) << ','
        << shortest(c.speedup) << '\n';
  }
}

void write_curve_table(const std::vector<CurvePoint>& curve, std::ostream& out) {
  out << std::setw(6) << "p" << std::setw(14) << "comm s" << std::setw(14) << "compute s" << std::setw(14)
      << "total s" << std::setw(10) << "speedup" << '\n';
  for (const auto& c : curve) {
    out << std::setw(6) << c.estimate.workers << std::setw(14) << fixed(c.estimate.comm_seconds, 6)
        << std::setw(14) << fixed(c.estimate.compute_seconds, 6) << std::setw(14)
        << fixed(c.estimate.total_seconds, 6) << std::setw(10) << fixed(c.speedup, 3) << '\n';
  }
}

}  // namespace treesum::comm
