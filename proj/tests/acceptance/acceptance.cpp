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


// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/mpfr_oracle.hpp"
#include "support/random_tensor.hpp"
#include "treesum/arch/analysis.hpp"
#include "treesum/arch/architecture.hpp"
#include "treesum/cli/cli.hpp"
#include "treesum/comm/model.hpp"
#include "treesum/format.hpp"
#include "treesum/nn/grad_check.hpp"
#include "treesum/nn/lr_schedule.hpp"
#include "treesum/nn/rng.hpp"
#include "treesum/sim/allreduce.hpp"
#include "treesum/sim/plan.hpp"
#include "treesum/sim/timing.hpp"
#include "treesum/train/experiment.hpp"

namespace {

using namespace treesum;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("violated: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string mb(std::uint64_t bytes) { return fixed(static_cast<double>(bytes) / 1e6, 2) + " MB"; }

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

// 1 ------------------------------------------------------------------------------

Outcome weight_sizes() {
  Outcome o;
  const std::pair<const char*, double> rows[] = {{"nin", 30e6}, {"alexnet", 249e6}, {"googlenet", 54e6}, {"vgg19", 575e6}};
  for (const auto& [name, target] : rows) {
    const auto w = arch::analyze(arch::bundled_architecture(name), 1024).weight_bytes;
    o.note(std::string(name) + " " + mb(w));
    o.require(within(static_cast<double>(w), target, 0.10), std::string(name) + " |W| within 10% of " + mb(static_cast<std::uint64_t>(target)));
  }
  return o;
}

// 2 ------------------------------------------------------------------------------

Outcome size_ratios() {
  Outcome o;
  const double nin = arch::data_weight_ratio(arch::bundled_architecture("nin"), 1024);
  const double alex = arch::data_weight_ratio(arch::bundled_architecture("alexnet"), 1024);
  const double speech = arch::data_weight_ratio(arch::bundled_architecture("msft-speech"), 1024);
  o.note("nin " + fixed(nin, 1) + ", alexnet " + fixed(alex, 2) + ", msft-speech " + fixed(speech, 3));
  o.require(within(nin, 195, 0.20), "nin ratio within 20% of 195");
  o.require(within(alex, 10.2, 0.20), "alexnet ratio within 20% of 10.2");
  o.require(speech < 1.0, "msft-speech ratio < 1");
  return o;
}

// 3 ------------------------------------------------------------------------------

Outcome scaling_laws() {
  Outcome o;
  comm::HardwareModel hw;
  const double bytes = 30e6;
  for (std::uint64_t p = 2; p <= 512; ++p) {
    o.require(comm::ps_comm_time(bytes, 2 * p, hw) == 2 * comm::ps_comm_time(bytes, p, hw),
              "ps time doubles with p at p=" + std::to_string(p));
  }
  const double unit = comm::tree_comm_time(bytes, 2, 2, hw);
  for (std::uint64_t m = 1, p = 2; m <= 10; ++m, p *= 2) {
    o.require(std::abs(comm::tree_comm_time(bytes, p, 2, hw) - static_cast<double>(m) * unit) <= 1e-15 * m * unit,
              "tree time proportional to m at p=2^" + std::to_string(m));
  }
  o.require(comm::crossover_workers(bytes, 2, hw) == 8, "crossover at p=8");
  o.require(comm::tree_comm_time(bytes, 4, 2, hw) == comm::ps_comm_time(bytes, 4, hw), "tie at p=4");

  // Randomized properties over p in 2..1024, sizes and bandwidths.
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> log_bytes(0.0, 10.0), log_bw(6.0, 12.0);
  std::size_t cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    comm::HardwareModel h;
    h.bandwidth = std::pow(10.0, log_bw(gen));
    const double b = std::pow(10.0, log_bytes(gen));
    double prev_ps = 0.0, prev_tree = 0.0;
    for (std::uint64_t p = 2; p <= 1024; ++p, ++cases) {
      const double ps = comm::ps_comm_time(b, p, h), tree = comm::tree_comm_time(b, p, 2, h);
      std::uint64_t full = 1, m = 0;
      while (full < p) full *= 2, ++m;
      const bool ok = ps >= prev_ps && tree >= prev_tree &&
                      std::abs(ps - b * static_cast<double>(p) / h.bandwidth) <= 1e-12 * ps &&
                      tree == comm::tree_comm_time(b, full, 2, h) &&
                      std::abs(tree - 2.0 * static_cast<double>(m) * b / h.bandwidth) <= 1e-12 * tree &&
                      (p < 7 || tree < ps);
      if (!ok) {
        o.require(false, "property at p=" + std::to_string(p));
        return o;
      }
      prev_ps = ps;
      prev_tree = tree;
    }
  }
  o.note("ps(128)/tree(128) = " + fixed(comm::ps_comm_time(bytes, 128, hw) / comm::tree_comm_time(bytes, 128, 2, hw), 3) +
         ", " + std::to_string(cases) + " property cases");
  return o;
}

// 4 ------------------------------------------------------------------------------

Outcome sim_vs_analytic() {
  Outcome o;
  comm::HardwareModel hw;
  double worst = 0.0;
  for (std::uint64_t p = 2; p <= 256; p *= 2) {
    for (const auto& t : {comm::Topology::parameter_server(), comm::Topology::tree(2)}) {
      const double sim = sim::simulate_comm_time(sim::plan_topology(t, p), 30e6, hw).reduce_seconds;
      const double model = comm::comm_time(30e6, p, t, hw);
      const double rel = std::abs(sim - model) / model;
      worst = std::max(worst, rel);
      o.require(rel <= 1e-9, comm::to_string(t) + " at p=" + std::to_string(p));
    }
  }
  o.note("max relative difference " + shortest(worst));
  return o;
}

// 5 ------------------------------------------------------------------------------

// Values are assembled from bit patterns so that tiny and subnormal
// values cost no more to draw than ordinary ones.
double random_value(nn::Rng& rng, int regime) {
  const std::uint64_t r = rng.next_u64();
  const std::uint64_t sign = r & (std::uint64_t{1} << 63);
  const std::uint64_t mant = r & ((std::uint64_t{1} << 52) - 1);
  switch (regime) {
    case 0: return rng.normal();
    case 1: return std::bit_cast<double>(sign | ((23 + rng.below(2001)) << 52) | mant);
    case 2: {
      const std::uint64_t field = rng.below(24);
      if (field == 0) return std::bit_cast<double>(sign | (mant >> rng.below(52)));
      return std::bit_cast<double>(sign | (field << 52) | mant);
    }
    default: return rng.normal() * 1e16;
  }
}

Outcome aggregation_exactness() {
  Outcome o;
  nn::Rng rng(5);
  testing::ArraySumOracle oracle;
  const std::vector<comm::Topology> topologies = {comm::Topology::parameter_server(), comm::Topology::tree(2),
                                                  comm::Topology::tree(3), comm::Topology::tree(4)};
  std::size_t elements = 0, mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t p = 1 + rng.below(64);
    const auto n = trial == 0 ? std::size_t{100000} : static_cast<std::size_t>(std::pow(10.0, rng.uniform(0.0, 5.0)));
    const int regime = static_cast<int>(rng.below(4));
    std::vector<sim::GradientBuffer> per_rank(p);
    for (auto& b : per_rank) {
      b.values.resize(n);
      for (double& x : b.values) x = random_value(rng, regime);
    }
    // Cancellation: the last rank nearly undoes the first.
    if (regime == 3 && p > 1) {
      for (std::size_t i = 0; i < n; ++i) per_rank[p - 1].values[i] = -per_rank[0].values[i] * (1 + 0x1p-40);
    }
    std::vector<double> expected(n);
    std::vector<double> column(p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint64_t r = 0; r < p; ++r) column[r] = per_rank[r].values[i];
      expected[i] = oracle.sum(column);
    }
    for (const auto& t : topologies) {
      const sim::GradientBuffer got = sim::allreduce_sum(per_rank, sim::plan_topology(t, p));
      for (std::size_t i = 0; i < n; ++i) {
        if (std::bit_cast<std::uint64_t>(got.values[i]) != std::bit_cast<std::uint64_t>(expected[i])) ++mismatches;
      }
    }
    elements += n * p;
  }
  o.note(std::to_string(elements) + " summands, 4 topologies, " + std::to_string(mismatches) + " mismatches");
  o.require(mismatches == 0, "bitwise equality with the sequential oracle");
  return o;
}

// 6 ------------------------------------------------------------------------------

Outcome distributed_equals_single() {
  Outcome o;
  train::ExperimentConfig c;
  c.dataset.train = 3200;
  c.dataset.test = 256;
  c.hyper.batch_size = 16;
  c.hyper.epochs = 1;
  c.hyper.lr_schedule.base_lr = 0.01;
  c.eval_interval = 100;
  c.topology = comm::Topology::tree(2);
  const train::DatasetSplit data = train::make_dataset(c);
  c.workers = 1;
  const train::RunResult base = train::run_experiment(c, data);
  o.require(base.rows.size() == 200, "200 iterations");
  double worst_loss = 0.0, worst_w = 0.0;
  for (std::size_t p : {2, 4, 8}) {
    c.workers = p;
    const train::RunResult r = train::run_experiment(c, data);
    if (r.rows.size() != base.rows.size() || r.final_weights.size() != base.final_weights.size()) {
      o.require(false, "row and weight counts at p=" + std::to_string(p));
      continue;
    }
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const double a = base.rows[i].train_loss, b = r.rows[i].train_loss;
      worst_loss = std::max(worst_loss, std::abs(a - b) / std::abs(a));
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < r.final_weights.size(); ++i) {
      num = std::max(num, std::abs(r.final_weights[i] - base.final_weights[i]));
      den = std::max(den, std::abs(base.final_weights[i]));
    }
    worst_w = std::max(worst_w, num / den);
  }
  o.note("max loss rel diff " + shortest(worst_loss) + ", max weight rel diff " + shortest(worst_w));
  o.require(worst_loss <= 1e-9, "losses within 1e-9");
  o.require(worst_w <= 1e-9, "weights within 1e-9");
  return o;
}

// 7 ------------------------------------------------------------------------------

Outcome gradient_check() {
  Outcome o;
  std::mt19937_64 gen(7);
  auto labels = [&](std::size_t n, std::size_t k) {
    std::vector<std::size_t> l(n);
    for (auto& x : l) x = gen() % k;
    return l;
  };
  struct Case {
    std::string kind;
    nn::Network net;
    nn::Shape input;
  };
  std::vector<Case> cases;
  cases.push_back({"fully-connected", nn::Network({3, 2, 2}, {nn::fully_connected(3, 5, 2, 2), nn::softmax_xent()}),
                   {4, 3, 2, 2}});
  cases.push_back({"convolution", nn::Network({2, 5, 5}, {nn::convolution(2, 3, 3, 2, 1), nn::convolution(3, 4, 3), nn::softmax_xent()}),
                   {3, 2, 5, 5}});
  cases.push_back({"relu", nn::Network({6}, {nn::fully_connected(6, 8), nn::relu(), nn::fully_connected(8, 3), nn::softmax_xent()}),
                   {5, 6, 1, 1}});
  cases.push_back({"max-pool", nn::Network({2, 6, 6}, {nn::convolution(2, 3, 3, 1, 1), nn::max_pool(3, 2, 1),
                                                      nn::fully_connected(3, 4, 3, 3), nn::softmax_xent()}),
                   {2, 2, 6, 6}});
  cases.push_back({"softmax-xent", nn::Network({4}, {nn::fully_connected(4, 6), nn::softmax_xent()}), {6, 4, 1, 1}});
  for (auto& c : cases) {
    c.net.initialize(nn::InitScheme::gaussian(0.4, 0.1), 11);
    const nn::Tensor x = testing::random_tensor(c.input, gen, 1.0);
    const std::size_t k = c.net.num_classes();
    const auto y = labels(c.input[0], k);
    const double ep = nn::grad_check_finite_diff(c.net, x, y, 1e-5);
    const double ei = nn::input_grad_check_finite_diff(c.net, x, y, 1e-5);
    const double e = std::max(ep, ei);
    o.note(c.kind + " " + shortest(e));
    o.require(e < 1e-4, c.kind + " relative error < 1e-4");
  }
  return o;
}

// 8 ------------------------------------------------------------------------------

Outcome batch_lr_scaling() {
  Outcome o;
  train::ExperimentConfig c = train::load_experiment_config(TREESUM_SOURCE_DIR "/configs/default.json");
  const train::DatasetSplit data = train::make_dataset(c);
  const double lambda = c.hyper.lr_schedule.base_lr;
  c.hyper.batch_size = 16;
  c.hyper.lr_schedule.base_lr = lambda;
  const train::RunResult small = train::run_experiment(c, data);
  c.hyper.batch_size = 64;
  c.hyper.lr_schedule.base_lr = train::scale_lr(lambda, 16, 64);
  const train::RunResult big = train::run_experiment(c, data);
  const double gap = 100.0 * std::abs(small.final_test_acc - big.final_test_acc);
  o.note("batch 16 @ " + shortest(lambda) + ": " + fixed(100 * small.final_test_acc, 2) + "%, batch 64 @ " +
         shortest(train::scale_lr(lambda, 16, 64)) + ": " + fixed(100 * big.final_test_acc, 2) + "%, comm events " +
         std::to_string(small.comm_events) + " vs " + std::to_string(big.comm_events));
  o.require(!small.diverged && !big.diverged, "both runs converge");
  o.require(gap <= 2.0, "accuracy gap <= 2 points");
  o.require(small.comm_events == 4 * big.comm_events, "communication events exactly 4x fewer");
  return o;
}

// 9 ------------------------------------------------------------------------------

Outcome calibrated_speedup() {
  Outcome o;
  const auto hw = comm::calibrated_profile();
  const auto nin = arch::bundled_architecture("nin");
  const auto at32 = comm::iteration_time(nin, 1024, 32, comm::Topology::tree(2), hw);
  o.require(std::abs(at32.comm_seconds - at32.compute_seconds) <= 1e-12 * at32.compute_seconds,
            "calibration: comm = compute at p=32");
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p = 1; p <= 1024; p *= 2) ps.push_back(p);
  const auto tree = comm::speedup_curve(nin, 1024, comm::Topology::tree(2), hw, ps);
  const auto server = comm::speedup_curve(nin, 1024, comm::Topology::parameter_server(), hw, ps);
  double ps_peak = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] <= 128 && i > 0) o.require(tree[i].speedup > tree[i - 1].speedup, "tree increasing at p=" + std::to_string(ps[i]));
    if (ps[i] >= 8) o.require(server[i].speedup < tree[i].speedup, "ps below tree at p=" + std::to_string(ps[i]));
    ps_peak = std::max(ps_peak, server[i].speedup);
  }
  o.note("tree speedup at 128 = " + fixed(tree[7].speedup, 3) + ", ps peak = " + fixed(ps_peak, 3) +
         ", bandwidth " + shortest(hw.bandwidth) + " B/s");
  return o;
}

// 10 -----------------------------------------------------------------------------

Outcome lr_schedule() {
  Outcome o;
  nn::LrSchedule s;
  s.kind = nn::LrPolicy::kPolynomial;
  s.power = 0.5;
  for (double base : {0.01, 0.04, 0.08, 1.0}) {
    for (std::size_t max_iter : {2, 100, 1000, 450000}) {
      s.base_lr = base;
      s.max_iter = max_iter;
      o.require(nn::lr_at(s, 0) == base, "lr(0) = base_lr");
      o.require(nn::lr_at(s, max_iter) == 0.0, "lr(max_iter) = 0");
      o.require(std::abs(nn::lr_at(s, max_iter / 2) - base * std::sqrt(0.5)) <= 1e-12,
                "midpoint = base_lr * sqrt(0.5)");
    }
  }
  s.base_lr = 0.01;
  s.max_iter = 1000;
  o.note("lr(500) = " + shortest(nn::lr_at(s, 500)));
  return o;
}

// 11 -----------------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "treesum_acceptance";
  std::filesystem::create_directories(dir);
  const std::string config = TREESUM_SOURCE_DIR "/configs/default.json";
  setenv("TREESUM_SEED", "20260", 1);
  std::string csv[2], out[2];
  for (int i = 0; i < 2; ++i) {
    const auto path = dir / ("run" + std::to_string(i) + ".csv");
    std::ostringstream so, se;
    const int code = cli::run_cli({"train", "--config", config, "--out", path.string()}, so, se);
    o.require(code == 0, "train exit code 0 (" + se.str() + ")");
    out[i] = so.str();
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    csv[i] = ss.str();
  }
  unsetenv("TREESUM_SEED");
  std::filesystem::remove_all(dir);
  auto digest = [](const std::string& s) {
    const auto at = s.find("weights_digest");
    return at == std::string::npos ? std::string() : s.substr(at, s.find('\n', at) - at);
  };
  o.require(!csv[0].empty() && csv[0] == csv[1], "byte-identical metrics CSVs");
  o.require(!digest(out[0]).empty() && digest(out[0]) == digest(out[1]), "identical weight digests");
  auto seed_line = [](const std::string& s) {
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("seed ", 0) == 0) return line;
    }
    return std::string();
  };
  const std::string seed = seed_line(out[0]);
  o.require(seed.size() >= 5 && seed.substr(seed.size() - 5) == "20260", "seed taken from TREESUM_SEED");
  o.note(std::to_string(csv[0].size()) + " CSV bytes, " + digest(out[0]).substr(digest(out[0]).rfind(' ') + 1));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "bundled weight sizes", 1, weight_sizes},
      {2, "data/weight ratios at batch 1024", 1, size_ratios},
      {3, "analytic ps and tree scaling laws", 1, scaling_laws},
      {4, "simulated vs analytic reduce time at zero latency", 10, sim_vs_analytic},
      {5, "allreduce bitwise equal to the sequential oracle", 60, aggregation_exactness},
      {6, "distributed training equals single-worker training", 300, distributed_equals_single},
      {7, "finite-difference gradient check per layer kind", 60, gradient_check},
      {8, "batch 64 @ 4x lr vs batch 16 at equal epochs", 600, batch_lr_scaling},
      {9, "calibrated speedup curves", 1, calibrated_speedup},
      {10, "polynomial lr schedule values", 1, lr_schedule},
      {11, "train determinism under TREESUM_SEED", 120, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s >= c.budget_s) o.require(false, "runtime " + fixed(s, 2) + " s >= " + shortest(c.budget_s) + " s");
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " [" << fixed(s, 2)
              << " s] " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
