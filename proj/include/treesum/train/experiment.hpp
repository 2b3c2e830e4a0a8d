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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treesum/comm/model.hpp"
#include "treesum/nn/lr_schedule.hpp"
#include "treesum/nn/network.hpp"
#include "treesum/train/dataset.hpp"
#include "treesum/train/metrics.hpp"

namespace treesum::train {

/// base_lr scaled in proportion to the batch size.
double scale_lr(double base_lr, double base_batch, double new_batch);

struct DatasetConfig {
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
  std::size_t train = 8192;
  std::size_t test = 1024;
  SampleDims dims;
  std::size_t classes = 4;
  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

enum class InitKind { kNinGaussian, kXavier, kGaussian };

struct ExperimentConfig {
  std::string arch = "toy-nin";  // toy-nin or toy-fc
  DatasetConfig dataset;
  nn::Hyperparams hyper;
  InitKind init = InitKind::kXavier;
  double init_std = 0.01;  // kGaussian only
  comm::Topology topology = comm::Topology::tree(2);
  comm::HardwareModel hardware;
  std::size_t workers = 1;
  std::size_t eval_interval = 50;
  std::vector<double> lrs;  // optional sweep over base_lr
  std::string output;       // metrics path, optional

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_experiment_config(std::string_view document);
ExperimentConfig load_experiment_config(const std::string& path);
std::string serialize_experiment_config(const ExperimentConfig& config);

/// Executable network for the configured architecture and sample shape.
nn::Network build_network(const ExperimentConfig& config);

struct RunResult {
  double base_lr = 0.0;
  std::vector<MetricsRow> rows;
  std::string weights_digest;  // FNV-1a 64 of the serialized weights, hex
  std::vector<double> final_weights;  // rank 0, parameter order
  bool diverged = false;
  std::size_t diverged_at = 0;  // iteration with the first non-finite loss
  std::size_t iterations_planned = 0;
  std::size_t comm_events = 0;  // gradient aggregations performed
  double final_test_acc = 0.0;
};

/// Runs one training with config.hyper.lr_schedule. A polynomial schedule
/// with max_iter 0 decays over the whole run.
RunResult run_experiment(const ExperimentConfig& config);

/// Same, on a prebuilt split (sweeps share one dataset).
RunResult run_experiment(const ExperimentConfig& config, const DatasetSplit& data);

/// One run per entry of config.lrs (in that order), `parallel` at a time.
std::vector<RunResult> run_sweep(const ExperimentConfig& config, std::size_t parallel = 1);

DatasetSplit make_dataset(const ExperimentConfig& config);

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes);
std::string hex64(std::uint64_t v);

struct DivergenceReport {
  std::size_t compared_rows = 0;
  bool length_mismatch = false;
  double max_abs_loss_diff = 0.0;
  double max_rel_loss_diff = 0.0;
  double final_acc_delta = 0.0;  // b - a, in fraction units
  bool digests_equal = true;
};

DivergenceReport compare_runs(const RunResult& a, const RunResult& b);
DivergenceReport compare_metrics(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b);

}  // namespace treesum::train
