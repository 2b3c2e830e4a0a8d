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
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace treesum::train {

struct MetricsRow {
  std::size_t iter = 0;
  double epoch = 0.0;
  double lr = 0.0;
  double train_loss = 0.0;
  std::optional<double> test_acc;
  double comm_s = 0.0;   // simulated communication, this iteration
  double total_s = 0.0;  // simulated compute + communication, this iteration
  double wall_s = 0.0;   // simulated clock at the end of the iteration

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr const char* kMetricsHeader = "iter,epoch,lr,train_loss,test_acc,comm_s,total_s,wall_s";

void write_metrics(const std::vector<MetricsRow>& rows, std::ostream& out);
void write_metrics(const std::vector<MetricsRow>& rows, const std::string& path);

std::vector<MetricsRow> read_metrics(std::istream& in, const std::string& source = "metrics");
std::vector<MetricsRow> read_metrics(const std::string& path);

}  // namespace treesum::train
