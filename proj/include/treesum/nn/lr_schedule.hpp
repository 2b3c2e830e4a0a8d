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
#include <string_view>
#include <vector>

namespace treesum::nn {

enum class LrPolicy { kConstant, kStep, kPolynomial };

std::string_view to_string(LrPolicy policy);
LrPolicy parse_lr_policy(std::string_view name);

struct LrSchedule {
  LrPolicy kind = LrPolicy::kConstant;
  double base_lr = 0.01;
  double gamma = 0.1;                   // step
  std::vector<std::size_t> step_iters;  // step, strictly increasing
  double power = 0.5;                   // polynomial
  std::size_t max_iter = 0;             // polynomial, >= 1

  void validate() const;
  friend bool operator==(const LrSchedule&, const LrSchedule&) = default;
};

/// constant: base_lr
/// step: base_lr * gamma^(number of step_iters <= iter)
/// polynomial: base_lr * (1 - iter / max_iter)^power, iter <= max_iter
double lr_at(const LrSchedule& schedule, std::size_t iter);

struct Hyperparams {
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::size_t batch_size = 16;
  LrSchedule lr_schedule;
  std::size_t epochs = 1;
  std::uint64_t seed = 1;

  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

}  // namespace treesum::nn
