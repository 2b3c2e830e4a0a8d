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

#include "treesum/nn/lr_schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace treesum::nn {

std::string_view to_string(LrPolicy policy) {
  switch (policy) {
    case LrPolicy::kConstant: return "constant";
    case LrPolicy::kStep: return "step";
    case LrPolicy::kPolynomial: return "polynomial";
  }
  return "unknown";
}

LrPolicy parse_lr_policy(std::string_view name) {
  if (name == "constant" || name == "fixed") return LrPolicy::kConstant;
  if (name == "step" || name == "multistep") return LrPolicy::kStep;
  if (name == "polynomial" || name == "poly") return LrPolicy::kPolynomial;
  throw std::invalid_argument("unknown lr policy '" + std::string(name) + "'");
}

void LrSchedule::validate() const {
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) {
    throw std::invalid_argument("lr schedule: base_lr must be positive and finite");
  }
  if (kind == LrPolicy::kStep) {
    if (!(gamma > 0.0)) throw std::invalid_argument("lr schedule: gamma must be positive");
    for (std::size_t i = 1; i < step_iters.size(); ++i) {
      if (step_iters[i] <= step_iters[i - 1]) {
        throw std::invalid_argument("lr schedule: step_iters must be strictly increasing");
      }
    }
  }
  if (kind == LrPolicy::kPolynomial) {
    if (max_iter < 1) throw std::invalid_argument("lr schedule: polynomial needs max_iter >= 1");
    if (!(power > 0.0)) throw std::invalid_argument("lr schedule: polynomial needs power > 0");
  }
}

double lr_at(const LrSchedule& s, std::size_t iter) {
  switch (s.kind) {
    case LrPolicy::kConstant:
      return s.base_lr;
    case LrPolicy::kStep: {
      double lr = s.base_lr;
      for (std::size_t boundary : s.step_iters) {
        if (boundary <= iter) lr *= s.gamma;
      }
      return lr;
    }
    case LrPolicy::kPolynomial: {
      if (iter > s.max_iter) {
        throw std::out_of_range("lr_at: iter " + std::to_string(iter) + " exceeds max_iter " +
                                std::to_string(s.max_iter));
      }
      const double frac = 1.0 - static_cast<double>(iter) / static_cast<double>(s.max_iter);
      return s.base_lr * std::pow(frac, s.power);
    }
  }
  throw std::invalid_argument("lr_at: unknown policy");
}

void Hyperparams::validate() const {
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  lr_schedule.validate();
}

}  // namespace treesum::nn
