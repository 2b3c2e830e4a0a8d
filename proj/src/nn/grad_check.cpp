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

#include "treesum/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treesum::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw std::invalid_argument("grad check: eps must be in (0, 1e-3]");
}

double finite_loss(const Network& net, const Tensor& input, std::span<const std::size_t> labels) {
  const double l = net.loss(input, labels);
  if (!std::isfinite(l)) throw std::domain_error("grad check: loss is not finite");
  return l;
}

double central(double& slot, double eps, const auto& eval) {
  const double saved = slot;
  slot = saved + eps;
  const double up = eval();
  slot = saved - eps;
  const double down = eval();
  slot = saved;
  return (up - down) / (2.0 * eps);
}

}  // namespace

double grad_check_finite_diff(const Network& net, const Tensor& input,
                              std::span<const std::size_t> labels, double eps) {
  check_eps(eps);
  const Gradients analytic = net.forward_backward(input, labels);
  if (!std::isfinite(analytic.loss)) throw std::domain_error("grad check: loss is not finite");
  Network probe = net;
  auto eval = [&] { return finite_loss(probe, input, labels); };
  double worst = 0.0;
  auto& params = probe.parameters();
  for (std::size_t s = 0; s < params.size(); ++s) {
    for (std::size_t i = 0; i < params[s].weights.size(); ++i) {
      const double num = central(params[s].weights[i], eps, eval);
      worst = std::max(worst, relative_error(analytic.weights[s][i], num));
    }
    for (std::size_t i = 0; i < params[s].bias.size(); ++i) {
      const double num = central(params[s].bias[i], eps, eval);
      worst = std::max(worst, relative_error(analytic.biases[s][i], num));
    }
  }
  return worst;
}

double input_grad_check_finite_diff(const Network& net, const Tensor& input,
                                    std::span<const std::size_t> labels, double eps) {
  check_eps(eps);
  const Gradients analytic = net.forward_backward(input, labels);
  Tensor probe = input;
  auto eval = [&] { return finite_loss(net, probe, labels); };
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double num = central(probe[i], eps, eval);
    worst = std::max(worst, relative_error(analytic.input[i], num));
  }
  return worst;
}

}  // namespace treesum::nn
