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

#include "treesum/nn/layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "treesum/error.hpp"

namespace treesum::nn {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kFullyConnected: return "fully-connected";
    case LayerKind::kConvolution: return "convolution";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kMaxPool: return "max-pool";
    case LayerKind::kSoftmaxXent: return "softmax-xent";
  }
  return "unknown";
}

LayerSpec convolution(std::size_t in_channels, std::size_t out_channels, std::size_t filter,
                      std::size_t stride, std::size_t pad) {
  return {LayerKind::kConvolution, in_channels, out_channels, filter, filter, stride, pad};
}

LayerSpec fully_connected(std::size_t in_channels, std::size_t out_channels, std::size_t in_h,
                          std::size_t in_w) {
  return {LayerKind::kFullyConnected, in_channels, out_channels, in_h, in_w, 1, 0};
}

LayerSpec relu() { return {LayerKind::kRelu, 0, 0, 1, 1, 1, 0}; }

LayerSpec max_pool(std::size_t filter, std::size_t stride, std::size_t pad) {
  return {LayerKind::kMaxPool, 0, 0, filter, filter, stride, pad};
}

LayerSpec softmax_xent() { return {LayerKind::kSoftmaxXent, 0, 0, 1, 1, 1, 0}; }

namespace {

[[noreturn]] void fail(const LayerSpec& layer, std::size_t index, const std::string& what) {
  throw ShapeError("layer " + std::to_string(index) + " (" + std::string(to_string(layer.kind)) +
                   "): " + what);
}

std::size_t window_count(std::size_t in, std::size_t filter, std::size_t stride, std::size_t pad) {
  return (in + 2 * pad - filter) / stride + 1;
}

struct Dims {
  std::size_t n, c, h, w;
};

Dims dims_of(const Shape& s) {
  auto at = [&](std::size_t i) { return i < s.size() ? s[i] : std::size_t{1}; };
  return {at(0), at(1), at(2), at(3)};
}

void check_tensor(const LayerSpec& layer, std::size_t index, const char* what,
                  const Tensor& t, const Shape& expected) {
  if (t.shape() != expected) {
    fail(layer, index, std::string(what) + " shape expected " + to_string(expected) + ", got " +
                           to_string(t.shape()));
  }
}

// Convolution and fully-connected share this kernel.
Tensor conv_forward(const LayerSpec& l, const Tensor& w, const Tensor& b, const Tensor& x,
                    const Shape& out_shape) {
  const Dims in = dims_of(x.shape());
  const Dims out = dims_of(out_shape);
  Tensor y(out_shape);
  const auto pad = static_cast<std::ptrdiff_t>(l.pad);
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t o = 0; o < out.c; ++o) {
      for (std::size_t oy = 0; oy < out.h; ++oy) {
        for (std::size_t ox = 0; ox < out.w; ++ox) {
          double acc = b[o];
          const auto y0 = static_cast<std::ptrdiff_t>(oy * l.stride) - pad;
          const auto x0 = static_cast<std::ptrdiff_t>(ox * l.stride) - pad;
          for (std::size_t c = 0; c < in.c; ++c) {
            for (std::size_t i = 0; i < l.filter_h; ++i) {
              const std::ptrdiff_t iy = y0 + static_cast<std::ptrdiff_t>(i);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
              for (std::size_t j = 0; j < l.filter_w; ++j) {
                const std::ptrdiff_t ix = x0 + static_cast<std::ptrdiff_t>(j);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.w)) continue;
                acc += w.at(o, c, i, j) *
                       x.at(n, c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
              }
            }
          }
          y.at(n, o, oy, ox) = acc;
        }
      }
    }
  }
  return y;
}

LayerGradients conv_backward(const LayerSpec& l, const Tensor& w, const Tensor& x,
                             const Tensor& gy) {
  const Dims in = dims_of(x.shape());
  const Dims out = dims_of(gy.shape());
  LayerGradients g{Tensor(x.shape()), Tensor(w.shape()), Tensor(l.bias_shape())};
  // Per-sample partial sums, folded into the batch totals in sample order.
  Tensor sample_w(w.shape());
  Tensor sample_b(l.bias_shape());
  const auto pad = static_cast<std::ptrdiff_t>(l.pad);
  for (std::size_t n = 0; n < in.n; ++n) {
    sample_w.fill(0.0);
    sample_b.fill(0.0);
    for (std::size_t o = 0; o < out.c; ++o) {
      for (std::size_t oy = 0; oy < out.h; ++oy) {
        for (std::size_t ox = 0; ox < out.w; ++ox) {
          const double go = gy.at(n, o, oy, ox);
          sample_b[o] += go;
          const auto y0 = static_cast<std::ptrdiff_t>(oy * l.stride) - pad;
          const auto x0 = static_cast<std::ptrdiff_t>(ox * l.stride) - pad;
          for (std::size_t c = 0; c < in.c; ++c) {
            for (std::size_t i = 0; i < l.filter_h; ++i) {
              const std::ptrdiff_t iy = y0 + static_cast<std::ptrdiff_t>(i);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
              for (std::size_t j = 0; j < l.filter_w; ++j) {
                const std::ptrdiff_t ix = x0 + static_cast<std::ptrdiff_t>(j);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.w)) continue;
                const auto uy = static_cast<std::size_t>(iy);
                const auto ux = static_cast<std::size_t>(ix);
                sample_w.at(o, c, i, j) += go * x.at(n, c, uy, ux);
                g.grad_in.at(n, c, uy, ux) += go * w.at(o, c, i, j);
              }
            }
          }
        }
      }
    }
    for (std::size_t k = 0; k < sample_w.size(); ++k) g.grad_w[k] += sample_w[k];
    for (std::size_t k = 0; k < sample_b.size(); ++k) g.grad_b[k] += sample_b[k];
  }
  return g;
}

// Index of the first maximal input cell of each pooling window; padding
// cells never win.
std::vector<std::size_t> pool_argmax(const LayerSpec& l, const Tensor& x, const Shape& out_shape) {
  const Dims in = dims_of(x.shape());
  const Dims out = dims_of(out_shape);
  std::vector<std::size_t> arg(element_count(out_shape));
  const auto pad = static_cast<std::ptrdiff_t>(l.pad);
  std::size_t k = 0;
  for (std::size_t n = 0; n < out.n; ++n) {
    for (std::size_t c = 0; c < out.c; ++c) {
      for (std::size_t oy = 0; oy < out.h; ++oy) {
        for (std::size_t ox = 0; ox < out.w; ++ox, ++k) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_idx = x.size();
          const auto y0 = static_cast<std::ptrdiff_t>(oy * l.stride) - pad;
          const auto x0 = static_cast<std::ptrdiff_t>(ox * l.stride) - pad;
          for (std::size_t i = 0; i < l.filter_h; ++i) {
            const std::ptrdiff_t iy = y0 + static_cast<std::ptrdiff_t>(i);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
            for (std::size_t j = 0; j < l.filter_w; ++j) {
              const std::ptrdiff_t ix = x0 + static_cast<std::ptrdiff_t>(j);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.w)) continue;
              const std::size_t idx =
                  x.index(n, c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
              if (best_idx == x.size() || x[idx] > best) {
                best = x[idx];
                best_idx = idx;
              }
            }
          }
          arg[k] = best_idx;
        }
      }
    }
  }
  return arg;
}

Tensor softmax_rows(const Tensor& x) {
  const Dims d = dims_of(x.shape());
  Tensor y(x.shape());
  for (std::size_t n = 0; n < d.n; ++n) {
    const double* row = x.data() + n * d.c;
    double* out = y.data() + n * d.c;
    const double m = *std::max_element(row, row + d.c);
    double z = 0.0;
    for (std::size_t k = 0; k < d.c; ++k) {
      out[k] = std::exp(row[k] - m);
      z += out[k];
    }
    for (std::size_t k = 0; k < d.c; ++k) out[k] /= z;
  }
  return y;
}

}  // namespace

Shape output_shape(const LayerSpec& l, const Shape& input, std::size_t index) {
  if (input.empty() || input.size() > 4) {
    fail(l, index, "input must have rank 1 to 4, got " + to_string(input));
  }
  const Dims in = dims_of(input);
  switch (l.kind) {
    case LayerKind::kConvolution:
    case LayerKind::kFullyConnected: {
      if (l.in_channels == 0 || l.out_channels == 0 || l.filter_h == 0 || l.filter_w == 0 ||
          l.stride == 0) {
        fail(l, index, "channels, filter dims and stride must be >= 1");
      }
      if (in.c != l.in_channels) {
        fail(l, index, "expected " + std::to_string(l.in_channels) + " input channels, got " +
                           std::to_string(in.c) + " (input shape " + to_string(input) + ")");
      }
      if (l.kind == LayerKind::kFullyConnected) {
        if (l.filter_h != in.h || l.filter_w != in.w || l.pad != 0) {
          fail(l, index, "filter " + std::to_string(l.filter_h) + "x" +
                             std::to_string(l.filter_w) + " must cover the " +
                             std::to_string(in.h) + "x" + std::to_string(in.w) +
                             " input map without padding");
        }
        return {in.n, l.out_channels, 1, 1};
      }
      if (in.h + 2 * l.pad < l.filter_h || in.w + 2 * l.pad < l.filter_w) {
        fail(l, index, "filter larger than padded input " + to_string(input));
      }
      return {in.n, l.out_channels, window_count(in.h, l.filter_h, l.stride, l.pad),
              window_count(in.w, l.filter_w, l.stride, l.pad)};
    }
    case LayerKind::kMaxPool: {
      if (l.filter_h == 0 || l.filter_w == 0 || l.stride == 0) {
        fail(l, index, "filter dims and stride must be >= 1");
      }
      if (l.pad >= l.filter_h || l.pad >= l.filter_w) fail(l, index, "pad must be smaller than filter");
      if (in.h + 2 * l.pad < l.filter_h || in.w + 2 * l.pad < l.filter_w) {
        fail(l, index, "window larger than padded input " + to_string(input));
      }
      return {in.n, in.c, window_count(in.h, l.filter_h, l.stride, l.pad),
              window_count(in.w, l.filter_w, l.stride, l.pad)};
    }
    case LayerKind::kRelu:
      return input;
    case LayerKind::kSoftmaxXent:
      if (in.h != 1 || in.w != 1) fail(l, index, "expects (batch, classes) logits, got " + to_string(input));
      return input;
  }
  fail(l, index, "unknown layer kind");
}

Tensor layer_forward(const LayerSpec& l, const Tensor& weights, const Tensor& bias,
                     const Tensor& input, std::size_t index) {
  const Shape out = output_shape(l, input.shape(), index);
  switch (l.kind) {
    case LayerKind::kConvolution:
    case LayerKind::kFullyConnected:
      check_tensor(l, index, "weights", weights, l.weight_shape());
      check_tensor(l, index, "bias", bias, l.bias_shape());
      return conv_forward(l, weights, bias, input, out);
    case LayerKind::kRelu: {
      Tensor y = input;
      for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
      return y;
    }
    case LayerKind::kMaxPool: {
      const auto arg = pool_argmax(l, input, out);
      Tensor y(out);
      for (std::size_t k = 0; k < arg.size(); ++k) y[k] = input[arg[k]];
      return y;
    }
    case LayerKind::kSoftmaxXent:
      return softmax_rows(input);
  }
  fail(l, index, "unknown layer kind");
}

LayerGradients layer_backward(const LayerSpec& l, const Tensor& weights, const Tensor& input,
                              const Tensor& grad_out, std::size_t index) {
  const Shape out = output_shape(l, input.shape(), index);
  check_tensor(l, index, "grad_out", grad_out, out);
  switch (l.kind) {
    case LayerKind::kConvolution:
    case LayerKind::kFullyConnected:
      check_tensor(l, index, "weights", weights, l.weight_shape());
      return conv_backward(l, weights, input, grad_out);
    case LayerKind::kRelu: {
      Tensor g(input.shape());
      for (std::size_t k = 0; k < g.size(); ++k) g[k] = input[k] > 0.0 ? grad_out[k] : 0.0;
      return {std::move(g), {}, {}};
    }
    case LayerKind::kMaxPool: {
      const auto arg = pool_argmax(l, input, out);
      Tensor g(input.shape());
      for (std::size_t k = 0; k < arg.size(); ++k) g[arg[k]] += grad_out[k];
      return {std::move(g), {}, {}};
    }
    case LayerKind::kSoftmaxXent: {
      const Tensor s = softmax_rows(input);
      const Dims d = dims_of(input.shape());
      Tensor g(input.shape());
      for (std::size_t n = 0; n < d.n; ++n) {
        double dot = 0.0;
        for (std::size_t k = 0; k < d.c; ++k) dot += grad_out[n * d.c + k] * s[n * d.c + k];
        for (std::size_t k = 0; k < d.c; ++k) {
          g[n * d.c + k] = s[n * d.c + k] * (grad_out[n * d.c + k] - dot);
        }
      }
      return {std::move(g), {}, {}};
    }
  }
  fail(l, index, "unknown layer kind");
}

std::size_t forward_macs(const LayerSpec& l, const Shape& input) {
  if (!l.has_parameters()) return 0;
  const Shape out = output_shape(l, input);
  return l.in_channels * l.out_channels * l.filter_h * l.filter_w * out[2] * out[3];
}

}  // namespace treesum::nn
