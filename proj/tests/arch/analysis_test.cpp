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

#include "treesum/arch/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "treesum/error.hpp"

namespace treesum::arch {
namespace {

constexpr double kMB = 1e6;

AnalyzerLayer conv_layer(std::uint64_t ch, std::uint64_t nf, std::uint64_t f, std::uint64_t act, bool bias) {
  AnalyzerLayer l;
  l.name = "c";
  l.kind = LayerKind::kConvolution;
  l.ch = ch;
  l.num_filt = nf;
  l.filter_w = l.filter_h = f;
  l.activation_w = l.activation_h = act;
  l.has_bias = bias;
  return l;
}

ArchitectureSpec single(const AnalyzerLayer& l) {
  ArchitectureSpec a;
  a.name = "single";
  a.layers = {l};
  return a;
}

TEST(WeightBytesTest, DirectArithmetic) {
  EXPECT_EQ(weight_bytes(single(conv_layer(3, 2, 3, 6, false))), 216u);
  const auto fc = parse_architecture(R"({"name": "t", "input": {"channels": 8, "height": 4, "width": 4},
      "layers": [{"name": "fc", "kind": "fully-connected", "numFilt": 10}]})");
  EXPECT_EQ(weight_bytes(fc), 5120u);
  EXPECT_EQ(weight_bytes(single(conv_layer(3, 2, 3, 6, true))), 216u + 8u);
}

TEST(ActivationBytesTest, DirectArithmeticAndLinearity) {
  const auto a = single(conv_layer(1, 2, 1, 5, false));
  EXPECT_EQ(activation_bytes(a, 1), 200u);
  EXPECT_EQ(activation_bytes(a, 1024), 204800u);
  EXPECT_THROW(activation_bytes(a, 0), std::invalid_argument);
}

TEST(FlopsTest, UnitCaseAndLinearity) {
  const auto a = single(conv_layer(1, 1, 1, 1, false));
  EXPECT_EQ(flops_per_batch(a, 1), 6.0);
  const auto nin = bundled_architecture("nin");
  EXPECT_EQ(flops_per_batch(nin, 2048), 2.0 * flops_per_batch(nin, 1024));
}

TEST(RatioTest, DoublesWithBatchAndRejectsZeroWeights) {
  const auto a = bundled_architecture("alexnet");
  EXPECT_EQ(data_weight_ratio(a, 512), 0.5 * data_weight_ratio(a, 1024));
  ArchitectureSpec empty;
  AnalyzerLayer pool;
  pool.kind = LayerKind::kPool;
  empty.layers = {pool};
  EXPECT_THROW(data_weight_ratio(empty, 1), ConfigError);
  EXPECT_THROW(data_weight_ratio(a, 0), std::invalid_argument);
}

TEST(AdviseTest, TieBreakAndRationale) {
  // ratio 1: 1x1 conv, ch = 1, 1 filter, 1x1 output, no bias, batch 1.
  const auto a = single(conv_layer(1, 1, 1, 1, false));
  ASSERT_EQ(data_weight_ratio(a, 1), 1.0);
  const Advice adv = advise_parallelism(a, 1);
  EXPECT_EQ(adv.choice, Parallelism::kData);
  EXPECT_NE(adv.rationale.find("|D| = 4 bytes"), std::string::npos) << adv.rationale;
  EXPECT_NE(adv.rationale.find("|W| = 4 bytes"), std::string::npos) << adv.rationale;
  EXPECT_EQ(advise_parallelism(bundled_architecture("nin"), 1024).choice, Parallelism::kData);
  EXPECT_EQ(advise_parallelism(bundled_architecture("msft-speech"), 1024).choice, Parallelism::kModel);
}

// Independent per-layer parameter listing of the NiN ImageNet model:
// (in, out, filter) for every convolution, plus its output grid.
struct NinRow {
  std::uint64_t in, out, f, act;
};
constexpr NinRow kNin[] = {{3, 96, 11, 54},   {96, 96, 1, 54},    {96, 96, 1, 54},     {96, 256, 5, 26},
                           {256, 256, 1, 26}, {256, 256, 1, 26},  {256, 384, 3, 12},   {384, 384, 1, 12},
                           {384, 384, 1, 12}, {384, 1024, 3, 5},  {1024, 1024, 1, 5},  {1024, 1000, 1, 5}};

TEST(BundledNinTest, MatchesIndependentLayerListing) {
  std::uint64_t w = 0, d = 0, macs = 0;
  for (const auto& r : kNin) {
    w += 4 * (r.in * r.out * r.f * r.f + r.out);
    d += 4 * r.out * r.act * r.act;
    macs += r.in * r.out * r.f * r.f * r.act * r.act;
  }
  const auto nin = bundled_architecture("nin");
  EXPECT_EQ(weight_bytes(nin), w);
  EXPECT_EQ(activation_bytes(nin, 1), d);
  EXPECT_EQ(forward_macs(nin), macs);
}

TEST(BundledTableTest, WeightSizesNearPublished) {
  const std::pair<const char*, double> rows[] = {{"nin", 30}, {"alexnet", 249}, {"googlenet", 54}, {"vgg19", 575}};
  for (const auto& [name, mb] : rows) {
    const double w = static_cast<double>(weight_bytes(bundled_architecture(name))) / kMB;
    EXPECT_NEAR(w, mb, 0.10 * mb) << name;
  }
}

TEST(BundledTableTest, RatiosAndVolumesNearPublished) {
  const auto nin = bundled_architecture("nin");
  EXPECT_NEAR(data_weight_ratio(nin, 1024), 195.0, 0.2 * 195.0);
  EXPECT_NEAR(static_cast<double>(activation_bytes(nin, 1024)) / kMB, 5800.0, 0.2 * 5800.0);
  const double tf = flops_per_batch(nin, 1024) / 1e12;
  EXPECT_GT(tf, 6.7 / 2);
  EXPECT_LT(tf, 6.7 * 2);
  EXPECT_NEAR(data_weight_ratio(bundled_architecture("alexnet"), 1024), 10.2, 0.2 * 10.2);
  EXPECT_LT(data_weight_ratio(bundled_architecture("msft-speech"), 1024), 1.0);
}

AnalyzerLayer random_layer(std::mt19937_64& gen) {
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + gen() % (hi - lo + 1); };
  AnalyzerLayer l;
  l.name = "r" + std::to_string(gen() % 1000);
  const int k = static_cast<int>(gen() % 4);
  l.kind = static_cast<LayerKind>(k);
  l.ch = pick(1, 64);
  l.num_filt = l.has_weights() ? pick(1, 64) : l.ch;
  l.filter_w = pick(1, 7);
  l.filter_h = pick(1, 7);
  l.activation_w = pick(1, 32);
  l.activation_h = pick(1, 32);
  l.has_bias = gen() % 2 == 0;
  return l;
}

TEST(AnalysisPropertyTest, PermutationAdditivityAndBatchLinearity) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    ArchitectureSpec a;
    a.name = "r";
    const std::size_t n = 1 + gen() % 12;
    for (std::size_t i = 0; i < n; ++i) a.layers.push_back(random_layer(gen));
    if (weight_bytes(a) == 0) a.layers.push_back(conv_layer(1, 1, 1, 1, false));
    const std::uint64_t w = weight_bytes(a);
    const std::uint64_t b = 1 + gen() % 2048;

    ArchitectureSpec shuffled = a;
    std::shuffle(shuffled.layers.begin(), shuffled.layers.end(), gen);
    EXPECT_EQ(weight_bytes(shuffled), w);

    const std::size_t cut = gen() % (a.layers.size() + 1);
    ArchitectureSpec head = a, tail = a;
    head.layers.assign(a.layers.begin(), a.layers.begin() + static_cast<std::ptrdiff_t>(cut));
    tail.layers.assign(a.layers.begin() + static_cast<std::ptrdiff_t>(cut), a.layers.end());
    EXPECT_EQ(weight_bytes(head) + weight_bytes(tail), w);

    EXPECT_EQ(activation_bytes(a, b), b * activation_bytes(a, 1));
    EXPECT_EQ(analyze(a, b).weight_bytes, analyze(a, 1).weight_bytes);
    EXPECT_EQ(analyze(a, b).data_weight_ratio,
              static_cast<double>(activation_bytes(a, b)) / static_cast<double>(w));
  }
}

TEST(AnalysisPropertyTest, StrictlyMonotoneInGeometry) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 300; ++trial) {
    AnalyzerLayer l = random_layer(gen);
    l.kind = gen() % 2 ? LayerKind::kConvolution : LayerKind::kFullyConnected;
    const auto base = single(l);
    const double f0 = flops_per_batch(base, 3);
    const std::uint64_t d0 = activation_bytes(base, 3);
    for (int field = 0; field < 6; ++field) {
      AnalyzerLayer m = l;
      std::uint64_t* slots[] = {&m.ch, &m.num_filt, &m.filter_w, &m.filter_h, &m.activation_w, &m.activation_h};
      *slots[field] += 1;
      EXPECT_GT(flops_per_batch(single(m), 3), f0) << field;
      if (field == 1 || field >= 4) {
        EXPECT_GT(activation_bytes(single(m), 3), d0) << field;
      }
    }
  }
}

TEST(ReportTest, CsvColumnsAndTable) {
  std::vector<SizeReport> rows = {analyze(single(conv_layer(3, 2, 3, 6, false)), 2)};
  std::ostringstream csv;
  write_report_csv(rows, csv);
  EXPECT_EQ(csv.str(), "arch,batch,weight_bytes,activation_bytes,ratio,flops\n"
                       "single,2,216,576,2.6666666666666665,23328\n");
  std::ostringstream table;
  write_report_table(rows, table);
  EXPECT_NE(table.str().find("data-parallel"), std::string::npos);
}

}  // namespace
}  // namespace treesum::arch
