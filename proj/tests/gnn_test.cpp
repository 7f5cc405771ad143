// Copyright 2026 The symaug Authors
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


#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "symaug/augmentation.hpp"
#include "symaug/bipartite.hpp"
#include "symaug/gnn.hpp"
#include "symaug/symmetry.hpp"

namespace symaug {
namespace {

Permutation random_permutation(Rng& rng, int n) {
  std::vector<int> img(n);
  for (int k = 0; k < n; ++k) img[k] = k;
  rng.shuffle(img);
  return Permutation(img);
}

GnnModel random_model(std::uint64_t seed) {
  GnnModel m;
  m.init(seed);
  // Nonzero biases so that they are exercised as well.
  Rng rng(seed ^ 0xabcdef);
  auto jitter = [&](const ParamLayout::Slice& s) {
    for (int k = 0; k < s.rows * s.cols; ++k) m.params()[s.offset + k] = rng.uniform(-0.3, 0.3);
  };
  const ParamLayout& L = m.layout();
  jitter(L.embed_var_b);
  jitter(L.embed_cons_b);
  for (const auto& p : L.passes) {
    jitter(p.msg_bias);
    jitter(p.bias);
  }
  jitter(L.head_b1);
  jitter(L.head_b2);
  return m;
}

// Four variables, three rows, mixed signs.
IlpInstance four_var_instance() {
  const std::vector<Row> rows = {
      {Sense::kLessEqual, 2.0, {{0, 1.0}, {1, 1.0}, {2, 1.0}}},
      {Sense::kGreaterEqual, 1.0, {{1, 1.0}, {3, 2.0}}},
      {Sense::kLessEqual, 1.0, {{0, -1.0}, {2, 3.0}, {3, 1.0}}}};
  return IlpInstance::from_rows({1.0, -1.0, 2.0, 0.5}, rows);
}

TEST(Gnn, OutputShapeAndRange) {
  const GnnModel m = random_model(1);
  const BipartiteGraph g = to_bipartite(testing::small_bin_packing());
  const auto y = forward(m, g, std::vector<double>(12, 0.0));
  ASSERT_EQ(y.size(), 12U);
  for (double p : y) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
  EXPECT_THROW(forward(m, g, std::vector<double>(11, 0.0)), std::invalid_argument);
}

TEST(Gnn, EquivariantUnderRandomRelabelling) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const GnnModel m = random_model(100 + t);
    const BipartiteGraph g = to_bipartite(testing::random_small_instance(rng, 7, 5));
    const Permutation pi = random_permutation(rng, g.num_vars());
    const Permutation sigma = random_permutation(rng, g.num_cons());
    const auto z = augment(Scheme::kUniform, nullptr, nullptr, g.num_vars(), rng.next()).z;
    const auto base = forward(m, g, z);
    const auto moved = forward(m, permute(g, pi, sigma), permute_vector(pi, z));
    const auto expect = permute_vector(pi, base);
    for (int j = 0; j < g.num_vars(); ++j) EXPECT_NEAR(moved[j], expect[j], 1e-5);
  }
}

TEST(Gnn, OrbitMembersTieWithoutAugmentation) {
  const BipartiteGraph g = to_bipartite(testing::two_way_tie());
  for (int s = 0; s < 30; ++s) {
    const auto y = forward(random_model(s), g, std::vector<double>(3, 0.0));
    EXPECT_NEAR(y[0], y[1], 1e-6);
  }
}

TEST(Gnn, ZeroParametersGiveConstantOutput) {
  GnnModel m;
  m.params()[m.layout().head_b2.offset] = 0.3;
  const BipartiteGraph g = to_bipartite(testing::small_bin_packing());
  const auto y = forward(m, g, augment(Scheme::kPosition, nullptr, nullptr, 12, 1).z);
  for (double p : y) EXPECT_DOUBLE_EQ(p, 1.0 / (1.0 + std::exp(-0.3)));
}

TEST(Gnn, LossProperties) {
  const std::vector<double> label = {0, 1, 1, 0, 1};
  std::vector<double> exact = {kProbClamp, 1 - kProbClamp, 1 - kProbClamp, kProbClamp, 1 - kProbClamp};
  EXPECT_LT(bce_loss(label, label), 1e-6);
  EXPECT_LT(bce_loss(exact, label), 1e-6);
  EXPECT_NEAR(bce_loss(std::vector<double>(5, 0.5), label), std::log(2.0), 1e-15);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> p(5);
    for (double& v : p) v = rng.uniform01();
    const Permutation pi = random_permutation(rng, 5);
    EXPECT_GE(bce_loss(p, label), 0.0);
    EXPECT_NEAR(bce_loss(permute_vector(pi, p), permute_vector(pi, label)), bce_loss(p, label),
                1e-15);
  }
  EXPECT_THROW(bce_loss(std::vector<double>{0.5}, label), std::invalid_argument);
}

// Central differences with step 1e-4.
TEST(Gnn, GradientMatchesFiniteDifferences) {
  GnnModel m = random_model(7);
  const BipartiteGraph g = to_bipartite(four_var_instance());
  const std::vector<double> z = {0.3, 0.9, 0.1, 0.6};
  const std::vector<double> label = {1, 0, 0, 1};
  std::vector<double> grad(m.num_params(), 0.0);
  ForwardCache fc;
  accumulate_gradient(m, g, z, label, 1.0, grad, fc);
  const double h = 1e-4;
  int checked = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < m.num_params(); ++k) {
    if (std::abs(grad[k]) <= 1e-8) continue;
    const double orig = m.params()[k];
    m.params()[k] = orig + h;
    const double up = bce_loss(forward(m, g, z), label);
    m.params()[k] = orig - h;
    const double down = bce_loss(forward(m, g, z), label);
    m.params()[k] = orig;
    const double fd = (up - down) / (2 * h);
    const double rel = std::abs(fd - grad[k]) / std::max(std::abs(fd), std::abs(grad[k]));
    worst = std::max(worst, rel);
    ++checked;
  }
  EXPECT_GT(checked, 100);
  EXPECT_LT(worst, 1e-4);
}

TEST(Gnn, GradientIsLinearInSamples) {
  const GnnModel m = random_model(8);
  const BipartiteGraph g = to_bipartite(four_var_instance());
  const std::vector<double> z = {0.3, 0.9, 0.1, 0.6};
  const std::vector<double> label = {1, 0, 0, 1};
  std::vector<double> once(m.num_params(), 0.0), twice(m.num_params(), 0.0);
  ForwardCache fc;
  accumulate_gradient(m, g, z, label, 1.0, once, fc);
  accumulate_gradient(m, g, z, label, 1.0, twice, fc);
  accumulate_gradient(m, g, z, label, 1.0, twice, fc);
  for (std::size_t k = 0; k < once.size(); ++k) EXPECT_DOUBLE_EQ(twice[k], 2 * once[k]);
}

TEST(Gnn, StationaryAtHalfLabels) {
  GnnModel m;  // all-zero parameters predict 0.5 everywhere
  const BipartiteGraph g = to_bipartite(four_var_instance());
  std::vector<double> grad(m.num_params(), 0.0);
  ForwardCache fc;
  accumulate_gradient(m, g, {0.1, 0.2, 0.3, 0.4}, std::vector<double>(4, 0.5), 1.0, grad, fc);
  for (double v : grad) EXPECT_EQ(v, 0.0);
}

TEST(Gnn, ScalerHandlesConstantFeatures) {
  const BipartiteGraph g = to_bipartite(testing::two_way_tie());
  const std::vector<double> z(3, 0.0);
  const BipartiteGraph* graphs[] = {&g};
  const std::vector<double>* zs[] = {&z};
  const FeatureScaler sc = FeatureScaler::fit(graphs, zs);
  EXPECT_EQ(sc.z_std, 1.0);
  EXPECT_EQ(sc.z_mean, 0.0);
  EXPECT_NEAR(sc.c_mean, 1.0 / 3.0, 1e-15);
  const FeatureScaler back = FeatureScaler::from_json(sc.to_json());
  EXPECT_EQ(back.c_std, sc.c_std);
  EXPECT_EQ(back.b_mean, sc.b_mean);
}

TEST(Gnn, CheckpointRoundTrip) {
  GnnModel m = random_model(9);
  m.scaler().c_mean = 0.25;
  std::stringstream ss;
  write_checkpoint_binary(ss, m, 1234);
  GnnModel back;
  back.scaler() = m.scaler();
  EXPECT_EQ(read_checkpoint_binary(ss, back), 1234U);
  EXPECT_EQ(back.params(), m.params());
  EXPECT_EQ(back.scaler().c_mean, 0.25);

  std::stringstream bad("NOTACHECKPOINT");
  EXPECT_THROW(read_checkpoint_binary(bad, back), ParseError);
  std::stringstream whole;
  write_checkpoint_binary(whole, m, 1);
  std::stringstream truncated(whole.str().substr(0, 40));
  EXPECT_THROW(read_checkpoint_binary(truncated, back), ParseError);
}

}  // namespace
}  // namespace symaug
