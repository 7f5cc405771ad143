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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "symaug/augmentation.hpp"
#include "symaug/bipartite.hpp"
#include "symaug/symmetry.hpp"
#include "symaug/train.hpp"

namespace symaug {
namespace {

struct TieSetup {
  IlpInstance inst = testing::two_way_tie();
  DetectionResult det = detect_symmetry(inst);
  std::shared_ptr<const BipartiteGraph> graph =
      std::make_shared<const BipartiteGraph>(to_bipartite(inst));
  std::vector<double> label = {0, 1, 0};
  std::vector<SymmetricLabelAligner> aligners;

  TieSetup() { aligners.emplace_back(inst, det, label); }

  std::vector<TrainingSample> samples(Scheme s, int count) const {
    std::vector<TrainingSample> out;
    for (int k = 0; k < count; ++k) {
      out.push_back({graph, augment(s, &det.orbits, &det.blocks, 3, 1000 + k), label, 0, k});
    }
    return out;
  }
};

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam opt(3, {.lr = 0.1});
  std::vector<double> p = {1.0, 1.0, 1.0};
  opt.step(p, {2.0, -0.5, 0.0});
  EXPECT_NEAR(p[0], 0.9, 1e-7);
  EXPECT_NEAR(p[1], 1.1, 1e-7);
  EXPECT_EQ(p[2], 1.0);
  EXPECT_EQ(opt.steps(), 1);
}

// Without augmentation x1 and x2 always get the same prediction while the
// label separates them, so the loss cannot approach zero.
TEST(Train, NoAugPlateausAboveZero) {
  const TieSetup s;
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.adam.lr = 1e-2;
  const TrainResult res = train(s.samples(Scheme::kNoAug, 8), {}, s.aligners, cfg);
  // Best case predicts (0.5, 0.5, 0): loss 2 ln 2 / 3.
  EXPECT_GT(res.curve.back().train_loss, 2.0 * std::log(2.0) / 3.0 - 1e-3);
  EXPECT_GT(res.best_val_loss, 0.4);
}

TEST(Train, OrbitLearnsTheTie) {
  const TieSetup s;
  TrainConfig cfg;
  cfg.epochs = 500;  // one batch per epoch: 500 steps
  cfg.adam.lr = 1e-2;
  auto samples = s.samples(Scheme::kOrbit, 8);
  const TrainResult res = train(samples, {}, s.aligners, cfg);
  align_training_labels(samples, s.aligners, res.model);
  ForwardCache fc;
  for (const TrainingSample& t : samples) {
    forward(res.model, *t.graph, t.z.z, fc);
    EXPECT_LT(bce_loss(fc.pred, t.label), 0.05);
  }
}

TEST(Train, ZeroLearningRateKeepsInitialParameters) {
  const TieSetup s;
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.adam.lr = 0.0;
  const TrainResult res = train(s.samples(Scheme::kOrbit, 1), {}, s.aligners, cfg);
  GnnModel init(cfg.hidden);
  init.init(derive_seed(cfg.seed, SeedPurpose::kInit));
  EXPECT_EQ(res.model.params(), init.params());
}

TEST(Train, DeterministicGivenSeed) {
  const TieSetup s;
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 5;
  const auto a = train(s.samples(Scheme::kPosition, 8), s.samples(Scheme::kPosition, 2), s.aligners, cfg);
  const auto b = train(s.samples(Scheme::kPosition, 8), s.samples(Scheme::kPosition, 2), s.aligners, cfg);
  EXPECT_EQ(a.model.params(), b.model.params());
  cfg.seed = 6;
  const auto c = train(s.samples(Scheme::kPosition, 8), s.samples(Scheme::kPosition, 2), s.aligners, cfg);
  EXPECT_NE(a.model.params(), c.model.params());
}

TEST(Train, KeepsLowestValidationLoss) {
  const TieSetup s;
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.adam.lr = 3e-2;
  auto val = s.samples(Scheme::kOrbit, 3);
  const TrainResult res = train(s.samples(Scheme::kOrbit, 8), val, s.aligners, cfg);
  double best = res.curve.front().val_loss;
  int best_epoch = 1;
  for (const auto& em : res.curve) {
    if (em.val_loss < best) {
      best = em.val_loss;
      best_epoch = em.epoch;
    }
  }
  EXPECT_EQ(res.best_val_loss, best);
  EXPECT_EQ(res.best_epoch, best_epoch);
  EXPECT_EQ(dataset_loss(res.model, val, &s.aligners), best);
}

TEST(Train, RejectsEmptyDataset) {
  const TieSetup s;
  EXPECT_THROW(train({}, {}, s.aligners, TrainConfig{}), std::invalid_argument);
}

}  // namespace
}  // namespace symaug
