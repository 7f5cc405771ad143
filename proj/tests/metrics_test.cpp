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


#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "symaug/bipartite.hpp"
#include "symaug/datagen.hpp"
#include "symaug/metrics.hpp"
#include "symaug/symmetry.hpp"

namespace symaug {
namespace {

std::vector<double> as_double(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

std::vector<double> random_pred(Rng& rng, int n) {
  std::vector<double> p(n);
  for (double& v : p) v = rng.uniform01();
  return p;
}

// min over all group elements of ||pred - g(y)||_1.
double group_min_distance(const DetectionResult& det, int n, const std::vector<double>& y,
                          const std::vector<double>& pred) {
  const auto group = enumerate_group(det.gens, n, 1'000'000);
  EXPECT_TRUE(group.has_value());
  double best = l1_distance(y, pred);
  for (const Permutation& g : *group) best = std::min(best, l1_distance(permute_vector(g, y), pred));
  return best;
}

TEST(Metrics, AlignsTwoWayTie) {
  const IlpInstance inst = testing::two_way_tie();
  const DetectionResult det = detect_symmetry(inst);
  const std::vector<double> y = {0, 1, 0};
  const AlignResult r = closest_symmetric_label(inst, det, y, std::vector<double>{0.9, 0.1, 0.2});
  EXPECT_EQ(r.label, (std::vector<double>{1, 0, 0}));
  EXPECT_TRUE(r.exact);
}

TEST(Metrics, TrivialGroupKeepsLabel) {
  const std::vector<Row> rows = {{Sense::kLessEqual, 1.0, {{0, 1.0}, {1, 1.0}}}};
  const IlpInstance inst = IlpInstance::from_rows({1.0, 2.0}, rows);
  const DetectionResult det = detect_symmetry(inst);
  const SymmetricLabelAligner al(inst, det, std::vector<double>{1, 0});
  EXPECT_EQ(al.mode(), SymmetricLabelAligner::Mode::kTrivial);
  EXPECT_EQ(al.align(std::vector<double>{1, 0}, std::vector<double>{0.0, 1.0}).label,
            (std::vector<double>{1, 0}));
}

// The column assignment agrees with trying all 3! column orders.
TEST(Metrics, BlockAssignmentMatchesExhaustiveSearch) {
  const IlpInstance inst = testing::small_bin_packing();
  const DetectionResult det = detect_symmetry(inst);
  const auto y = as_double(solve_exact(inst).values);
  const SymmetricLabelAligner al(inst, det, y);
  ASSERT_EQ(al.mode(), SymmetricLabelAligner::Mode::kBlockAssignment);
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto pred = random_pred(rng, 12);
    std::vector<int> cols = {0, 1, 2};
    double best = l1_distance(y, pred);
    do {
      std::vector<double> img(12);
      for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < 3; ++k) img[3 * r + k] = y[3 * r + cols[k]];
      }
      best = std::min(best, l1_distance(img, pred));
    } while (std::next_permutation(cols.begin(), cols.end()));
    const AlignResult r = al.align(y, pred);
    EXPECT_NEAR(l1_distance(r.label, pred), best, 1e-12);
    EXPECT_EQ(evaluate(inst, std::vector<std::int64_t>(r.label.begin(), r.label.end())).violation, 0.0);
  }
}

TEST(Metrics, LabelOrbitModeIsExactOnDuplicateSizes) {
  const IlpInstance inst = make_bpp_instance({3, 3, 4, 4, 5}, 5, 9);
  const DetectionResult det = detect_symmetry(inst);
  const auto y = as_double(solve_exact(inst).values);
  const SymmetricLabelAligner al(inst, det, y);
  ASSERT_EQ(al.mode(), SymmetricLabelAligner::Mode::kLabelOrbit);
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto pred = random_pred(rng, inst.num_vars());
    const AlignResult r = al.align(y, pred);
    EXPECT_TRUE(r.exact);
    EXPECT_NEAR(l1_distance(r.label, pred), group_min_distance(det, inst.num_vars(), y, pred), 1e-12);
  }
}

TEST(Metrics, GreedyFallbackOnPartialDetection) {
  const IlpInstance inst = make_bpp_instance({3, 4, 5, 6}, 4, 9);
  DetectionResult det = detect_symmetry(inst);
  det.partial = true;
  const auto y = as_double(solve_exact(inst).values);
  const SymmetricLabelAligner al(inst, det, y);
  ASSERT_EQ(al.mode(), SymmetricLabelAligner::Mode::kGreedy);
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const auto pred = random_pred(rng, inst.num_vars());
    const AlignResult r = al.align(y, pred);
    EXPECT_FALSE(r.exact);
    EXPECT_LE(l1_distance(r.label, pred), l1_distance(y, pred) + 1e-12);
    const Evaluation ev = evaluate(inst, std::vector<std::int64_t>(r.label.begin(), r.label.end()));
    EXPECT_EQ(ev.violation, 0.0);
    EXPECT_EQ(ev.objective, solve_exact(inst).objective);
  }
}

TEST(Metrics, AlignmentIsIdempotentAndKeepsTies) {
  const IlpInstance inst = testing::small_bin_packing();
  const DetectionResult det = detect_symmetry(inst);
  const auto y = as_double(solve_exact(inst).values);
  const SymmetricLabelAligner al(inst, det, y);
  // Constant predictions make every image equidistant.
  EXPECT_EQ(al.align(y, std::vector<double>(12, 0.5)).label, y);
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto pred = random_pred(rng, 12);
    const auto once = al.align(y, pred).label;
    EXPECT_EQ(al.align(once, pred).label, once);
    EXPECT_LE(bce_loss(pred, once), bce_loss(pred, y) + 1e-9);
  }
}

// With predictions consistent under the swap, alignment repairs the
// conflicting second label.
TEST(Metrics, AlignmentRepairsConflictPair) {
  const IlpInstance second = testing::conflict_second();
  const DetectionResult det = detect_symmetry(second);
  const Permutation pi(std::vector<int>{2, 1, 0});
  const std::vector<double> x = {0, 1, 0}, x2 = {0, 0, 1};
  const std::vector<double> pred_first = {0.1, 0.8, 0.2};
  EXPECT_NE(permute_vector(pi, x), x2);
  const auto aligned = closest_symmetric_label(second, det, x2, permute_vector(pi, pred_first)).label;
  EXPECT_EQ(permute_vector(pi, x), aligned);
}

TEST(Metrics, TopMCount) {
  EXPECT_EQ(top_m_count(10, 30), 3);
  EXPECT_EQ(top_m_count(42, 50), 21);
  EXPECT_EQ(top_m_count(42, 100), 42);
  EXPECT_THROW(top_m_count(10, 0), std::invalid_argument);
  EXPECT_THROW(top_m_count(10, 100.5), std::invalid_argument);
}

TEST(Metrics, TopMErrorIsL1OverConfidentSet) {
  const std::vector<double> pred = {0.9, 0.4, 0.55, 0.02, 0.7};
  const std::vector<double> y = {0, 0, 0, 1, 1};
  // Most confident first: 3, 0, 4, 1, 2.
  EXPECT_EQ(top_m_error(pred, y, 20), 1.0);   // {3}
  EXPECT_EQ(top_m_error(pred, y, 40), 2.0);   // {3, 0}
  EXPECT_EQ(top_m_error(pred, y, 60), 2.0);   // + 4
  EXPECT_EQ(top_m_error(pred, y, 80), 2.0);   // + 1
  EXPECT_EQ(top_m_error(pred, y, 100), 3.0);  // + 2, Round(0.55) = 1
  // Ties in confidence go to the lower index; Round(0.5) = 1.
  EXPECT_EQ(top_m_error(std::vector<double>{0.5, 0.5}, std::vector<double>{0, 1}, 50), 1.0);
  EXPECT_EQ(top_m_error(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0}, 50), 0.0);
}

TEST(Metrics, TopMErrorMonotoneAndZeroOnExactRounding) {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const auto pred = random_pred(rng, 12);
    std::vector<double> y(12);
    for (double& v : y) v = static_cast<double>(rng.uniform_index(2));
    double prev = 0.0;
    for (int m = 1; m <= 100; ++m) {
      const double e = top_m_error(pred, y, m);
      EXPECT_GE(e, prev);
      prev = e;
    }
    std::vector<double> rounded_y(12);
    for (int j = 0; j < 12; ++j) rounded_y[j] = rounded(pred[j]);
    for (int m : kTopMPercents) EXPECT_EQ(top_m_error(pred, rounded_y, m), 0.0);
  }
}

TEST(Metrics, ConstraintViolationRoundsFirst) {
  const IlpInstance inst = testing::two_way_tie();
  EXPECT_EQ(constraint_violation(inst, std::vector<double>{0.2, 0.3, 0.1}), 1.0);
  EXPECT_EQ(constraint_violation(inst, std::vector<double>{0.2, 0.7, 0.1}), 0.0);
  EXPECT_EQ(constraint_violation(inst, std::vector<double>{0.8, 0.7, 0.1}), 1.0);
}

TEST(Metrics, EvaluatePredictionReport) {
  const IlpInstance inst = testing::small_bin_packing();
  const DetectionResult det = detect_symmetry(inst);
  const auto y = as_double(solve_exact(inst).values);
  const SymmetricLabelAligner al(inst, det, y);
  Rng rng(10);
  const auto pred = random_pred(rng, 12);
  const InstanceEval ev = evaluate_prediction(inst, al, y, pred);
  for (std::size_t k = 0; k + 1 < ev.top_m.size(); ++k) EXPECT_LE(ev.top_m[k], ev.top_m[k + 1]);
  EXPECT_GE(ev.top_m[0], 0.0);
  EXPECT_EQ(ev.aligned_label, al.align(y, pred).label);
  EXPECT_TRUE(ev.exact_alignment);
}

TEST(Metrics, AlignTrainingLabelsWithConstantModel) {
  const IlpInstance inst = testing::small_bin_packing();
  const DetectionResult det = detect_symmetry(inst);
  const auto y = as_double(solve_exact(inst).values);
  std::vector<SymmetricLabelAligner> aligners;
  aligners.emplace_back(inst, det, y);
  auto graph = std::make_shared<const BipartiteGraph>(to_bipartite(inst));
  std::vector<TrainingSample> samples;
  for (int s = 0; s < 3; ++s) {
    samples.push_back({graph, augment(Scheme::kOrbit, &det.orbits, &det.blocks, 12, s), y, 0, s});
  }
  const GnnModel zero;  // predicts 0.5 everywhere
  const AlignStats st = align_training_labels(samples, aligners, zero);
  EXPECT_EQ(st.changed, 0);
  for (const auto& s : samples) EXPECT_EQ(s.label, y);
}

}  // namespace
}  // namespace symaug
