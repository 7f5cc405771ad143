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

#ifndef SYMAUG_TRAIN_HPP_
#define SYMAUG_TRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "symaug/gnn.hpp"
#include "symaug/metrics.hpp"
#include "symaug/rng.hpp"

namespace symaug {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t size, AdamConfig cfg) : cfg_(cfg), m_(size, 0.0), v_(size, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * grad[k];
      v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * grad[k] * grad[k];
      params[k] -= cfg_.lr * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + cfg_.eps);
    }
  }

  std::int64_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 8;
  AdamConfig adam;
  int hidden = 32;
  std::uint64_t seed = 0;
  bool align = true;  // re-align labels to the model once per epoch
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  int relabeled = 0;
};

struct TrainResult {
  GnnModel model;  // parameters at the lowest validation loss
  std::vector<EpochMetrics> curve;
  int best_epoch = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  bool any_inexact_alignment = false;
};

/// Mean per-sample loss; labels are aligned to the model first when an
/// aligner table is given.
inline double dataset_loss(const GnnModel& model, std::vector<TrainingSample>& samples,
                           const std::vector<SymmetricLabelAligner>* aligners) {
  if (samples.empty()) return 0.0;
  if (aligners != nullptr) align_training_labels(samples, *aligners, model);
  ForwardCache fc;
  double total = 0.0;
  for (const TrainingSample& s : samples) {
    forward(model, *s.graph, s.z.z, fc);
    total += bce_loss(fc.pred, s.label);
  }
  return total / static_cast<double>(samples.size());
}

/// Mini-batch Adam. `aligners` is indexed by TrainingSample::instance_id and
/// may be empty when cfg.align is false. The feature scaler is fitted on the
/// training samples. With no validation samples the training loss selects
/// the retained parameters.
inline TrainResult train(std::vector<TrainingSample> train_set, std::vector<TrainingSample> val_set,
                         const std::vector<SymmetricLabelAligner>& aligners,
                         const TrainConfig& cfg,
                         const std::function<void(const EpochMetrics&)>& on_epoch = {}) {
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch size must be positive");
  const auto* align_table = cfg.align ? &aligners : nullptr;

  GnnModel model(cfg.hidden);
  model.init(derive_seed(cfg.seed, SeedPurpose::kInit));
  {
    std::vector<const BipartiteGraph*> graphs;
    std::vector<const std::vector<double>*> zs;
    for (const auto& s : train_set) {
      graphs.push_back(s.graph.get());
      zs.push_back(&s.z.z);
    }
    model.scaler() = FeatureScaler::fit(graphs, zs);
  }

  TrainResult result{model, {}, 0, std::numeric_limits<double>::infinity(), false};
  Adam opt(model.num_params(), cfg.adam);
  std::vector<double> grad(model.num_params());
  std::vector<std::size_t> order(train_set.size());
  ForwardCache fc;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochMetrics em;
    em.epoch = epoch;
    if (align_table != nullptr) {
      const AlignStats st = align_training_labels(train_set, *align_table, model);
      em.relabeled = st.changed;
      if (st.inexact > 0) result.any_inexact_alignment = true;
    }
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    Rng shuffle_rng(derive_seed(cfg.seed, SeedPurpose::kShuffle, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const TrainingSample& s = train_set[order[b]];
        loss_sum += accumulate_gradient(model, *s.graph, s.z.z, s.label, weight, grad, fc);
      }
      opt.step(model.params(), grad);
    }
    em.train_loss = loss_sum / static_cast<double>(train_set.size());
    em.val_loss = val_set.empty() ? dataset_loss(model, train_set, nullptr)
                                  : dataset_loss(model, val_set, align_table);
    if (em.val_loss < result.best_val_loss) {
      result.best_val_loss = em.val_loss;
      result.best_epoch = epoch;
      result.model = model;
    }
    result.curve.push_back(em);
    if (on_epoch) on_epoch(em);
  }
  if (cfg.epochs == 0) result.model = model;
  return result;
}

}  // namespace symaug

#endif  // SYMAUG_TRAIN_HPP_
