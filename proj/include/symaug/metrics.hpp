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

// Symmetry-aware evaluation.
//
// A label y is only defined up to the formulation symmetry group, so
// predictions are scored against the image pi(y) closest to the prediction in
// l1 distance. The aligner picks one of three exact strategies when it can
// and falls back to a greedy walk over generator words otherwise:
//
//   block assignment  the group is the direct product of the full symmetric
//                     groups on the columns of the linked blocks; each block
//                     is an independent min-cost column assignment
//   label orbit       the orbit of y under the group has at most
//                     `max_orbit_images` elements; scan them all
//   greedy            8 restarts of steepest descent over generator moves

#ifndef SYMAUG_METRICS_HPP_
#define SYMAUG_METRICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "symaug/gnn.hpp"
#include "symaug/hungarian.hpp"
#include "symaug/ilp_model.hpp"
#include "symaug/rng.hpp"
#include "symaug/symmetry.hpp"

namespace symaug {

inline constexpr std::array<int, 4> kTopMPercents = {30, 50, 70, 90};

struct AlignOptions {
  std::size_t max_orbit_images = 20000;
  int greedy_restarts = 8;
  std::uint64_t seed = 0x5eed;
};

struct AlignResult {
  std::vector<double> label;
  bool exact = true;
};

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

class SymmetricLabelAligner {
 public:
  enum class Mode { kTrivial, kBlockAssignment, kLabelOrbit, kGreedy };

  /// `reference` is any label of the instance; the label-orbit strategy
  /// enumerates its orbit once, and later calls must pass labels from that
  /// same orbit (which alignment preserves).
  SymmetricLabelAligner(const IlpInstance& inst, const DetectionResult& det,
                        std::span<const double> reference, AlignOptions opts = {})
      : n_(inst.num_vars()), opts_(opts) {
    for (const Generator& g : det.gens.generators) {
      if (!g.pi.is_identity()) {
        perms_.push_back(g.pi);
        inverses_.push_back(g.pi.inverse());
      }
    }
    if (perms_.empty()) {
      mode_ = Mode::kTrivial;
      return;
    }
    if (!det.partial && blocks_are_full_product(inst, det)) {
      mode_ = Mode::kBlockAssignment;
      blocks_ = det.blocks;
      return;
    }
    if (!det.partial && enumerate_orbit(reference)) {
      mode_ = Mode::kLabelOrbit;
      return;
    }
    mode_ = Mode::kGreedy;
  }

  Mode mode() const { return mode_; }
  bool exact() const { return mode_ != Mode::kGreedy; }
  std::size_t orbit_size() const { return images_.size() / std::max(1, n_); }

  /// The image of `label` closest to `pred` in l1. The input label is kept
  /// unless another image is strictly closer.
  AlignResult align(std::span<const double> label, std::span<const double> pred) const {
    if (static_cast<int>(label.size()) != n_ || static_cast<int>(pred.size()) != n_) {
      throw std::invalid_argument("align: size mismatch");
    }
    AlignResult res;
    res.label.assign(label.begin(), label.end());
    res.exact = exact();
    switch (mode_) {
      case Mode::kTrivial:
        break;
      case Mode::kBlockAssignment:
        align_blocks(res.label, pred);
        break;
      case Mode::kLabelOrbit:
        align_orbit(res.label, pred);
        break;
      case Mode::kGreedy:
        align_greedy(res.label, pred);
        break;
    }
    return res;
  }

 private:
  static constexpr double kImprove = 1e-12;

  // True when the group is exactly the product over blocks of the symmetric
  // group acting on the block's columns: every column transposition and
  // c-cycle is a symmetry, and the orders agree.
  static bool blocks_are_full_product(const IlpInstance& inst, const DetectionResult& det) {
    const int n = inst.num_vars();
    double log10_product = 0.0;
    bool any = false;
    for (const LinkedBlock& blk : det.blocks.blocks) {
      const int c = blk.cardinality();
      if (c < 2) continue;
      any = true;
      log10_product += std::lgamma(c + 1.0) / std::log(10.0);
      std::vector<int> swap_image(n), cycle_image(n);
      for (int j = 0; j < n; ++j) swap_image[j] = cycle_image[j] = j;
      for (const auto& row : blk.alignment) {
        swap_image[row[0]] = row[1];
        swap_image[row[1]] = row[0];
        for (int k = 0; k < c; ++k) cycle_image[row[k]] = row[(k + 1) % c];
      }
      if (!find_constraint_permutation(inst, Permutation(swap_image))) return false;
      if (!find_constraint_permutation(inst, Permutation(cycle_image))) return false;
    }
    return any && std::abs(log10_product - det.gens.log10_order) < 1e-9;
  }

  struct ImageHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const {
      std::uint64_t h = 1469598103934665603ULL;
      for (std::int32_t x : v) h = (h ^ static_cast<std::uint32_t>(x)) * 1099511628211ULL;
      return static_cast<std::size_t>(h);
    }
  };

  bool enumerate_orbit(std::span<const double> reference) {
    std::vector<std::int32_t> start(n_);
    for (int j = 0; j < n_; ++j) {
      const double r = std::round(reference[j]);
      if (r != reference[j]) return false;  // orbit strategy needs integer labels
      start[j] = static_cast<std::int32_t>(r);
    }
    std::unordered_map<std::vector<std::int32_t>, std::size_t, ImageHash> seen;
    std::vector<std::vector<std::int32_t>> queue{start};
    seen.emplace(start, 0);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const Permutation& p : perms_) {
        std::vector<std::int32_t> next(n_);
        for (int k = 0; k < n_; ++k) next[k] = queue[head][p(k)];
        if (seen.count(next)) continue;
        if (queue.size() >= opts_.max_orbit_images) return false;
        seen.emplace(next, queue.size());
        queue.push_back(std::move(next));
      }
    }
    images_.reserve(queue.size() * n_);
    for (const auto& img : queue) images_.insert(images_.end(), img.begin(), img.end());
    return true;
  }

  void align_blocks(std::vector<double>& label, std::span<const double> pred) const {
    const std::vector<double> y = label;
    for (const LinkedBlock& blk : blocks_.blocks) {
      const int c = blk.cardinality();
      if (c < 2) continue;
      // cost[j][k]: put label column k at position j.
      std::vector<std::vector<double>> cost(c, std::vector<double>(c, 0.0));
      for (const auto& row : blk.alignment) {
        for (int j = 0; j < c; ++j) {
          for (int k = 0; k < c; ++k) cost[j][k] += std::abs(pred[row[j]] - y[row[k]]);
        }
      }
      const std::vector<int> assign = solve_assignment(cost);
      double current = 0.0, best = 0.0;
      for (int j = 0; j < c; ++j) {
        current += cost[j][j];
        best += cost[j][assign[j]];
      }
      if (best < current - kImprove) {
        for (const auto& row : blk.alignment) {
          for (int j = 0; j < c; ++j) label[row[j]] = y[row[assign[j]]];
        }
      }
    }
  }

  void align_orbit(std::vector<double>& label, std::span<const double> pred) const {
    double best = l1_distance(label, pred);
    std::size_t best_image = images_.size();
    const std::size_t count = orbit_size();
    for (std::size_t i = 0; i < count; ++i) {
      const std::int32_t* img = images_.data() + i * n_;
      double d = 0.0;
      for (int k = 0; k < n_ && d < best; ++k) d += std::abs(pred[k] - img[k]);
      if (d < best - kImprove) {
        best = d;
        best_image = i;
      }
    }
    if (best_image < count) {
      const std::int32_t* img = images_.data() + best_image * n_;
      for (int k = 0; k < n_; ++k) label[k] = img[k];
    }
  }

  void align_greedy(std::vector<double>& label, std::span<const double> pred) const {
    const int depth = 3 * static_cast<int>(perms_.size());
    Rng rng(opts_.seed);
    std::vector<double> best = label;
    double best_cost = l1_distance(best, pred);
    auto apply = [](const Permutation& p, const std::vector<double>& y) {
      return permute_vector(p, y);
    };
    for (int r = 0; r < opts_.greedy_restarts; ++r) {
      std::vector<double> cur = label;
      if (r > 0) {
        for (int s = 0; s < depth; ++s) cur = apply(perms_[rng.uniform_index(perms_.size())], cur);
      }
      double cur_cost = l1_distance(cur, pred);
      for (int step = 0; step < depth; ++step) {
        double step_best = cur_cost;
        std::vector<double> step_label;
        for (std::size_t g = 0; g < perms_.size(); ++g) {
          for (const Permutation* p : {&perms_[g], &inverses_[g]}) {
            auto cand = apply(*p, cur);
            const double d = l1_distance(cand, pred);
            if (d < step_best - kImprove) {
              step_best = d;
              step_label = std::move(cand);
            }
          }
        }
        if (step_label.empty()) break;
        cur = std::move(step_label);
        cur_cost = step_best;
      }
      if (cur_cost < best_cost - kImprove) {
        best_cost = cur_cost;
        best = cur;
      }
    }
    label = std::move(best);
  }

  int n_ = 0;
  AlignOptions opts_;
  Mode mode_ = Mode::kTrivial;
  std::vector<Permutation> perms_;
  std::vector<Permutation> inverses_;
  LinkedOrbitBlocks blocks_;
  std::vector<std::int32_t> images_;  // row-major, n_ entries per image
};

/// One-shot version of the aligner.
inline AlignResult closest_symmetric_label(const IlpInstance& inst, const DetectionResult& det,
                                           std::span<const double> label,
                                           std::span<const double> pred, AlignOptions opts = {}) {
  return SymmetricLabelAligner(inst, det, label, opts).align(label, pred);
}

inline int rounded(double p) { return p >= 0.5 ? 1 : 0; }

/// Number of variables in the top-m% set: round(m * n / 100).
inline int top_m_count(int n, double m_percent) {
  if (!(m_percent > 0.0 && m_percent <= 100.0)) {
    throw std::invalid_argument("top_m_error: m must be in (0, 100]");
  }
  return static_cast<int>(std::lround(m_percent * n / 100.0));
}

/// Sum of |Round(pred_i) - aligned_i| over the round(m n / 100) variables whose
/// predictions are closest to their rounding; ties go to the lower index.
inline double top_m_error(std::span<const double> pred, std::span<const double> aligned,
                          double m_percent) {
  if (pred.size() != aligned.size()) throw std::invalid_argument("top_m_error: size mismatch");
  const int n = static_cast<int>(pred.size());
  const int count = top_m_count(n, m_percent);
  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(rounded(pred[a]) - pred[a]) < std::abs(rounded(pred[b]) - pred[b]);
  });
  double err = 0.0;
  for (int k = 0; k < count; ++k) {
    const int j = order[k];
    err += std::abs(rounded(pred[j]) - aligned[j]);
  }
  return err;
}

/// Violation of the rounded prediction (sum of positive parts of Ax - b).
inline double constraint_violation(const IlpInstance& inst, std::span<const double> pred) {
  std::vector<std::int64_t> x(pred.size());
  for (std::size_t j = 0; j < pred.size(); ++j) x[j] = static_cast<std::int64_t>(std::llround(pred[j]));
  return evaluate(inst, x).violation;
}

struct InstanceEval {
  std::array<double, kTopMPercents.size()> top_m{};
  double violation = 0.0;
  bool exact_alignment = true;
  std::vector<double> aligned_label;
};

inline InstanceEval evaluate_prediction(const IlpInstance& inst, const SymmetricLabelAligner& aligner,
                                        std::span<const double> label,
                                        std::span<const double> pred) {
  InstanceEval ev;
  AlignResult al = aligner.align(label, pred);
  for (std::size_t k = 0; k < kTopMPercents.size(); ++k) {
    ev.top_m[k] = top_m_error(pred, al.label, kTopMPercents[k]);
  }
  std::vector<double> rounded_pred(pred.size());
  for (std::size_t j = 0; j < pred.size(); ++j) rounded_pred[j] = rounded(pred[j]);
  ev.violation = constraint_violation(inst, rounded_pred);
  ev.exact_alignment = al.exact;
  ev.aligned_label = std::move(al.label);
  return ev;
}

struct AlignStats {
  int changed = 0;
  int inexact = 0;
};

/// Replaces every sample's label by its closest symmetric image under the
/// model's current predictions. `aligners[instance_id]` must cover the samples.
inline AlignStats align_training_labels(std::vector<TrainingSample>& samples,
                                        const std::vector<SymmetricLabelAligner>& aligners,
                                        const GnnModel& model) {
  AlignStats stats;
  ForwardCache fc;
  for (TrainingSample& s : samples) {
    forward(model, *s.graph, s.z.z, fc);
    AlignResult al = aligners.at(s.instance_id).align(s.label, fc.pred);
    if (al.label != s.label) ++stats.changed;
    if (!al.exact) ++stats.inexact;
    s.label = std::move(al.label);
  }
  return stats;
}

}  // namespace symaug

#endif  // SYMAUG_METRICS_HPP_
