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

// Bin-packing instances.
//
//   min  sum_j y_j
//   s.t. sum_j x_ij = 1                for every item i
//        sum_i s_i x_ij - C y_j <= 0   for every bin j
//        x, y binary
//
// Variable x_ij sits at index i * bins + j, followed by y_0 .. y_{bins-1}.

#ifndef SYMAUG_DATAGEN_HPP_
#define SYMAUG_DATAGEN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symaug/ilp_model.hpp"
#include "symaug/rng.hpp"

namespace symaug {

struct BppConfig {
  int num_items = 6;
  int num_bins = 6;
  int capacity = 9;
  int size_lo = 3;
  int size_hi = 7;
  std::uint64_t seed = 0;
  int count = 100;

  void validate() const {
    if (num_items < 1) throw std::invalid_argument("bpp: num_items must be >= 1");
    if (num_bins < 1) throw std::invalid_argument("bpp: num_bins must be >= 1");
    if (size_lo < 1) throw std::invalid_argument("bpp: size_range lo must be >= 1");
    if (size_hi < size_lo) throw std::invalid_argument("bpp: size_range hi < lo");
    if (size_hi > capacity) throw std::invalid_argument("bpp: size_range hi exceeds capacity");
    if (count < 0) throw std::invalid_argument("bpp: count must be >= 0");
  }
};

inline nlohmann::json bpp_config_to_json(const BppConfig& c) {
  return {{"num_items", c.num_items}, {"num_bins", c.num_bins},
          {"capacity", c.capacity},   {"size_range", {c.size_lo, c.size_hi}},
          {"seed", c.seed},           {"count", c.count}};
}

/// Fields missing from `j` keep the values already in `base`.
inline BppConfig bpp_config_from_json(const nlohmann::json& j, BppConfig base = {}) {
  base.num_items = j.value("num_items", base.num_items);
  base.num_bins = j.value("num_bins", base.num_bins);
  base.capacity = j.value("capacity", base.capacity);
  if (j.contains("size_range")) {
    base.size_lo = j.at("size_range").at(0).get<int>();
    base.size_hi = j.at("size_range").at(1).get<int>();
  }
  base.seed = j.value("seed", base.seed);
  base.count = j.value("count", base.count);
  return base;
}

inline int bpp_x_index(int item, int bin, int num_bins) { return item * num_bins + bin; }
inline int bpp_y_index(int bin, int num_items, int num_bins) {
  return num_items * num_bins + bin;
}

inline IlpInstance make_bpp_instance(const std::vector<int>& sizes, int num_bins, int capacity) {
  const int items = static_cast<int>(sizes.size());
  if (items < 1 || num_bins < 1) throw std::invalid_argument("bpp: empty instance");
  const int n = items * num_bins + num_bins;
  std::vector<double> obj(n, 0.0);
  for (int j = 0; j < num_bins; ++j) obj[bpp_y_index(j, items, num_bins)] = 1.0;
  std::vector<Row> rows;
  for (int i = 0; i < items; ++i) {
    Row r{Sense::kEqual, 1.0, {}};
    for (int j = 0; j < num_bins; ++j) r.terms.push_back({bpp_x_index(i, j, num_bins), 1.0});
    rows.push_back(std::move(r));
  }
  for (int j = 0; j < num_bins; ++j) {
    Row r{Sense::kLessEqual, 0.0, {}};
    for (int i = 0; i < items; ++i) {
      r.terms.push_back({bpp_x_index(i, j, num_bins), static_cast<double>(sizes[i])});
    }
    r.terms.push_back({bpp_y_index(j, items, num_bins), -static_cast<double>(capacity)});
    rows.push_back(std::move(r));
  }
  return IlpInstance::from_rows(std::move(obj), rows);
}

struct BppInstance {
  int index = 0;
  std::vector<int> sizes;
  IlpInstance instance;
  Solution solution;
};

inline std::vector<int> draw_bpp_sizes(const BppConfig& cfg, int index) {
  Rng rng(derive_seed(cfg.seed, SeedPurpose::kDatagen, static_cast<std::uint64_t>(index)));
  std::vector<int> sizes(cfg.num_items);
  const auto span = static_cast<std::uint64_t>(cfg.size_hi - cfg.size_lo + 1);
  for (int& s : sizes) s = cfg.size_lo + static_cast<int>(rng.uniform_index(span));
  return sizes;
}

struct GenStats {
  int skipped = 0;  // solver budget ran out before optimality was proven
};

/// Generates and solves cfg.count instances. Instance k uses sizes drawn from
/// its own derived seed, so the output does not depend on generation order.
inline std::vector<BppInstance> gen_bpp(const BppConfig& cfg, const SolveOptions& solve_opts = {},
                                        GenStats* stats = nullptr) {
  cfg.validate();
  std::vector<BppInstance> out;
  for (int k = 0; k < cfg.count; ++k) {
    BppInstance b;
    b.index = k;
    b.sizes = draw_bpp_sizes(cfg, k);
    b.instance = make_bpp_instance(b.sizes, cfg.num_bins, cfg.capacity);
    b.solution = solve_exact(b.instance, solve_opts);
    if (b.solution.status != SolveStatus::kOptimal) {
      std::cerr << "warning: bpp instance " << k << " not solved to optimality ("
                << to_string(b.solution.status) << "), skipped\n";
      if (stats != nullptr) ++stats->skipped;
      continue;
    }
    out.push_back(std::move(b));
  }
  return out;
}

/// Seeded shuffle of 0..count-1, the first round(train_frac * count) going to
/// training (at least one).
inline std::pair<std::vector<int>, std::vector<int>> split_dataset(int count, double train_frac,
                                                                   std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("split_dataset: empty dataset");
  if (!(train_frac > 0.0 && train_frac <= 1.0)) {
    throw std::invalid_argument("split_dataset: train_frac must be in (0, 1]");
  }
  std::vector<int> ids(count);
  for (int k = 0; k < count; ++k) ids[k] = k;
  Rng rng(derive_seed(seed, SeedPurpose::kSplit));
  rng.shuffle(ids);
  const int n_train = std::max(1, static_cast<int>(std::llround(train_frac * count)));
  if (n_train == count) {
    std::cerr << "warning: split_dataset leaves no validation instances\n";
  }
  std::vector<int> train(ids.begin(), ids.begin() + n_train);
  std::vector<int> val(ids.begin() + n_train, ids.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {train, val};
}

}  // namespace symaug

#endif  // SYMAUG_DATAGEN_HPP_
