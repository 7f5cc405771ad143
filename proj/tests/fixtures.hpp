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


// Small instances shared by the unit and acceptance tests.

#ifndef SYMAUG_TESTS_FIXTURES_HPP_
#define SYMAUG_TESTS_FIXTURES_HPP_

#include <vector>

#include "symaug/datagen.hpp"
#include "symaug/ilp_model.hpp"
#include "symaug/rng.hpp"

namespace symaug::testing {

// min x3  s.t.  x1 + x2 + x3 = 1, binary. x1 and x2 are interchangeable.
inline IlpInstance two_way_tie() {
  const std::vector<Row> rows = {{Sense::kEqual, 1.0, {{0, 1.0}, {1, 1.0}, {2, 1.0}}}};
  return IlpInstance::from_rows({0.0, 0.0, 1.0}, rows);
}

// The isomorphic pair: min x1 + x2 + 3x3 s.t. x1 + x2 = 1, and
// min 3x1 + x2 + x3 s.t. x2 + x3 = 1.
inline IlpInstance conflict_first() {
  const std::vector<Row> rows = {{Sense::kEqual, 1.0, {{0, 1.0}, {1, 1.0}}}};
  return IlpInstance::from_rows({1.0, 1.0, 3.0}, rows);
}
inline IlpInstance conflict_second() {
  const std::vector<Row> rows = {{Sense::kEqual, 1.0, {{1, 1.0}, {2, 1.0}}}};
  return IlpInstance::from_rows({3.0, 1.0, 1.0}, rows);
}

// Items of sizes 1, 3, 5, three bins of capacity 5.
inline IlpInstance small_bin_packing() { return make_bpp_instance({1, 3, 5}, 3, 5); }

// Random binary ILP with small integer data so that symmetries are common.
// Rows are all <= so the normalized row count equals `m`.
inline IlpInstance random_small_instance(Rng& rng, int n, int m) {
  std::vector<double> obj(n);
  for (double& c : obj) c = static_cast<double>(rng.uniform_index(2));
  std::vector<Row> rows;
  for (int i = 0; i < m; ++i) {
    Row r{Sense::kLessEqual, static_cast<double>(rng.uniform_index(3)), {}};
    for (int j = 0; j < n; ++j) {
      const int v = static_cast<int>(rng.uniform_index(4)) - 1;  // -1, 0, 1, 2
      if (v != 0 && rng.uniform_index(3) != 0) r.terms.push_back({j, static_cast<double>(v)});
    }
    rows.push_back(std::move(r));
  }
  return IlpInstance::from_rows(std::move(obj), rows);
}

// Every binary vector of length n, as int64 values.
inline std::vector<std::vector<std::int64_t>> all_binary(int n) {
  std::vector<std::vector<std::int64_t>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::int64_t> x(n);
    for (int j = 0; j < n; ++j) x[j] = static_cast<std::int64_t>((mask >> j) & 1U);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace symaug::testing

#endif  // SYMAUG_TESTS_FIXTURES_HPP_
