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

#ifndef SYMAUG_AUGMENTATION_HPP_
#define SYMAUG_AUGMENTATION_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "symaug/rng.hpp"
#include "symaug/symmetry.hpp"

namespace symaug {

enum class Scheme { kNoAug, kUniform, kPosition, kOrbit, kOrbitPlus };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kNoAug:
      return "noaug";
    case Scheme::kUniform:
      return "uniform";
    case Scheme::kPosition:
      return "position";
    case Scheme::kOrbit:
      return "orbit";
    case Scheme::kOrbitPlus:
      return "orbitplus";
  }
  return "unknown";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "noaug") return Scheme::kNoAug;
  if (s == "uniform") return Scheme::kUniform;
  if (s == "position") return Scheme::kPosition;
  if (s == "orbit") return Scheme::kOrbit;
  if (s == "orbitplus" || s == "orbit+") return Scheme::kOrbitPlus;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

inline bool uses_orbits(Scheme s) { return s == Scheme::kOrbit || s == Scheme::kOrbitPlus; }

/// The extra per-variable input channel z.
struct AugmentedFeature {
  std::vector<double> z;
  Scheme scheme = Scheme::kNoAug;
  std::uint64_t seed = 0;
};

namespace detail {

// The values 1..count in the order they come out of an urn drawn without
// replacement; the k-th draw goes to the k-th member of the orbit.
inline std::vector<int> sample_without_replacement(std::size_t count, Rng& rng) {
  std::vector<int> pool(count);
  for (std::size_t k = 0; k < count; ++k) pool[k] = static_cast<int>(k + 1);
  std::vector<int> drawn;
  drawn.reserve(count);
  while (!pool.empty()) {
    const std::size_t pick = rng.uniform_index(pool.size());
    drawn.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return drawn;
}

}  // namespace detail

/// Draws z for the given scheme.
///
///   NoAug     z = 0
///   Uniform   z_i ~ U(0, 1) i.i.d.
///   Position  z is a uniformly random permutation of 1..n
///   Orbit     each nontrivial orbit gets 1..|O| without replacement, fixed
///             points get 0
///   OrbitPlus one draw per linked block, copied down the block's columns
///
/// `orbits` and `blocks` may be null for the first three schemes.
inline AugmentedFeature augment(Scheme scheme, const OrbitPartition* orbits,
                                const LinkedOrbitBlocks* blocks, int n, std::uint64_t seed) {
  AugmentedFeature out;
  out.scheme = scheme;
  out.seed = seed;
  out.z.assign(n, 0.0);
  Rng rng(seed);
  switch (scheme) {
    case Scheme::kNoAug:
      break;
    case Scheme::kUniform:
      for (double& v : out.z) v = rng.uniform01();
      break;
    case Scheme::kPosition: {
      const auto ids = detail::sample_without_replacement(n, rng);
      for (int i = 0; i < n; ++i) out.z[i] = ids[i];
      break;
    }
    case Scheme::kOrbit: {
      if (orbits == nullptr) throw std::invalid_argument("augment: orbit scheme needs orbits");
      if (orbits->num_vars() != n) throw std::invalid_argument("augment: orbit size mismatch");
      for (const auto& orbit : orbits->orbits) {
        if (orbit.size() < 2) continue;
        const auto ids = detail::sample_without_replacement(orbit.size(), rng);
        for (std::size_t k = 0; k < orbit.size(); ++k) out.z[orbit[k]] = ids[k];
      }
      break;
    }
    case Scheme::kOrbitPlus: {
      if (orbits == nullptr || blocks == nullptr) {
        throw std::invalid_argument("augment: orbitplus scheme needs orbits and blocks");
      }
      if (orbits->num_vars() != n) throw std::invalid_argument("augment: orbit size mismatch");
      for (const LinkedBlock& blk : blocks->blocks) {
        const int c = blk.cardinality();
        if (c < 2) continue;
        const auto ids = detail::sample_without_replacement(c, rng);
        for (const auto& row : blk.alignment) {
          for (int k = 0; k < c; ++k) out.z[row[k]] = ids[k];
        }
      }
      break;
    }
  }
  return out;
}

/// ln |V| of the scheme's feature space; +inf for Uniform.
inline double space_cardinality_log(Scheme scheme, const OrbitPartition* orbits,
                                    const LinkedOrbitBlocks* blocks, int n) {
  auto log_factorial = [](std::size_t k) { return std::lgamma(static_cast<double>(k) + 1.0); };
  switch (scheme) {
    case Scheme::kNoAug:
      return 0.0;
    case Scheme::kUniform:
      return std::numeric_limits<double>::infinity();
    case Scheme::kPosition:
      return log_factorial(n);
    case Scheme::kOrbit: {
      if (orbits == nullptr) throw std::invalid_argument("space_cardinality_log: needs orbits");
      double s = 0.0;
      for (const auto& o : orbits->orbits) s += log_factorial(o.size());
      return s;
    }
    case Scheme::kOrbitPlus: {
      if (blocks == nullptr) throw std::invalid_argument("space_cardinality_log: needs blocks");
      double s = 0.0;
      for (const auto& b : blocks->blocks) s += log_factorial(b.cardinality());
      return s;
    }
  }
  return 0.0;
}

/// True iff z takes pairwise distinct values inside every nontrivial orbit.
inline bool check_distinguishability(const std::vector<double>& z, const OrbitPartition& orbits) {
  if (static_cast<int>(z.size()) != orbits.num_vars()) {
    throw std::invalid_argument("check_distinguishability: size mismatch");
  }
  for (const auto& orbit : orbits.orbits) {
    if (orbit.size() < 2) continue;
    std::set<double> values;
    for (int i : orbit) {
      if (!values.insert(z[i]).second) return false;
    }
  }
  return true;
}

inline nlohmann::json augmentation_to_json(const AugmentedFeature& a) {
  return {{"scheme", to_string(a.scheme)}, {"seed", a.seed}, {"z", a.z}};
}

inline AugmentedFeature augmentation_from_json(const nlohmann::json& j) {
  AugmentedFeature a;
  a.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  a.seed = j.at("seed").get<std::uint64_t>();
  a.z = j.at("z").get<std::vector<double>>();
  return a;
}

}  // namespace symaug

#endif  // SYMAUG_AUGMENTATION_HPP_
