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

// Formulation symmetries of an ILP.
//
// A pair (pi, sigma) of a variable and a constraint permutation is a
// formulation symmetry when c[pi(j)] == c[j], b[sigma(i)] == b[i] and
// A[sigma(i)][pi(j)] == A[i][j]. Variable bounds are treated as part of the
// variable data, so pi must also preserve them. All comparisons are exact.
//
// Detection colors the bipartite graph (variables by c and bounds,
// constraints by b), refines the coloring with multisets of
// (neighbor color, edge value) until it is equitable, and then runs an
// individualization-refinement search along one path of the search tree to
// collect automorphisms that fix successively longer prefixes of that path.
// The collected generators form a strong generating set when the search
// finishes within budget, so their orbits are the exact orbits of the group.

#ifndef SYMAUG_SYMMETRY_HPP_
#define SYMAUG_SYMMETRY_HPP_

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symaug/ilp_model.hpp"
#include "symaug/permutation.hpp"

namespace symaug {

struct Generator {
  Permutation pi;     // on variables
  Permutation sigma;  // on constraints
  friend bool operator==(const Generator&, const Generator&) = default;
};

struct SymmetryGenerators {
  std::vector<Generator> generators;
  /// log10 of the group order; exact unless the detection was partial, in
  /// which case it is a lower bound.
  double log10_order = 0.0;
};

struct OrbitPartition {
  std::vector<int> orbit_of;
  /// Each orbit sorted ascending; orbits ordered by their smallest element.
  std::vector<std::vector<int>> orbits;

  int num_vars() const { return static_cast<int>(orbit_of.size()); }
  int num_nontrivial() const {
    return static_cast<int>(std::count_if(orbits.begin(), orbits.end(),
                                          [](const auto& o) { return o.size() >= 2; }));
  }
  friend bool operator==(const OrbitPartition&, const OrbitPartition&) = default;
};

struct LinkedBlock {
  std::vector<int> orbits;  // orbit ids
  /// alignment[r][k] is the variable of orbit `orbits[r]` in column k.
  std::vector<std::vector<int>> alignment;
  int cardinality() const { return alignment.empty() ? 0 : static_cast<int>(alignment[0].size()); }
};

struct LinkedOrbitBlocks {
  std::vector<LinkedBlock> blocks;
};

struct DetectionResult {
  SymmetryGenerators gens;
  OrbitPartition orbits;
  LinkedOrbitBlocks blocks;
  bool partial = false;
  std::int64_t search_nodes = 0;
  double detect_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t value_bits(double x) {
  return std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x);
}

}  // namespace detail

inline bool verify_symmetry(const IlpInstance& inst, const Permutation& pi,
                            const Permutation& sigma) {
  const int n = inst.num_vars();
  const int m = inst.num_cons();
  if (static_cast<int>(pi.size()) != n || static_cast<int>(sigma.size()) != m) return false;
  for (int j = 0; j < n; ++j) {
    const int k = pi(j);
    if (inst.obj()[k] != inst.obj()[j] || inst.lower()[k] != inst.lower()[j] ||
        inst.upper()[k] != inst.upper()[j]) {
      return false;
    }
  }
  for (int i = 0; i < m; ++i) {
    if (inst.rhs()[sigma(i)] != inst.rhs()[i]) return false;
  }
  // Both sides have the same number of nonzeros, so checking that every
  // nonzero maps onto an equal nonzero covers the zero entries too.
  for (const Triplet& t : inst.coeffs()) {
    if (inst.coeff(sigma(t.row), pi(t.col)) != t.value) return false;
  }
  return true;
}

/// Finds sigma such that (pi, sigma) is a formulation symmetry by matching each
/// row's image against the rows of the instance.
inline std::optional<Permutation> find_constraint_permutation(const IlpInstance& inst,
                                                              const Permutation& pi) {
  const int n = inst.num_vars();
  const int m = inst.num_cons();
  if (static_cast<int>(pi.size()) != n) return std::nullopt;
  for (int j = 0; j < n; ++j) {
    const int k = pi(j);
    if (inst.obj()[k] != inst.obj()[j] || inst.lower()[k] != inst.lower()[j] ||
        inst.upper()[k] != inst.upper()[j]) {
      return std::nullopt;
    }
  }
  using RowKey = std::pair<double, std::vector<std::pair<int, double>>>;
  std::map<RowKey, std::vector<int>> by_key;
  for (int i = m - 1; i >= 0; --i) {
    RowKey key{inst.rhs()[i], {}};
    for (const Triplet& t : inst.row(i)) key.second.push_back({t.col, t.value});
    by_key[key].push_back(i);
  }
  // A[sigma(i)][pi(j)] == A[i][j]: row sigma(i) holds the entries of row i
  // moved to columns pi(j).
  std::vector<int> image(m);
  for (int i = 0; i < m; ++i) {
    RowKey key{inst.rhs()[i], {}};
    for (const Triplet& t : inst.row(i)) key.second.push_back({pi(t.col), t.value});
    std::sort(key.second.begin(), key.second.end());
    auto it = by_key.find(key);
    if (it == by_key.end() || it->second.empty()) return std::nullopt;
    image[i] = it->second.back();
    it->second.pop_back();
  }
  return Permutation(std::move(image));
}

// ---------------------------------------------------------------------------
// Orbits
// ---------------------------------------------------------------------------

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

/// Orbits of the group generated by the given variable permutations.
inline OrbitPartition orbits_from_permutations(int n, const std::vector<Permutation>& perms) {
  detail::UnionFind uf(n);
  for (const Permutation& p : perms) {
    for (int j = 0; j < n; ++j) uf.unite(j, p(j));
  }
  OrbitPartition part;
  part.orbit_of.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    const int root = uf.find(j);
    if (part.orbit_of[root] < 0) {
      part.orbit_of[root] = static_cast<int>(part.orbits.size());
      part.orbits.emplace_back();
    }
    part.orbit_of[j] = part.orbit_of[root];
    part.orbits[part.orbit_of[j]].push_back(j);
  }
  return part;
}

inline OrbitPartition orbits_from_generators(int n, const SymmetryGenerators& gens) {
  std::vector<Permutation> perms;
  for (const Generator& g : gens.generators) perms.push_back(g.pi);
  return orbits_from_permutations(n, perms);
}

/// Exact orbits by enumerating every (pi, sigma) pair. Test oracle only.
inline OrbitPartition orbits_brute_force(const IlpInstance& inst) {
  const int n = inst.num_vars();
  const int m = inst.num_cons();
  if (n > 8 || m > 6) {
    throw std::invalid_argument("orbits_brute_force: requires n <= 8 and m <= 6");
  }
  std::vector<int> pi_image(n);
  std::iota(pi_image.begin(), pi_image.end(), 0);
  std::vector<Permutation> symmetries;
  do {
    const Permutation pi(pi_image);
    std::vector<int> sigma_image(m);
    std::iota(sigma_image.begin(), sigma_image.end(), 0);
    do {
      if (verify_symmetry(inst, pi, Permutation(sigma_image))) {
        symmetries.push_back(pi);
        break;
      }
    } while (std::next_permutation(sigma_image.begin(), sigma_image.end()));
  } while (std::next_permutation(pi_image.begin(), pi_image.end()));
  return orbits_from_permutations(n, symmetries);
}

// ---------------------------------------------------------------------------
// Color refinement and individualization-refinement search
// ---------------------------------------------------------------------------

struct DetectOptions {
  std::int64_t node_budget = 1'000'000;
};

namespace detail {

/// Vertices 0..n-1 are variables, n..n+m-1 constraints.
class ColoredGraph {
 public:
  explicit ColoredGraph(const IlpInstance& inst)
      : n_(inst.num_vars()), m_(inst.num_cons()) {
    const int nv = n_ + m_;
    adj_.assign(nv, {});
    for (const Triplet& t : inst.coeffs()) {
      const std::uint64_t w = value_bits(t.value);
      adj_[t.col].push_back({n_ + t.row, w});
      adj_[n_ + t.row].push_back({t.col, w});
    }
    using Key = std::tuple<int, std::uint64_t, std::int64_t, std::int64_t>;
    std::vector<Key> keys(nv);
    for (int j = 0; j < n_; ++j) {
      keys[j] = {0, value_bits(inst.obj()[j]), inst.lower()[j], inst.upper()[j]};
    }
    for (int i = 0; i < m_; ++i) keys[n_ + i] = {1, value_bits(inst.rhs()[i]), 0, 0};
    std::vector<Key> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    initial_.resize(nv);
    for (int v = 0; v < nv; ++v) {
      initial_[v] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), keys[v]) - sorted.begin());
    }
  }

  int num_vertices() const { return n_ + m_; }
  int num_vars() const { return n_; }
  const std::vector<int>& initial_colors() const { return initial_; }

  /// Refines `color` (dense ids 0..k-1) to the coarsest equitable partition
  /// finer than it. New ids are ranks of (old color, neighbor signature), so
  /// the result does not depend on vertex labels.
  void refine(std::vector<int>& color) const {
    const int nv = num_vertices();
    int num_colors = count_colors(color);
    std::vector<std::vector<std::pair<int, std::uint64_t>>> sig(nv);
    std::vector<int> order(nv);
    std::vector<int> next(nv);
    while (true) {
      for (int v = 0; v < nv; ++v) {
        auto& s = sig[v];
        s.clear();
        for (const auto& [u, w] : adj_[v]) s.push_back({color[u], w});
        std::sort(s.begin(), s.end());
      }
      std::iota(order.begin(), order.end(), 0);
      auto less = [&](int a, int b) {
        if (color[a] != color[b]) return color[a] < color[b];
        return sig[a] < sig[b];
      };
      std::sort(order.begin(), order.end(), less);
      int rank = 0;
      for (int k = 0; k < nv; ++k) {
        if (k > 0 && less(order[k - 1], order[k])) ++rank;
        next[order[k]] = rank;
      }
      const int new_count = nv == 0 ? 0 : rank + 1;
      color.swap(next);
      if (new_count == num_colors) break;
      num_colors = new_count;
    }
  }

  static int count_colors(const std::vector<int>& color) {
    int mx = -1;
    for (int c : color) mx = std::max(mx, c);
    return mx + 1;
  }

  /// Gives v its own color just below the rest of its cell, then refines.
  std::vector<int> individualize(const std::vector<int>& color, int v) const {
    const int nv = num_vertices();
    std::vector<int> out(nv);
    for (int u = 0; u < nv; ++u) {
      out[u] = 2 * color[u] + ((u != v && color[u] == color[v]) ? 1 : 0);
    }
    std::vector<int> ids = out;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (int& c : out) {
      c = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), c) - ids.begin());
    }
    refine(out);
    return out;
  }

 private:
  int n_;
  int m_;
  std::vector<std::vector<std::pair<int, std::uint64_t>>> adj_;
  std::vector<int> initial_;
};

struct CellProfile {
  std::vector<int> sizes;  // sizes[c] = number of vertices with color c
  int target = -1;         // smallest color whose cell is not a singleton
  bool operator==(const CellProfile& o) const { return sizes == o.sizes; }
};

inline CellProfile profile_of(const std::vector<int>& color) {
  CellProfile p;
  p.sizes.assign(ColoredGraph::count_colors(color), 0);
  for (int c : color) ++p.sizes[c];
  for (int c = 0; c < static_cast<int>(p.sizes.size()); ++c) {
    if (p.sizes[c] > 1) {
      p.target = c;
      break;
    }
  }
  return p;
}

class IrSearch {
 public:
  IrSearch(const IlpInstance& inst, const DetectOptions& opts)
      : inst_(inst), graph_(inst), opts_(opts) {}

  DetectionResult run() {
    DetectionResult res;
    const int nv = graph_.num_vertices();

    // First path.
    std::vector<int> color = graph_.initial_colors();
    graph_.refine(color);
    ++nodes_;
    path_.push_back(color);
    profiles_.push_back(profile_of(color));
    while (profiles_.back().target >= 0) {
      const int cell = profiles_.back().target;
      int v = 0;
      while (path_.back()[v] != cell) ++v;
      path_vertex_.push_back(v);
      path_.push_back(graph_.individualize(path_.back(), v));
      profiles_.push_back(profile_of(path_.back()));
      ++nodes_;
    }
    leaf0_ = path_.back();

    const int depth = static_cast<int>(path_vertex_.size());
    std::vector<int> level_orbit_size(depth, 1);
    for (int d = depth - 1; d >= 0 && !exhausted_; --d) {
      const int vd = path_vertex_[d];
      const int cell = profiles_[d].target;
      std::vector<int> failed;
      for (int w = 0; w < nv && !exhausted_; ++w) {
        if (w == vd || path_[d][w] != cell) continue;
        UnionFind uf = stabilizer_orbits(d);
        if (uf.find(w) == uf.find(vd)) continue;
        bool known_bad = false;
        for (int f : failed) known_bad = known_bad || uf.find(f) == uf.find(w);
        if (known_bad) continue;
        std::vector<int> child = graph_.individualize(path_[d], w);
        ++nodes_;
        auto gamma = search(child, d + 1);
        if (gamma) {
          generators_.push_back(std::move(*gamma));
        } else {
          failed.push_back(w);
        }
      }
      UnionFind uf = stabilizer_orbits(d);
      int sz = 0;
      for (int w = 0; w < nv; ++w) sz += (uf.find(w) == uf.find(vd)) ? 1 : 0;
      level_orbit_size[d] = sz;
    }

    const int n = inst_.num_vars();
    const int m = inst_.num_cons();
    for (const auto& g : generators_) {
      std::vector<int> pi(g.begin(), g.begin() + n);
      std::vector<int> sigma(m);
      for (int i = 0; i < m; ++i) sigma[i] = g[n + i] - n;
      res.gens.generators.push_back({Permutation(std::move(pi)), Permutation(std::move(sigma))});
    }
    if (exhausted_) {
      res.gens.log10_order = log10_closure_lower_bound(res.gens);
    } else {
      double lg = 0.0;
      for (int s : level_orbit_size) lg += std::log10(static_cast<double>(s));
      res.gens.log10_order = lg;
    }
    res.orbits = orbits_from_generators(n, res.gens);
    res.partial = exhausted_;
    res.search_nodes = nodes_;
    return res;
  }

 private:
  // Orbits of the subgroup generated by the generators that fix the first d
  // path vertices.
  UnionFind stabilizer_orbits(int d) const {
    const int nv = graph_.num_vertices();
    UnionFind uf(nv);
    for (const auto& g : generators_) {
      bool fixes = true;
      for (int k = 0; k < d && fixes; ++k) fixes = g[path_vertex_[k]] == path_vertex_[k];
      if (!fixes) continue;
      for (int v = 0; v < nv; ++v) uf.unite(v, g[v]);
    }
    return uf;
  }

  // |G| >= |orbit| for every orbit; used when the search stopped early.
  static double log10_closure_lower_bound(const SymmetryGenerators& gens) {
    if (gens.generators.empty()) return 0.0;
    const int n = static_cast<int>(gens.generators[0].pi.size());
    OrbitPartition part = orbits_from_generators(n, gens);
    std::size_t largest = 1;
    for (const auto& o : part.orbits) largest = std::max(largest, o.size());
    return std::log10(static_cast<double>(largest));
  }

  // Looks for a leaf below `color` (at depth d) equivalent to the first leaf.
  std::optional<std::vector<int>> search(const std::vector<int>& color, int d) {
    const CellProfile prof = profile_of(color);
    if (!(prof == profiles_[d])) return std::nullopt;
    if (prof.target < 0) return leaf_automorphism(color);
    const int nv = graph_.num_vertices();
    for (int u = 0; u < nv; ++u) {
      if (color[u] != prof.target) continue;
      if (nodes_ >= opts_.node_budget) {
        exhausted_ = true;
        return std::nullopt;
      }
      ++nodes_;
      auto found = search(graph_.individualize(color, u), d + 1);
      if (found || exhausted_) return found;
    }
    return std::nullopt;
  }

  std::optional<std::vector<int>> leaf_automorphism(const std::vector<int>& leaf) const {
    const int nv = graph_.num_vertices();
    std::vector<int> inv(nv);
    for (int v = 0; v < nv; ++v) inv[leaf[v]] = v;
    std::vector<int> gamma(nv);
    for (int v = 0; v < nv; ++v) gamma[v] = inv[leaf0_[v]];
    const int n = inst_.num_vars();
    const int m = inst_.num_cons();
    std::vector<int> pi(gamma.begin(), gamma.begin() + n);
    std::vector<int> sigma(m);
    for (int i = 0; i < m; ++i) sigma[i] = gamma[n + i] - n;
    if (!Permutation::is_bijection(pi) || !Permutation::is_bijection(sigma)) return std::nullopt;
    if (!verify_symmetry(inst_, Permutation(pi), Permutation(sigma))) return std::nullopt;
    return gamma;
  }

  const IlpInstance& inst_;
  ColoredGraph graph_;
  DetectOptions opts_;
  std::vector<std::vector<int>> path_;
  std::vector<CellProfile> profiles_;
  std::vector<int> path_vertex_;
  std::vector<int> leaf0_;
  std::vector<std::vector<int>> generators_;
  std::int64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Linked orbits
// ---------------------------------------------------------------------------

namespace detail {

// Equivariant bijection phi: from -> to with phi(from[0]) = start, i.e.
// phi(p(x)) == p(phi(x)) for every generator p. Empty when none exists.
inline std::vector<std::pair<int, int>> equivariant_map(const std::vector<Permutation>& perms,
                                                        const std::vector<int>& from,
                                                        int start, int n) {
  std::vector<int> phi(n, -1);
  std::vector<char> used(n, 0);
  std::vector<int> queue{from[0]};
  phi[from[0]] = start;
  used[start] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int x = queue[head];
    for (const Permutation& p : perms) {
      const int px = p(x);
      const int target = p(phi[x]);
      if (phi[px] < 0) {
        if (used[target]) return {};
        phi[px] = target;
        used[target] = 1;
        queue.push_back(px);
      } else if (phi[px] != target) {
        return {};
      }
    }
  }
  if (queue.size() != from.size()) return {};
  std::vector<std::pair<int, int>> out;
  for (int x : from) {
    if (phi[x] < 0) return {};
    out.push_back({x, phi[x]});
  }
  return out;
}

}  // namespace detail

/// Groups equal-size nontrivial orbits whose elements move in lockstep under
/// every generator. Two orbits are linked when an equivariant bijection exists
/// between them; the reference orbit of a block is its first orbit, with its
/// elements in ascending order as the columns. Every orbit lands in exactly one
/// block; orbits with no partner (and all fixed points) form singleton blocks.
inline LinkedOrbitBlocks linked_blocks(const SymmetryGenerators& gens,
                                       const OrbitPartition& orbits) {
  const int n = orbits.num_vars();
  std::vector<Permutation> perms;
  for (const Generator& g : gens.generators) perms.push_back(g.pi);
  LinkedOrbitBlocks result;
  std::vector<char> assigned(orbits.orbits.size(), 0);
  for (std::size_t a = 0; a < orbits.orbits.size(); ++a) {
    if (assigned[a]) continue;
    assigned[a] = 1;
    const auto& ref = orbits.orbits[a];
    LinkedBlock block;
    block.orbits.push_back(static_cast<int>(a));
    block.alignment.push_back(ref);
    if (ref.size() >= 2) {
      for (std::size_t b = a + 1; b < orbits.orbits.size(); ++b) {
        if (assigned[b] || orbits.orbits[b].size() != ref.size()) continue;
        const auto& other = orbits.orbits[b];
        for (int start : other) {
          auto phi = detail::equivariant_map(perms, ref, start, n);
          if (phi.empty()) continue;
          std::vector<int> row(ref.size());
          for (std::size_t k = 0; k < ref.size(); ++k) row[k] = phi[k].second;
          block.orbits.push_back(static_cast<int>(b));
          block.alignment.push_back(std::move(row));
          assigned[b] = 1;
          break;
        }
      }
    }
    result.blocks.push_back(std::move(block));
  }
  return result;
}

/// Checks the lockstep condition of every block against the given permutations:
/// p(o[r][j]) == o[r][k]  <=>  p(o[r'][j]) == o[r'][k].
inline bool blocks_are_linked(const LinkedOrbitBlocks& blocks,
                              const std::vector<Permutation>& perms) {
  for (const LinkedBlock& blk : blocks.blocks) {
    const int c = blk.cardinality();
    for (const Permutation& p : perms) {
      for (std::size_t r = 0; r < blk.alignment.size(); ++r) {
        for (std::size_t r2 = 0; r2 < blk.alignment.size(); ++r2) {
          for (int j = 0; j < c; ++j) {
            for (int k = 0; k < c; ++k) {
              const bool lhs = p(blk.alignment[r][j]) == blk.alignment[r][k];
              const bool rhs = p(blk.alignment[r2][j]) == blk.alignment[r2][k];
              if (lhs != rhs) return false;
            }
          }
        }
      }
    }
  }
  return true;
}

/// Detects generators of the formulation symmetry group, the variable orbits
/// and the linked-orbit blocks. On budget exhaustion `partial` is set and the
/// orbits are those of the subgroup generated by the generators found so far.
inline DetectionResult detect_symmetry(const IlpInstance& inst, const DetectOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  DetectionResult res = detail::IrSearch(inst, opts).run();
  res.blocks = linked_blocks(res.gens, res.orbits);
  res.detect_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

// ---------------------------------------------------------------------------
// Group enumeration
// ---------------------------------------------------------------------------

/// All distinct variable permutations of the group generated by `gens`, in
/// breadth-first order starting from the identity. Returns nullopt if the
/// group has more than `limit` elements.
inline std::optional<std::vector<Permutation>> enumerate_group(const SymmetryGenerators& gens,
                                                               int n, std::size_t limit) {
  struct Hash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ULL;
      for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
      return h;
    }
  };
  std::vector<Permutation> elements{Permutation::identity(n)};
  std::unordered_set<std::vector<int>, Hash> seen{elements[0].image()};
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const Generator& g : gens.generators) {
      Permutation next = elements[head].compose(g.pi);
      if (seen.insert(next.image()).second) {
        if (elements.size() >= limit) return std::nullopt;
        elements.push_back(std::move(next));
      }
    }
  }
  return elements;
}

// ---------------------------------------------------------------------------
// JSON sidecar
//
//   {"generators": [{"pi": [..], "sigma": [..]}], "orbits": [[..],..],
//    "blocks": [{"orbits": [..], "alignment": [[..],..]}], "partial": bool,
//    "log10_order": num, "detect_seconds": num}
// ---------------------------------------------------------------------------

inline nlohmann::json detection_to_json(const DetectionResult& r) {
  nlohmann::json gens = nlohmann::json::array();
  for (const Generator& g : r.gens.generators) {
    gens.push_back({{"pi", g.pi.image()}, {"sigma", g.sigma.image()}});
  }
  nlohmann::json blocks = nlohmann::json::array();
  for (const LinkedBlock& b : r.blocks.blocks) {
    blocks.push_back({{"orbits", b.orbits}, {"alignment", b.alignment}});
  }
  return {{"generators", gens},           {"orbits", r.orbits.orbits},
          {"blocks", blocks},             {"partial", r.partial},
          {"log10_order", r.gens.log10_order}, {"detect_seconds", r.detect_seconds}};
}

inline DetectionResult detection_from_json(const nlohmann::json& j, int n) {
  DetectionResult r;
  try {
    for (const auto& g : j.at("generators")) {
      r.gens.generators.push_back({Permutation(g.at("pi").get<std::vector<int>>()),
                                   Permutation(g.at("sigma").get<std::vector<int>>())});
    }
    r.gens.log10_order = j.at("log10_order").get<double>();
    r.partial = j.at("partial").get<bool>();
    r.detect_seconds = j.value("detect_seconds", 0.0);
    r.orbits = orbits_from_generators(n, r.gens);
    const auto stored = j.at("orbits").get<std::vector<std::vector<int>>>();
    if (stored != r.orbits.orbits) {
      throw ParseError("field 'orbits': inconsistent with generators");
    }
    for (const auto& b : j.at("blocks")) {
      LinkedBlock blk;
      blk.orbits = b.at("orbits").get<std::vector<int>>();
      blk.alignment = b.at("alignment").get<std::vector<std::vector<int>>>();
      r.blocks.blocks.push_back(std::move(blk));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("symmetry sidecar: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("symmetry sidecar: ") + e.what());
  }
  return r;
}

}  // namespace symaug

#endif  // SYMAUG_SYMMETRY_HPP_
