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

#ifndef SYMAUG_BIPARTITE_HPP_
#define SYMAUG_BIPARTITE_HPP_

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "symaug/ilp_model.hpp"
#include "symaug/permutation.hpp"

namespace symaug {

struct Edge {
  int cons = 0;
  int var = 0;
  double weight = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Variable nodes carry c_j, constraint nodes carry b_i and every nonzero A_ij
/// is an edge with weight A_ij. Edges are sorted by (cons, var).
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::vector<double> var_feats, std::vector<double> cons_feats,
                 std::vector<Edge> edges)
      : var_feats_(std::move(var_feats)),
        cons_feats_(std::move(cons_feats)),
        edges_(std::move(edges)) {
    const int n = num_vars();
    const int m = num_cons();
    for (const Edge& e : edges_) {
      if (e.cons < 0 || e.cons >= m || e.var < 0 || e.var >= n) {
        throw std::invalid_argument("BipartiteGraph: edge endpoint out of range");
      }
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.cons != b.cons ? a.cons < b.cons : a.var < b.var;
    });
    var_adj_.assign(n, {});
    cons_adj_.assign(m, {});
    for (int k = 0; k < static_cast<int>(edges_.size()); ++k) {
      cons_adj_[edges_[k].cons].push_back(k);
      var_adj_[edges_[k].var].push_back(k);
    }
  }

  int num_vars() const { return static_cast<int>(var_feats_.size()); }
  int num_cons() const { return static_cast<int>(cons_feats_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<double>& var_feats() const { return var_feats_; }
  const std::vector<double>& cons_feats() const { return cons_feats_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Edge ids incident to variable j, in ascending constraint order.
  const std::vector<int>& var_adjacency(int j) const { return var_adj_[j]; }
  /// Edge ids incident to constraint i, in ascending variable order.
  const std::vector<int>& cons_adjacency(int i) const { return cons_adj_[i]; }

  friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
    return a.var_feats_ == b.var_feats_ && a.cons_feats_ == b.cons_feats_ &&
           a.edges_ == b.edges_;
  }

 private:
  std::vector<double> var_feats_;
  std::vector<double> cons_feats_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> var_adj_;
  std::vector<std::vector<int>> cons_adj_;
};

inline BipartiteGraph to_bipartite(const IlpInstance& inst) {
  std::vector<Edge> edges;
  edges.reserve(inst.coeffs().size());
  for (const Triplet& t : inst.coeffs()) edges.push_back({t.row, t.col, t.value});
  return BipartiteGraph(inst.obj(), inst.rhs(), std::move(edges));
}

/// Inverse of to_bipartite; bounds are not part of the graph and default to 0/1.
inline IlpInstance to_instance(const BipartiteGraph& g) {
  std::vector<Triplet> coeffs;
  coeffs.reserve(g.edges().size());
  for (const Edge& e : g.edges()) coeffs.push_back({e.cons, e.var, e.weight});
  return IlpInstance::from_normalized(g.var_feats(), g.cons_feats(), std::move(coeffs));
}

/// Returns pi^c(sigma^r(A)): new variable k is old variable pi(k) and new
/// constraint k is old constraint sigma(k). Consequently
///   permute(permute(g, p1, s1), p2, s2) == permute(g, p1.compose(p2), s1.compose(s2)).
inline BipartiteGraph permute(const BipartiteGraph& g, const Permutation& pi,
                              const Permutation& sigma) {
  if (static_cast<int>(pi.size()) != g.num_vars() ||
      static_cast<int>(sigma.size()) != g.num_cons()) {
    throw std::invalid_argument("permute: permutation size mismatch");
  }
  const Permutation pi_inv = pi.inverse();
  const Permutation sigma_inv = sigma.inverse();
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const Edge& e : g.edges()) edges.push_back({sigma_inv(e.cons), pi_inv(e.var), e.weight});
  return BipartiteGraph(permute_vector(pi, g.var_feats()), permute_vector(sigma, g.cons_feats()),
                        std::move(edges));
}

}  // namespace symaug

#endif  // SYMAUG_BIPARTITE_HPP_
