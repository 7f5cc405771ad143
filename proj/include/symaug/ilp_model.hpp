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

// Integer linear programs  min c'x  s.t.  Ax <= b,  lb <= x <= ub,  x integer.
//
// Instances are always held in normalized form: every row is a <= row, an
// equality becomes the pair (a'x <= b, -a'x <= -b) and a >= row is negated.

#ifndef SYMAUG_ILP_MODEL_HPP_
#define SYMAUG_ILP_MODEL_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace symaug {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var = 0;
  double coeff = 0.0;
};

/// A constraint as written by the user, before normalization.
struct Row {
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::vector<Term> terms;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

namespace detail {
// Negation that never produces -0.0; symmetry detection compares bit patterns.
inline double negate(double x) { return x == 0.0 ? 0.0 : -x; }
}  // namespace detail

class IlpInstance {
 public:
  IlpInstance() = default;

  /// Builds a normalized instance from user rows. Throws std::invalid_argument
  /// on out-of-range or duplicate variable references.
  static IlpInstance from_rows(std::vector<double> obj, std::span<const Row> rows,
                               std::vector<std::int64_t> lower = {},
                               std::vector<std::int64_t> upper = {}) {
    const int n = static_cast<int>(obj.size());
    std::vector<double> rhs;
    std::vector<Triplet> coeffs;
    auto emit = [&](const Row& row, bool negated) {
      const int r = static_cast<int>(rhs.size());
      rhs.push_back(negated ? detail::negate(row.rhs) : row.rhs + 0.0);
      for (const Term& t : row.terms) {
        if (t.coeff == 0.0) continue;
        coeffs.push_back({r, t.var, negated ? detail::negate(t.coeff) : t.coeff});
      }
    };
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Row& row = rows[k];
      std::vector<int> seen;
      for (const Term& t : row.terms) {
        if (t.var < 0 || t.var >= n) {
          throw std::invalid_argument("row " + std::to_string(k) + ": variable index " +
                                      std::to_string(t.var) + " out of range");
        }
        seen.push_back(t.var);
      }
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw std::invalid_argument("row " + std::to_string(k) +
                                    ": duplicate variable reference");
      }
      switch (row.sense) {
        case Sense::kLessEqual:
          emit(row, false);
          break;
        case Sense::kGreaterEqual:
          emit(row, true);
          break;
        case Sense::kEqual:
          emit(row, false);
          emit(row, true);
          break;
      }
    }
    IlpInstance inst = from_normalized(std::move(obj), std::move(rhs), std::move(coeffs),
                                       std::move(lower), std::move(upper));
    inst.num_source_rows_ = static_cast<int>(rows.size());
    return inst;
  }

  /// Builds an instance whose rows are already all <= rows.
  static IlpInstance from_normalized(std::vector<double> obj, std::vector<double> rhs,
                                     std::vector<Triplet> coeffs,
                                     std::vector<std::int64_t> lower = {},
                                     std::vector<std::int64_t> upper = {}) {
    IlpInstance inst;
    const int n = static_cast<int>(obj.size());
    const int m = static_cast<int>(rhs.size());
    if (n < 1) throw std::invalid_argument("instance needs at least one variable");
    if (lower.empty()) lower.assign(n, 0);
    if (upper.empty()) upper.assign(n, 1);
    if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n) {
      throw std::invalid_argument("bound vectors must have length n");
    }
    for (int j = 0; j < n; ++j) {
      if (lower[j] > upper[j]) {
        throw std::invalid_argument("variable " + std::to_string(j) + ": lb > ub");
      }
    }
    for (const Triplet& t : coeffs) {
      if (t.row < 0 || t.row >= m || t.col < 0 || t.col >= n) {
        throw std::invalid_argument("coefficient index out of range");
      }
    }
    std::erase_if(coeffs, [](const Triplet& t) { return t.value == 0.0; });
    std::sort(coeffs.begin(), coeffs.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
      if (coeffs[k].row == coeffs[k - 1].row && coeffs[k].col == coeffs[k - 1].col) {
        throw std::invalid_argument("duplicate coefficient (" + std::to_string(coeffs[k].row) +
                                    "," + std::to_string(coeffs[k].col) + ")");
      }
    }
    for (double& v : obj) v += 0.0;
    for (double& v : rhs) v += 0.0;
    inst.obj_ = std::move(obj);
    inst.rhs_ = std::move(rhs);
    inst.coeffs_ = std::move(coeffs);
    inst.lower_ = std::move(lower);
    inst.upper_ = std::move(upper);
    inst.num_source_rows_ = m;
    inst.row_start_.assign(m + 1, 0);
    for (const Triplet& t : inst.coeffs_) ++inst.row_start_[t.row + 1];
    for (int i = 0; i < m; ++i) inst.row_start_[i + 1] += inst.row_start_[i];
    return inst;
  }

  int num_vars() const { return static_cast<int>(obj_.size()); }
  /// Number of normalized (<=) rows.
  int num_cons() const { return static_cast<int>(rhs_.size()); }
  /// Number of rows before equality splitting.
  int num_source_rows() const { return num_source_rows_; }

  const std::vector<double>& obj() const { return obj_; }
  const std::vector<double>& rhs() const { return rhs_; }
  /// Nonzeros sorted by (row, col).
  const std::vector<Triplet>& coeffs() const { return coeffs_; }
  const std::vector<std::int64_t>& lower() const { return lower_; }
  const std::vector<std::int64_t>& upper() const { return upper_; }

  std::span<const Triplet> row(int i) const {
    return std::span<const Triplet>(coeffs_).subspan(row_start_[i],
                                                     row_start_[i + 1] - row_start_[i]);
  }

  double coeff(int i, int j) const {
    auto r = row(i);
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Triplet& t, int col) { return t.col < col; });
    return (it != r.end() && it->col == j) ? it->value : 0.0;
  }

  bool is_binary() const {
    for (int j = 0; j < num_vars(); ++j) {
      if (lower_[j] != 0 || upper_[j] != 1) return false;
    }
    return true;
  }

  friend bool operator==(const IlpInstance& a, const IlpInstance& b) {
    return a.obj_ == b.obj_ && a.rhs_ == b.rhs_ && a.coeffs_ == b.coeffs_ &&
           a.lower_ == b.lower_ && a.upper_ == b.upper_;
  }

 private:
  std::vector<double> obj_;
  std::vector<double> rhs_;
  std::vector<Triplet> coeffs_;
  std::vector<int> row_start_;
  std::vector<std::int64_t> lower_;
  std::vector<std::int64_t> upper_;
  int num_source_rows_ = 0;
};

// ---------------------------------------------------------------------------
// JSON instance format
//
//   {"n": int, "m": int, "obj": [..],
//    "rows": [{"sense": "<=|=|>=", "rhs": num, "terms": [[j, coeff], ..]}, ..],
//    "lb": [..], "ub": [..]}
//
// Indices are 0-based. lb/ub are optional and default to 0/1.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
T json_get(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field)) throw ParseError("missing field '" + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("field '" + field + "': " + e.what());
  }
}

inline Sense parse_sense(const std::string& s, const std::string& field) {
  if (s == "<=") return Sense::kLessEqual;
  if (s == "=" || s == "==") return Sense::kEqual;
  if (s == ">=") return Sense::kGreaterEqual;
  throw ParseError("field '" + field + "': unknown sense '" + s + "'");
}

}  // namespace detail

inline IlpInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("instance must be a JSON object");
  const auto n = detail::json_get<long long>(j, "n");
  if (n < 1) throw ParseError("field 'n': must be >= 1");
  auto obj = detail::json_get<std::vector<double>>(j, "obj");
  if (static_cast<long long>(obj.size()) != n) {
    throw ParseError("field 'obj': expected " + std::to_string(n) + " entries");
  }
  if (!j.contains("rows") || !j.at("rows").is_array()) {
    throw ParseError("field 'rows': missing or not an array");
  }
  const auto& jrows = j.at("rows");
  if (j.contains("m")) {
    const auto m = detail::json_get<long long>(j, "m");
    if (m != static_cast<long long>(jrows.size())) {
      throw ParseError("field 'm': does not match number of rows");
    }
  }
  std::vector<Row> rows;
  for (std::size_t r = 0; r < jrows.size(); ++r) {
    const std::string where = "rows[" + std::to_string(r) + "]";
    const auto& jr = jrows[r];
    if (!jr.is_object()) throw ParseError("field '" + where + "': not an object");
    Row row;
    row.sense = detail::parse_sense(detail::json_get<std::string>(jr, "sense"),
                                    where + ".sense");
    row.rhs = detail::json_get<double>(jr, "rhs");
    if (!jr.contains("terms") || !jr.at("terms").is_array()) {
      throw ParseError("field '" + where + ".terms': missing or not an array");
    }
    std::vector<int> cols;
    for (const auto& jt : jr.at("terms")) {
      if (!jt.is_array() || jt.size() != 2 || !jt[0].is_number_integer() ||
          !jt[1].is_number()) {
        throw ParseError("field '" + where + ".terms': expected [index, coeff] pairs");
      }
      const long long col = jt[0].get<long long>();
      if (col < 0 || col >= n) {
        throw ParseError("field '" + where + ".terms': variable index " +
                         std::to_string(col) + " out of range [0," + std::to_string(n) + ")");
      }
      row.terms.push_back({static_cast<int>(col), jt[1].get<double>()});
      cols.push_back(static_cast<int>(col));
    }
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) {
      throw ParseError("field '" + where + ".terms': duplicate variable index");
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::int64_t> lb, ub;
  if (j.contains("lb")) lb = detail::json_get<std::vector<std::int64_t>>(j, "lb");
  if (j.contains("ub")) ub = detail::json_get<std::vector<std::int64_t>>(j, "ub");
  if (!lb.empty() && static_cast<long long>(lb.size()) != n) {
    throw ParseError("field 'lb': expected " + std::to_string(n) + " entries");
  }
  if (!ub.empty() && static_cast<long long>(ub.size()) != n) {
    throw ParseError("field 'ub': expected " + std::to_string(n) + " entries");
  }
  try {
    return IlpInstance::from_rows(std::move(obj), rows, std::move(lb), std::move(ub));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("field 'lb/ub': ") + e.what());
  }
}

/// Parses the instance JSON text; throws ParseError naming the offending field.
inline IlpInstance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return instance_from_json(j);
}

/// Writes the normalized form (all rows "<=").
inline nlohmann::json instance_to_json(const IlpInstance& inst) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < inst.num_cons(); ++i) {
    nlohmann::json terms = nlohmann::json::array();
    for (const Triplet& t : inst.row(i)) terms.push_back({t.col, t.value});
    rows.push_back({{"sense", "<="}, {"rhs", inst.rhs()[i]}, {"terms", terms}});
  }
  return {{"n", inst.num_vars()}, {"m", inst.num_cons()}, {"obj", inst.obj()},
          {"rows", rows},         {"lb", inst.lower()},   {"ub", inst.upper()}};
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct Evaluation {
  double objective = 0.0;
  /// Sum of positive entries of Ax - b over normalized rows.
  double violation = 0.0;
};

inline Evaluation evaluate(const IlpInstance& inst, std::span<const std::int64_t> x) {
  if (static_cast<int>(x.size()) != inst.num_vars()) {
    throw std::invalid_argument("evaluate: expected " + std::to_string(inst.num_vars()) +
                                " values, got " + std::to_string(x.size()));
  }
  Evaluation ev;
  for (int j = 0; j < inst.num_vars(); ++j) {
    ev.objective += inst.obj()[j] * static_cast<double>(x[j]);
  }
  for (int i = 0; i < inst.num_cons(); ++i) {
    double act = 0.0;
    for (const Triplet& t : inst.row(i)) act += t.value * static_cast<double>(x[t.col]);
    ev.violation += std::max(0.0, act - inst.rhs()[i]);
  }
  return ev;
}

inline bool within_bounds(const IlpInstance& inst, std::span<const std::int64_t> x) {
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (x[j] < inst.lower()[j] || x[j] > inst.upper()[j]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exact solver
// ---------------------------------------------------------------------------

enum class SolveStatus { kOptimal, kFeasible, kInfeasible };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

inline SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "optimal") return SolveStatus::kOptimal;
  if (s == "feasible") return SolveStatus::kFeasible;
  if (s == "infeasible") return SolveStatus::kInfeasible;
  throw ParseError("field 'status': unknown value '" + s + "'");
}

struct Solution {
  std::vector<std::int64_t> values;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  /// Set when the node or time budget stopped the search early; an infeasible
  /// status is then unproven.
  bool budget_exhausted = false;
  std::int64_t nodes = 0;
};

struct SolveOptions {
  double time_limit_seconds = 60.0;
  std::int64_t node_budget = 50'000'000;
};

namespace detail {

// Depth-first branch and bound over the variables in index order. Nodes are
// pruned when some row cannot be satisfied by any completion (minimum row
// activity above the rhs) or when the best achievable objective cannot beat
// the incumbent.
class BranchAndBound {
 public:
  BranchAndBound(const IlpInstance& inst, const SolveOptions& opts)
      : inst_(inst), opts_(opts), n_(inst.num_vars()) {
    col_rows_.resize(n_);
    for (const Triplet& t : inst.coeffs()) col_rows_[t.col].push_back({t.row, t.value});
    min_act_.assign(inst.num_cons(), 0.0);
    obj_bound_ = 0.0;
    for (int j = 0; j < n_; ++j) {
      for (const auto& [i, a] : col_rows_[j]) min_act_[i] += free_min(a, j);
      obj_bound_ += free_min(inst.obj()[j], j);
    }
    x_.assign(n_, 0);
    start_ = std::chrono::steady_clock::now();
  }

  Solution run() {
    Solution sol;
    bool root_ok = true;
    for (int i = 0; i < inst_.num_cons(); ++i) {
      if (min_act_[i] > inst_.rhs()[i] + kTol) root_ok = false;
    }
    if (root_ok) dfs(0);
    sol.nodes = nodes_;
    sol.budget_exhausted = stopped_;
    if (has_incumbent_) {
      sol.values = best_;
      sol.objective = best_obj_;
      sol.status = stopped_ ? SolveStatus::kFeasible : SolveStatus::kOptimal;
    } else {
      sol.status = SolveStatus::kInfeasible;
    }
    return sol;
  }

 private:
  static constexpr double kTol = 1e-9;

  double free_min(double a, int j) const {
    return std::min(a * static_cast<double>(inst_.lower()[j]),
                    a * static_cast<double>(inst_.upper()[j]));
  }

  bool out_of_budget() {
    if (stopped_) return true;
    if (nodes_ >= opts_.node_budget) {
      stopped_ = true;
    } else if ((nodes_ & 1023) == 0) {
      const double elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
      if (elapsed > opts_.time_limit_seconds) stopped_ = true;
    }
    return stopped_;
  }

  void dfs(int j) {
    if (j == n_) {
      const double obj = obj_bound_;
      if (!has_incumbent_ || obj < best_obj_ - kTol) {
        has_incumbent_ = true;
        best_obj_ = obj;
        best_ = x_;
      }
      return;
    }
    const double c = inst_.obj()[j];
    for (std::int64_t v = inst_.lower()[j]; v <= inst_.upper()[j]; ++v) {
      if (out_of_budget()) return;
      ++nodes_;
      const double vd = static_cast<double>(v);
      bool feasible = true;
      for (const auto& [i, a] : col_rows_[j]) {
        min_act_[i] += a * vd - free_min(a, j);
        if (min_act_[i] > inst_.rhs()[i] + kTol) feasible = false;
      }
      const double obj_delta = c * vd - free_min(c, j);
      obj_bound_ += obj_delta;
      const bool promising = !has_incumbent_ || obj_bound_ < best_obj_ - kTol;
      if (feasible && promising) {
        x_[j] = v;
        dfs(j + 1);
      }
      obj_bound_ -= obj_delta;
      for (const auto& [i, a] : col_rows_[j]) min_act_[i] -= a * vd - free_min(a, j);
    }
  }

  const IlpInstance& inst_;
  SolveOptions opts_;
  int n_;
  std::vector<std::vector<std::pair<int, double>>> col_rows_;
  std::vector<double> min_act_;
  double obj_bound_ = 0.0;
  std::vector<std::int64_t> x_;
  std::vector<std::int64_t> best_;
  double best_obj_ = 0.0;
  bool has_incumbent_ = false;
  bool stopped_ = false;
  std::int64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Exact depth-first branch and bound. Branches on variables in index order,
/// smallest value first, and only replaces the incumbent on strict improvement,
/// so the returned optimum is deterministic.
inline Solution solve_exact(const IlpInstance& inst, const SolveOptions& opts = {}) {
  return detail::BranchAndBound(inst, opts).run();
}

inline nlohmann::json solution_to_json(const Solution& s) {
  return {{"status", to_string(s.status)}, {"objective", s.objective}, {"values", s.values}};
}

inline Solution solution_from_json(const nlohmann::json& j) {
  Solution s;
  s.status = solve_status_from_string(detail::json_get<std::string>(j, "status"));
  s.objective = detail::json_get<double>(j, "objective");
  s.values = detail::json_get<std::vector<std::int64_t>>(j, "values");
  return s;
}

}  // namespace symaug

#endif  // SYMAUG_ILP_MODEL_HPP_
