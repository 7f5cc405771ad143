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

// Bipartite message-passing predictor.
//
// Inputs per variable are (c_j, z_j), per constraint b_i, per edge A_ij, each
// standardized with statistics from the training split. The network is
//
//   embed      Hv = relu(Wv [c; z] + bv),   Hw = relu(Ww b + bw)
//   4 passes   var->cons, cons->var, var->cons, cons->var, each
//                msg_e  = relu(P h_src + a_e q + r)
//                agg_t  = mean of msg_e over edges into t (0 if none)
//                h_t'   = relu(S h_t + T agg_t + s)
//   head       y_j = sigmoid(w2 . relu(W1 hv_j + b1) + b2)
//
// Every step is either node-wise or a mean over neighbors, so permuting the
// variables permutes the output the same way and permuting the constraints
// leaves it unchanged.

#ifndef SYMAUG_GNN_HPP_
#define SYMAUG_GNN_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "symaug/augmentation.hpp"
#include "symaug/bipartite.hpp"
#include "symaug/rng.hpp"

namespace symaug {

inline constexpr double kProbClamp = 1e-7;
inline constexpr int kNumPasses = 4;

/// Per-feature affine standardization, fitted on the training split.
struct FeatureScaler {
  double c_mean = 0.0, c_std = 1.0;
  double z_mean = 0.0, z_std = 1.0;
  double b_mean = 0.0, b_std = 1.0;
  double a_mean = 0.0, a_std = 1.0;

  static FeatureScaler fit(std::span<const BipartiteGraph* const> graphs,
                           std::span<const std::vector<double>* const> zs) {
    auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
      if (v.empty()) {
        mean = 0.0;
        sd = 1.0;
        return;
      }
      double s = 0.0;
      for (double x : v) s += x;
      mean = s / static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      sd = std::sqrt(ss / static_cast<double>(v.size()));
      if (!(sd > 1e-12)) sd = 1.0;
    };
    std::vector<double> c, b, a, z;
    for (const BipartiteGraph* g : graphs) {
      c.insert(c.end(), g->var_feats().begin(), g->var_feats().end());
      b.insert(b.end(), g->cons_feats().begin(), g->cons_feats().end());
      for (const Edge& e : g->edges()) a.push_back(e.weight);
    }
    for (const std::vector<double>* zz : zs) z.insert(z.end(), zz->begin(), zz->end());
    FeatureScaler f;
    stats(c, f.c_mean, f.c_std);
    stats(b, f.b_mean, f.b_std);
    stats(a, f.a_mean, f.a_std);
    stats(z, f.z_mean, f.z_std);
    return f;
  }

  nlohmann::json to_json() const {
    return {{"c", {c_mean, c_std}}, {"z", {z_mean, z_std}}, {"b", {b_mean, b_std}},
            {"a", {a_mean, a_std}}};
  }
  static FeatureScaler from_json(const nlohmann::json& j) {
    FeatureScaler f;
    f.c_mean = j.at("c")[0];
    f.c_std = j.at("c")[1];
    f.z_mean = j.at("z")[0];
    f.z_std = j.at("z")[1];
    f.b_mean = j.at("b")[0];
    f.b_std = j.at("b")[1];
    f.a_mean = j.at("a")[0];
    f.a_std = j.at("a")[1];
    return f;
  }
};

/// Offsets of the named parameter tensors inside the flat parameter vector.
/// Matrices are column-major.
struct ParamLayout {
  struct Slice {
    std::size_t offset = 0;
    int rows = 0;
    int cols = 0;
  };
  struct Pass {
    Slice msg_w, msg_edge, msg_bias, self_w, agg_w, bias;
  };

  int hidden = 0;
  Slice embed_var_w, embed_var_b, embed_cons_w, embed_cons_b;
  std::array<Pass, kNumPasses> passes;
  Slice head_w1, head_b1, head_w2, head_b2;
  std::size_t size = 0;

  explicit ParamLayout(int h = 32) : hidden(h) {
    auto take = [this](int rows, int cols) {
      Slice s{size, rows, cols};
      size += static_cast<std::size_t>(rows) * cols;
      return s;
    };
    embed_var_w = take(h, 2);
    embed_var_b = take(h, 1);
    embed_cons_w = take(h, 1);
    embed_cons_b = take(h, 1);
    for (Pass& p : passes) {
      p.msg_w = take(h, h);
      p.msg_edge = take(h, 1);
      p.msg_bias = take(h, 1);
      p.self_w = take(h, h);
      p.agg_w = take(h, h);
      p.bias = take(h, 1);
    }
    head_w1 = take(h, h);
    head_b1 = take(h, 1);
    head_w2 = take(h, 1);
    head_b2 = take(1, 1);
  }
};

class GnnModel {
 public:
  explicit GnnModel(int hidden = 32) : layout_(hidden), params_(layout_.size, 0.0) {}

  /// He-uniform weights, zero biases.
  void init(std::uint64_t seed) {
    Rng rng(seed);
    std::fill(params_.begin(), params_.end(), 0.0);
    auto fill = [&](const ParamLayout::Slice& s, int fan_in) {
      const double bound = std::sqrt(6.0 / fan_in);
      for (std::size_t k = 0; k < static_cast<std::size_t>(s.rows) * s.cols; ++k) {
        params_[s.offset + k] = rng.uniform(-bound, bound);
      }
    };
    const int h = layout_.hidden;
    fill(layout_.embed_var_w, 2);
    fill(layout_.embed_cons_w, 1);
    for (const auto& p : layout_.passes) {
      fill(p.msg_w, h);
      fill(p.msg_edge, 1);
      fill(p.self_w, 2 * h);
      fill(p.agg_w, 2 * h);
    }
    fill(layout_.head_w1, h);
    fill(layout_.head_w2, h);
  }

  int hidden() const { return layout_.hidden; }
  const ParamLayout& layout() const { return layout_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  FeatureScaler& scaler() { return scaler_; }
  const FeatureScaler& scaler() const { return scaler_; }

  Eigen::Map<const Eigen::MatrixXd> view(const ParamLayout::Slice& s) const {
    return {params_.data() + s.offset, s.rows, s.cols};
  }

 private:
  ParamLayout layout_;
  std::vector<double> params_;
  FeatureScaler scaler_;
};

namespace detail {

inline Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

inline Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& grad, const Eigen::MatrixXd& pre) {
  return grad.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
}

inline Eigen::Map<Eigen::MatrixXd> grad_view(std::vector<double>& g,
                                             const ParamLayout::Slice& s) {
  return {g.data() + s.offset, s.rows, s.cols};
}

// One directional pass: which side is the source, and its intermediates.
struct PassCache {
  bool var_to_cons = true;
  Eigen::MatrixXd src_proj;  // P * H_src
  Eigen::MatrixXd edge_pre;  // pre-activation per edge
  Eigen::MatrixXd agg;       // mean message per target
  Eigen::MatrixXd pre;       // target pre-activation
};

}  // namespace detail

/// Everything the backward pass needs from one forward evaluation.
struct ForwardCache {
  Eigen::MatrixXd var_in;   // 2 x n
  Eigen::MatrixXd cons_in;  // 1 x m
  std::vector<double> edge_in;
  std::vector<int> edge_var, edge_cons;
  std::vector<double> var_deg_inv, cons_deg_inv;

  Eigen::MatrixXd var_pre0, cons_pre0;
  // hv[0], hw[0] are the embeddings; the pass k output is stored in the
  // target side's next slot.
  std::vector<Eigen::MatrixXd> hv, hw;
  std::array<detail::PassCache, kNumPasses> passes;
  Eigen::MatrixXd head_pre;  // h x n
  Eigen::MatrixXd head_hidden;
  Eigen::RowVectorXd logits;
  std::vector<double> pred;
};

namespace detail {

inline void check_sizes(const BipartiteGraph& g, const std::vector<double>& z) {
  if (static_cast<int>(z.size()) != g.num_vars()) {
    throw std::invalid_argument("forward: z has length " + std::to_string(z.size()) +
                                ", graph has " + std::to_string(g.num_vars()) + " variables");
  }
}

}  // namespace detail

inline void forward(const GnnModel& model, const BipartiteGraph& g, const std::vector<double>& z,
                    ForwardCache& fc) {
  detail::check_sizes(g, z);
  const ParamLayout& L = model.layout();
  const FeatureScaler& sc = model.scaler();
  const int n = g.num_vars();
  const int m = g.num_cons();
  const int ne = g.num_edges();

  fc.var_in.resize(2, n);
  for (int j = 0; j < n; ++j) {
    fc.var_in(0, j) = (g.var_feats()[j] - sc.c_mean) / sc.c_std;
    fc.var_in(1, j) = (z[j] - sc.z_mean) / sc.z_std;
  }
  fc.cons_in.resize(1, m);
  for (int i = 0; i < m; ++i) fc.cons_in(0, i) = (g.cons_feats()[i] - sc.b_mean) / sc.b_std;
  fc.edge_in.resize(ne);
  fc.edge_var.resize(ne);
  fc.edge_cons.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = g.edges()[e];
    fc.edge_in[e] = (ed.weight - sc.a_mean) / sc.a_std;
    fc.edge_var[e] = ed.var;
    fc.edge_cons[e] = ed.cons;
  }
  fc.var_deg_inv.assign(n, 0.0);
  fc.cons_deg_inv.assign(m, 0.0);
  for (int j = 0; j < n; ++j) {
    const auto d = g.var_adjacency(j).size();
    if (d) fc.var_deg_inv[j] = 1.0 / static_cast<double>(d);
  }
  for (int i = 0; i < m; ++i) {
    const auto d = g.cons_adjacency(i).size();
    if (d) fc.cons_deg_inv[i] = 1.0 / static_cast<double>(d);
  }

  fc.var_pre0 = model.view(L.embed_var_w) * fc.var_in;
  fc.var_pre0.colwise() += model.view(L.embed_var_b).col(0);
  fc.cons_pre0 = model.view(L.embed_cons_w) * fc.cons_in;
  fc.cons_pre0.colwise() += model.view(L.embed_cons_b).col(0);
  fc.hv.assign(1, detail::relu(fc.var_pre0));
  fc.hw.assign(1, detail::relu(fc.cons_pre0));

  for (int k = 0; k < kNumPasses; ++k) {
    const auto& P = L.passes[k];
    auto& pc = fc.passes[k];
    pc.var_to_cons = (k % 2 == 0);
    const Eigen::MatrixXd& src = pc.var_to_cons ? fc.hv.back() : fc.hw.back();
    const Eigen::MatrixXd& tgt = pc.var_to_cons ? fc.hw.back() : fc.hv.back();
    const std::vector<int>& src_of = pc.var_to_cons ? fc.edge_var : fc.edge_cons;
    const std::vector<int>& tgt_of = pc.var_to_cons ? fc.edge_cons : fc.edge_var;
    const std::vector<double>& deg_inv = pc.var_to_cons ? fc.cons_deg_inv : fc.var_deg_inv;
    const int h = L.hidden;

    pc.src_proj = model.view(P.msg_w) * src;
    const auto q = model.view(P.msg_edge).col(0);
    const auto r = model.view(P.msg_bias).col(0);
    pc.edge_pre.resize(h, ne);
    pc.agg = Eigen::MatrixXd::Zero(h, tgt.cols());
    for (int e = 0; e < ne; ++e) {
      pc.edge_pre.col(e) = pc.src_proj.col(src_of[e]) + fc.edge_in[e] * q + r;
      pc.agg.col(tgt_of[e]) += pc.edge_pre.col(e).cwiseMax(0.0);
    }
    for (int t = 0; t < pc.agg.cols(); ++t) pc.agg.col(t) *= deg_inv[t];
    pc.pre = model.view(P.self_w) * tgt + model.view(P.agg_w) * pc.agg;
    pc.pre.colwise() += model.view(P.bias).col(0);
    if (pc.var_to_cons) {
      fc.hw.push_back(detail::relu(pc.pre));
    } else {
      fc.hv.push_back(detail::relu(pc.pre));
    }
  }

  fc.head_pre = model.view(L.head_w1) * fc.hv.back();
  fc.head_pre.colwise() += model.view(L.head_b1).col(0);
  fc.head_hidden = detail::relu(fc.head_pre);
  fc.logits = model.view(L.head_w2).col(0).transpose() * fc.head_hidden;
  fc.logits.array() += model.view(L.head_b2)(0, 0);
  fc.pred.resize(n);
  for (int j = 0; j < n; ++j) fc.pred[j] = 1.0 / (1.0 + std::exp(-fc.logits(j)));
}

/// Predicted probabilities, one per variable.
inline std::vector<double> forward(const GnnModel& model, const BipartiteGraph& g,
                                   const std::vector<double>& z) {
  ForwardCache fc;
  forward(model, g, z, fc);
  return fc.pred;
}

inline std::vector<double> forward(const GnnModel& model, const BipartiteGraph& g,
                                   const AugmentedFeature& z) {
  return forward(model, g, z.z);
}

/// Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps].
inline double bce_loss(std::span<const double> pred, std::span<const double> label) {
  if (pred.size() != label.size()) throw std::invalid_argument("bce_loss: length mismatch");
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const double p = std::clamp(pred[j], kProbClamp, 1.0 - kProbClamp);
    s -= label[j] * std::log(p) + (1.0 - label[j]) * std::log(1.0 - p);
  }
  return s / static_cast<double>(pred.size());
}

inline double bce_loss(const std::vector<double>& pred, const std::vector<double>& label) {
  return bce_loss(std::span<const double>(pred), std::span<const double>(label));
}

/// Adds weight * d(bce_loss)/d(params) to `grad` for the forward pass in `fc`.
inline void backward(const GnnModel& model, const ForwardCache& fc,
                     std::span<const double> label, double weight, std::vector<double>& grad) {
  const ParamLayout& L = model.layout();
  if (grad.size() != model.num_params()) grad.assign(model.num_params(), 0.0);
  const int n = static_cast<int>(fc.pred.size());
  if (static_cast<int>(label.size()) != n) throw std::invalid_argument("backward: label length");
  const int ne = static_cast<int>(fc.edge_in.size());

  // d loss / d logit; zero where the clamp is active.
  Eigen::RowVectorXd dlogit(n);
  for (int j = 0; j < n; ++j) {
    const double p = fc.pred[j];
    const bool clamped = p < kProbClamp || p > 1.0 - kProbClamp;
    dlogit(j) = clamped ? 0.0 : weight * (p - label[j]) / n;
  }

  detail::grad_view(grad, L.head_w2).col(0) += fc.head_hidden * dlogit.transpose();
  detail::grad_view(grad, L.head_b2)(0, 0) += dlogit.sum();
  Eigen::MatrixXd dhead = model.view(L.head_w2).col(0) * dlogit;
  dhead = detail::relu_backward(dhead, fc.head_pre);
  detail::grad_view(grad, L.head_w1) += dhead * fc.hv.back().transpose();
  detail::grad_view(grad, L.head_b1).col(0) += dhead.rowwise().sum();

  std::vector<Eigen::MatrixXd> dhv(fc.hv.size()), dhw(fc.hw.size());
  for (std::size_t k = 0; k < fc.hv.size(); ++k) dhv[k] = Eigen::MatrixXd::Zero(fc.hv[k].rows(), fc.hv[k].cols());
  for (std::size_t k = 0; k < fc.hw.size(); ++k) dhw[k] = Eigen::MatrixXd::Zero(fc.hw[k].rows(), fc.hw[k].cols());
  dhv.back() += model.view(L.head_w1).transpose() * dhead;

  // Pass k reads the source at index src_idx and the target at k / 2, and
  // writes the target side's slot k / 2 + 1.
  for (int k = kNumPasses - 1; k >= 0; --k) {
    const auto& P = L.passes[k];
    const auto& pc = fc.passes[k];
    const int src_idx = pc.var_to_cons ? k / 2 : (k + 1) / 2;
    const int tgt_idx = k / 2;
    const Eigen::MatrixXd& src = pc.var_to_cons ? fc.hv[src_idx] : fc.hw[src_idx];
    const Eigen::MatrixXd& tgt = pc.var_to_cons ? fc.hw[tgt_idx] : fc.hv[tgt_idx];
    Eigen::MatrixXd& dout = pc.var_to_cons ? dhw[tgt_idx + 1] : dhv[tgt_idx + 1];
    Eigen::MatrixXd& dsrc = pc.var_to_cons ? dhv[src_idx] : dhw[src_idx];
    Eigen::MatrixXd& dtgt = pc.var_to_cons ? dhw[tgt_idx] : dhv[tgt_idx];
    const std::vector<int>& src_of = pc.var_to_cons ? fc.edge_var : fc.edge_cons;
    const std::vector<int>& tgt_of = pc.var_to_cons ? fc.edge_cons : fc.edge_var;
    const std::vector<double>& deg_inv = pc.var_to_cons ? fc.cons_deg_inv : fc.var_deg_inv;

    const Eigen::MatrixXd dpre = detail::relu_backward(dout, pc.pre);
    detail::grad_view(grad, P.self_w) += dpre * tgt.transpose();
    detail::grad_view(grad, P.agg_w) += dpre * pc.agg.transpose();
    detail::grad_view(grad, P.bias).col(0) += dpre.rowwise().sum();
    dtgt += model.view(P.self_w).transpose() * dpre;
    const Eigen::MatrixXd dagg = model.view(P.agg_w).transpose() * dpre;

    Eigen::MatrixXd dproj = Eigen::MatrixXd::Zero(pc.src_proj.rows(), pc.src_proj.cols());
    auto dq = detail::grad_view(grad, P.msg_edge).col(0);
    auto dr = detail::grad_view(grad, P.msg_bias).col(0);
    for (int e = 0; e < ne; ++e) {
      const int t = tgt_of[e];
      const Eigen::VectorXd dedge =
          (dagg.col(t) * deg_inv[t]).cwiseProduct((pc.edge_pre.col(e).array() > 0.0).cast<double>().matrix());
      dq += fc.edge_in[e] * dedge;
      dr += dedge;
      dproj.col(src_of[e]) += dedge;
    }
    detail::grad_view(grad, P.msg_w) += dproj * src.transpose();
    dsrc += model.view(P.msg_w).transpose() * dproj;
  }

  const Eigen::MatrixXd dvar0 = detail::relu_backward(dhv[0], fc.var_pre0);
  detail::grad_view(grad, L.embed_var_w) += dvar0 * fc.var_in.transpose();
  detail::grad_view(grad, L.embed_var_b).col(0) += dvar0.rowwise().sum();
  const Eigen::MatrixXd dcons0 = detail::relu_backward(dhw[0], fc.cons_pre0);
  detail::grad_view(grad, L.embed_cons_w) += dcons0 * fc.cons_in.transpose();
  detail::grad_view(grad, L.embed_cons_b).col(0) += dcons0.rowwise().sum();
}

/// Forward + backward for one sample; returns the sample loss and adds
/// weight * gradient into `grad`.
inline double accumulate_gradient(const GnnModel& model, const BipartiteGraph& g,
                                  const std::vector<double>& z, const std::vector<double>& label,
                                  double weight, std::vector<double>& grad, ForwardCache& fc) {
  forward(model, g, z, fc);
  backward(model, fc, label, weight, grad);
  return bce_loss(fc.pred, label);
}

/// One (graph, z, label) training or evaluation example.
struct TrainingSample {
  std::shared_ptr<const BipartiteGraph> graph;
  AugmentedFeature z;
  std::vector<double> label;
  int instance_id = 0;
  int sample_id = 0;
};

// ---------------------------------------------------------------------------
// Checkpoints: binary header + little-endian float64 parameters, with a JSON
// sidecar for metadata and feature statistics.
// ---------------------------------------------------------------------------

inline constexpr char kCheckpointMagic[8] = {'S', 'Y', 'M', 'A', 'U', 'G', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes{};
  if (!is.read(bytes.data(), sizeof(T))) throw ParseError("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace detail

inline void write_checkpoint_binary(std::ostream& os, const GnnModel& model, std::uint64_t seed) {
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::write_le<std::uint32_t>(os, kCheckpointVersion);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.hidden()));
  detail::write_le<std::uint64_t>(os, model.num_params());
  detail::write_le<std::uint64_t>(os, seed);
  for (double p : model.params()) detail::write_le<double>(os, p);
}

/// Reads a checkpoint written by write_checkpoint_binary; returns the seed.
inline std::uint64_t read_checkpoint_binary(std::istream& is, GnnModel& model) {
  char magic[sizeof(kCheckpointMagic)];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ParseError("checkpoint: bad magic");
  }
  const auto version = detail::read_le<std::uint32_t>(is);
  if (version != kCheckpointVersion) throw ParseError("checkpoint: unsupported version");
  const auto hidden = detail::read_le<std::uint32_t>(is);
  const auto count = detail::read_le<std::uint64_t>(is);
  const auto seed = detail::read_le<std::uint64_t>(is);
  GnnModel loaded(static_cast<int>(hidden));
  if (loaded.num_params() != count) throw ParseError("checkpoint: parameter count mismatch");
  for (double& p : loaded.params()) p = detail::read_le<double>(is);
  loaded.scaler() = model.scaler();
  model = std::move(loaded);
  return seed;
}

}  // namespace symaug

#endif  // SYMAUG_GNN_HPP_
