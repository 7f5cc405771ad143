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

// Experiment pipeline: generate -> detect -> augment -> train -> evaluate.
//
// The in-memory half (prepare_dataset, train_run, evaluate_run) is what the
// tests drive. The cmd_* functions persist every stage under one output
// directory:
//
//   manifest.json                 instances, labels, sidecars, split
//   instances/bpp_NNNN.json       normalized instance
//   labels/bpp_NNNN.sol.json      optimal solution
//   symmetry/bpp_NNNN.sym.json    generators, orbits, linked blocks
//   detect_timing.csv             n, log10|G|, seconds
//   checkpoints/<scheme>_r<k>.bin (+ .json metadata sidecar)
//   curves/<scheme>_r<k>.csv      epoch, train_loss, val_loss, relabeled
//   samples/<scheme>_r<k>.json    z draws per (instance, sample)
//   metrics.csv                   one row per (instance, scheme, run)
//   table.md                      mean Top-m% errors per scheme

#ifndef SYMAUG_EXPERIMENT_HPP_
#define SYMAUG_EXPERIMENT_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "symaug/augmentation.hpp"
#include "symaug/bipartite.hpp"
#include "symaug/datagen.hpp"
#include "symaug/gnn.hpp"
#include "symaug/ilp_model.hpp"
#include "symaug/metrics.hpp"
#include "symaug/rng.hpp"
#include "symaug/symmetry.hpp"
#include "symaug/train.hpp"

namespace symaug {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvariant = 2, kExitBudget = 3 };

/// Raised when a stored artifact or a computed result breaks an invariant.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  BppConfig bpp;  // bpp.seed is overwritten by `seed`
  std::vector<Scheme> schemes = {Scheme::kNoAug, Scheme::kUniform, Scheme::kPosition,
                                 Scheme::kOrbit, Scheme::kOrbitPlus};
  int runs = 3;
  std::uint64_t seed = 0;
  int epochs = 30;
  int batch_size = 8;
  double lr = 1e-3;
  int samples_per_instance = 8;
  double train_frac = 0.6;
  int hidden = 32;
  bool align = true;
  std::int64_t detect_node_budget = 1'000'000;
  std::int64_t solver_node_budget = 50'000'000;
  double solver_time_limit = 60.0;
  std::string out = "symaug_out";

  void validate() const {
    bpp.validate();
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(lr >= 0.0)) throw std::invalid_argument("lr must be >= 0");
    if (samples_per_instance < 1) throw std::invalid_argument("samples_per_instance must be >= 1");
    if (!(train_frac > 0.0 && train_frac <= 1.0)) {
      throw std::invalid_argument("train_frac must be in (0, 1]");
    }
    if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
  }
};

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json schemes = nlohmann::json::array();
  for (Scheme s : c.schemes) schemes.push_back(to_string(s));
  return {{"bpp", bpp_config_to_json(c.bpp)},
          {"schemes", schemes},
          {"runs", c.runs},
          {"seed", c.seed},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.lr},
          {"samples_per_instance", c.samples_per_instance},
          {"train_frac", c.train_frac},
          {"hidden", c.hidden},
          {"align", c.align},
          {"detect_node_budget", c.detect_node_budget},
          {"solver_node_budget", c.solver_node_budget},
          {"solver_time_limit", c.solver_time_limit},
          {"out", c.out}};
}

/// Overlays the keys present in `j` onto `base`; unknown keys are an error.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    ExperimentConfig base = {}) {
  static const std::vector<std::string> known = {
      "bpp",   "schemes",    "runs",  "seed",  "epochs",
      "batch_size", "lr",    "samples_per_instance", "train_frac", "hidden",
      "align", "detect_node_budget", "solver_node_budget", "solver_time_limit", "out"};
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (j.contains("bpp")) base.bpp = bpp_config_from_json(j.at("bpp"), base.bpp);
  if (j.contains("schemes")) {
    base.schemes.clear();
    for (const auto& s : j.at("schemes")) base.schemes.push_back(scheme_from_string(s));
  }
  base.runs = j.value("runs", base.runs);
  base.seed = j.value("seed", base.seed);
  base.epochs = j.value("epochs", base.epochs);
  base.batch_size = j.value("batch_size", base.batch_size);
  base.lr = j.value("lr", base.lr);
  base.samples_per_instance = j.value("samples_per_instance", base.samples_per_instance);
  base.train_frac = j.value("train_frac", base.train_frac);
  base.hidden = j.value("hidden", base.hidden);
  base.align = j.value("align", base.align);
  base.detect_node_budget = j.value("detect_node_budget", base.detect_node_budget);
  base.solver_node_budget = j.value("solver_node_budget", base.solver_node_budget);
  base.solver_time_limit = j.value("solver_time_limit", base.solver_time_limit);
  base.out = j.value("out", base.out);
  return base;
}

/// Named bundles of defaults. "desk" is the built-in default.
inline ExperimentConfig apply_profile(ExperimentConfig c, const std::string& profile) {
  if (profile == "desk" || profile.empty()) return c;
  if (profile == "smoke") {
    c.bpp.count = 20;
    c.epochs = 10;
    c.schemes = {Scheme::kNoAug, Scheme::kOrbit};
    return c;
  }
  throw std::invalid_argument("unknown profile '" + profile + "'");
}

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Hash of everything that determines a trained model.
inline std::string training_config_hash(const ExperimentConfig& c) {
  nlohmann::json j = experiment_config_to_json(c);
  j.erase("out");
  j.erase("schemes");
  j.erase("runs");
  return fnv1a_hex(j.dump());
}

// ---------------------------------------------------------------------------
// In-memory pipeline
// ---------------------------------------------------------------------------

struct Dataset {
  std::vector<BppInstance> items;
  std::vector<DetectionResult> detections;
  std::vector<std::shared_ptr<const BipartiteGraph>> graphs;
  std::vector<SymmetricLabelAligner> aligners;
  std::vector<int> train_ids, val_ids;  // positions in `items`

  std::vector<double> label(int k) const {
    const auto& v = items[k].solution.values;
    return {v.begin(), v.end()};
  }
};

/// Builds graphs, aligners and the split once instances and detections exist.
inline void finalize_dataset(Dataset& ds, const ExperimentConfig& cfg) {
  ds.graphs.clear();
  ds.aligners.clear();
  for (std::size_t k = 0; k < ds.items.size(); ++k) {
    ds.graphs.push_back(std::make_shared<const BipartiteGraph>(to_bipartite(ds.items[k].instance)));
    ds.aligners.emplace_back(ds.items[k].instance, ds.detections[k], ds.label(static_cast<int>(k)),
                             AlignOptions{.seed = derive_seed(cfg.seed, SeedPurpose::kAlign, k)});
  }
  if (!ds.items.empty()) {
    std::tie(ds.train_ids, ds.val_ids) =
        split_dataset(static_cast<int>(ds.items.size()), cfg.train_frac, cfg.seed);
  }
}

inline Dataset prepare_dataset(const ExperimentConfig& cfg, GenStats* stats = nullptr) {
  BppConfig bpp = cfg.bpp;
  bpp.seed = cfg.seed;
  Dataset ds;
  ds.items = gen_bpp(bpp, {cfg.solver_time_limit, cfg.solver_node_budget}, stats);
  for (const auto& b : ds.items) {
    ds.detections.push_back(detect_symmetry(b.instance, {cfg.detect_node_budget}));
  }
  finalize_dataset(ds, cfg);
  return ds;
}

/// Seed of the z draw for (instance, sample) in a given run.
inline std::uint64_t augment_seed(std::uint64_t root, int run, int instance, int sample) {
  return derive_seed(root, SeedPurpose::kAugment, static_cast<std::uint64_t>(instance),
                     (static_cast<std::uint64_t>(run) << 32) | static_cast<std::uint32_t>(sample));
}

inline std::vector<TrainingSample> make_samples(const Dataset& ds, const std::vector<int>& ids,
                                                Scheme scheme, int per_instance,
                                                std::uint64_t root, int run) {
  std::vector<TrainingSample> out;
  for (int k : ids) {
    const DetectionResult& det = ds.detections[k];
    for (int s = 0; s < per_instance; ++s) {
      TrainingSample ts;
      ts.graph = ds.graphs[k];
      ts.z = augment(scheme, &det.orbits, &det.blocks, ds.graphs[k]->num_vars(),
                     augment_seed(root, run, k, s));
      ts.label = ds.label(k);
      ts.instance_id = k;
      ts.sample_id = s;
      out.push_back(std::move(ts));
    }
  }
  return out;
}

inline TrainConfig train_config_for(const ExperimentConfig& cfg, int run) {
  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.adam.lr = cfg.lr;
  tc.hidden = cfg.hidden;
  tc.seed = derive_seed(cfg.seed, SeedPurpose::kInit, static_cast<std::uint64_t>(run));
  tc.align = cfg.align;
  return tc;
}

inline TrainResult train_run(const Dataset& ds, const ExperimentConfig& cfg, Scheme scheme,
                             int run,
                             const std::function<void(const EpochMetrics&)>& on_epoch = {}) {
  auto train_set =
      make_samples(ds, ds.train_ids, scheme, cfg.samples_per_instance, cfg.seed, run);
  auto val_set = make_samples(ds, ds.val_ids, scheme, 1, cfg.seed, run);
  return train(std::move(train_set), std::move(val_set), ds.aligners, train_config_for(cfg, run),
               on_epoch);
}

struct EvalRow {
  int instance = 0;  // position in the dataset
  Scheme scheme = Scheme::kNoAug;
  int run = 0;
  InstanceEval eval;
};

/// Scores the model on the validation split, one z draw per instance (the
/// same draw the trainer validated on).
inline std::vector<EvalRow> evaluate_run(const Dataset& ds, const GnnModel& model,
                                         const ExperimentConfig& cfg, Scheme scheme, int run) {
  std::vector<EvalRow> rows;
  const auto samples = make_samples(ds, ds.val_ids, scheme, 1, cfg.seed, run);
  ForwardCache fc;
  for (const TrainingSample& s : samples) {
    forward(model, *s.graph, s.z.z, fc);
    const int k = s.instance_id;
    rows.push_back({k, scheme, run,
                    evaluate_prediction(ds.items[k].instance, ds.aligners[k], ds.label(k),
                                        fc.pred)});
  }
  return rows;
}

struct SchemeSummary {
  Scheme scheme = Scheme::kNoAug;
  std::array<double, kTopMPercents.size()> top_m{};
  double violation = 0.0;
  double best_val_loss = 0.0;  // mean over runs
  int rows = 0;
  int runs = 0;
};

/// Means over all rows (instances x runs) of each scheme, in `schemes` order.
inline std::vector<SchemeSummary> summarize(const std::vector<Scheme>& schemes,
                                            const std::vector<EvalRow>& rows,
                                            const std::map<std::pair<Scheme, int>, double>& val_loss) {
  std::vector<SchemeSummary> out;
  for (Scheme s : schemes) {
    SchemeSummary sum;
    sum.scheme = s;
    for (const EvalRow& r : rows) {
      if (r.scheme != s) continue;
      for (std::size_t k = 0; k < kTopMPercents.size(); ++k) sum.top_m[k] += r.eval.top_m[k];
      sum.violation += r.eval.violation;
      ++sum.rows;
    }
    if (sum.rows > 0) {
      for (double& v : sum.top_m) v /= sum.rows;
      sum.violation /= sum.rows;
    }
    for (const auto& [key, loss] : val_loss) {
      if (key.first != s) continue;
      sum.best_val_loss += loss;
      ++sum.runs;
    }
    if (sum.runs > 0) sum.best_val_loss /= sum.runs;
    out.push_back(sum);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

inline void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string run_name(Scheme s, int run) { return to_string(s) + "_r" + std::to_string(run); }

inline std::string instance_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "bpp_%04d", index);
  return buf;
}

inline fs::path manifest_path(const ExperimentConfig& cfg) { return fs::path(cfg.out) / "manifest.json"; }

/// Writes instances, labels and the manifest. Returns kExitBudget if any
/// instance was skipped because the solver ran out of budget.
inline int cmd_gen(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  cfg.validate();
  const fs::path root(cfg.out);
  GenStats stats;
  BppConfig bpp = cfg.bpp;
  bpp.seed = cfg.seed;
  const auto items = gen_bpp(bpp, {cfg.solver_time_limit, cfg.solver_node_budget}, &stats);

  nlohmann::json entries = nlohmann::json::array();
  std::vector<int> train_ids, val_ids;
  if (!items.empty()) {
    std::tie(train_ids, val_ids) =
        split_dataset(static_cast<int>(items.size()), cfg.train_frac, cfg.seed);
  }
  std::vector<std::string> split(items.size(), "val");
  for (int k : train_ids) split[k] = "train";
  for (std::size_t k = 0; k < items.size(); ++k) {
    const BppInstance& b = items[k];
    const std::string stem = instance_stem(b.index);
    nlohmann::json inst = instance_to_json(b.instance);
    inst["bpp_sizes"] = b.sizes;
    write_file_atomic(root / "instances" / (stem + ".json"), inst.dump(1) + "\n");
    write_file_atomic(root / "labels" / (stem + ".sol.json"),
                      solution_to_json(b.solution).dump() + "\n");
    entries.push_back({{"index", b.index},
                       {"instance", "instances/" + stem + ".json"},
                       {"label", "labels/" + stem + ".sol.json"},
                       {"symmetry", "symmetry/" + stem + ".sym.json"},
                       {"split", split[k]}});
  }
  nlohmann::json manifest = {{"format", "symaug-dataset"},
                             {"version", 1},
                             {"seed", cfg.seed},
                             {"train_frac", cfg.train_frac},
                             {"bpp", bpp_config_to_json(bpp)},
                             {"instances", entries}};
  write_file_atomic(manifest_path(cfg), manifest.dump(2) + "\n");
  log << "gen: " << items.size() << " instances written to " << root.string();
  if (stats.skipped > 0) log << " (" << stats.skipped << " skipped on solver budget)";
  log << "\n";
  return stats.skipped > 0 ? kExitBudget : kExitOk;
}

struct ManifestEntry {
  int index = 0;
  fs::path instance, label, symmetry;
  bool train = false;
};

inline std::vector<ManifestEntry> read_manifest(const ExperimentConfig& cfg) {
  const fs::path mp = manifest_path(cfg);
  if (!fs::exists(mp)) throw std::runtime_error("missing manifest " + mp.string());
  const nlohmann::json m = read_json(mp);
  std::vector<ManifestEntry> out;
  try {
    for (const auto& e : m.at("instances")) {
      ManifestEntry me;
      me.index = e.at("index").get<int>();
      me.instance = fs::path(cfg.out) / e.at("instance").get<std::string>();
      me.label = fs::path(cfg.out) / e.at("label").get<std::string>();
      me.symmetry = fs::path(cfg.out) / e.at("symmetry").get<std::string>();
      me.train = e.at("split").get<std::string>() == "train";
      out.push_back(std::move(me));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest: " + std::string(e.what()));
  }
  return out;
}

inline void write_timing_csv(const ExperimentConfig& cfg, const std::vector<ManifestEntry>& entries,
                             const std::vector<int>& nvars,
                             const std::vector<DetectionResult>& dets) {
  std::string csv = "instance,n,log10_order,seconds,partial\n";
  for (std::size_t k = 0; k < entries.size(); ++k) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%d\n",
                  entries[k].instance.stem().string().c_str(), nvars[k],
                  dets[k].gens.log10_order, dets[k].detect_seconds, dets[k].partial ? 1 : 0);
    csv += buf;
  }
  write_file_atomic(fs::path(cfg.out) / "detect_timing.csv", csv);
}

/// Detects symmetry for every manifest instance lacking a sidecar. Existing
/// sidecars are loaded and checked, not recomputed.
inline int cmd_detect(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  const auto entries = read_manifest(cfg);
  std::vector<int> nvars;
  std::vector<DetectionResult> dets;
  int computed = 0, partial = 0;
  for (const ManifestEntry& e : entries) {
    const IlpInstance inst = instance_from_json(read_json(e.instance));
    DetectionResult det;
    if (fs::exists(e.symmetry)) {
      det = detection_from_json(read_json(e.symmetry), inst.num_vars());
    } else {
      det = detect_symmetry(inst, {cfg.detect_node_budget});
      for (const Generator& g : det.gens.generators) {
        if (!verify_symmetry(inst, g.pi, g.sigma)) {
          throw InvariantViolation("detect: generator of " + e.instance.string() +
                                   " is not a formulation symmetry");
        }
      }
      write_file_atomic(e.symmetry, detection_to_json(det).dump() + "\n");
      ++computed;
    }
    if (det.partial) ++partial;
    nvars.push_back(inst.num_vars());
    dets.push_back(std::move(det));
  }
  write_timing_csv(cfg, entries, nvars, dets);
  log << "detect: " << computed << " computed, " << entries.size() - computed
      << " already present";
  if (partial > 0) log << ", " << partial << " partial (node budget)";
  log << "\n";
  return partial > 0 ? kExitBudget : kExitOk;
}

/// Loads instances, labels and sidecars; runs gen/detect first if their
/// outputs are missing.
inline Dataset load_dataset(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  if (!fs::exists(manifest_path(cfg))) cmd_gen(cfg, log);
  auto entries = read_manifest(cfg);
  bool need_detect = false;
  for (const auto& e : entries) need_detect = need_detect || !fs::exists(e.symmetry);
  if (need_detect) cmd_detect(cfg, log);

  Dataset ds;
  for (const ManifestEntry& e : entries) {
    const nlohmann::json ij = read_json(e.instance);
    BppInstance b;
    b.index = e.index;
    b.instance = instance_from_json(ij);
    if (ij.contains("bpp_sizes")) b.sizes = ij.at("bpp_sizes").get<std::vector<int>>();
    b.solution = solution_from_json(read_json(e.label));
    if (static_cast<int>(b.solution.values.size()) != b.instance.num_vars()) {
      throw InvariantViolation("label size mismatch for " + e.instance.string());
    }
    ds.detections.push_back(detection_from_json(read_json(e.symmetry), b.instance.num_vars()));
    ds.items.push_back(std::move(b));
  }
  finalize_dataset(ds, cfg);
  // The manifest's split is authoritative.
  ds.train_ids.clear();
  ds.val_ids.clear();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    (entries[k].train ? ds.train_ids : ds.val_ids).push_back(static_cast<int>(k));
  }
  return ds;
}

inline fs::path checkpoint_path(const ExperimentConfig& cfg, Scheme s, int run) {
  return fs::path(cfg.out) / "checkpoints" / (run_name(s, run) + ".bin");
}

inline void save_checkpoint(const ExperimentConfig& cfg, Scheme s, int run,
                            const TrainResult& res) {
  const fs::path bin = checkpoint_path(cfg, s, run);
  std::ostringstream os(std::ios::binary);
  write_checkpoint_binary(os, res.model, train_config_for(cfg, run).seed);
  write_file_atomic(bin, os.str());
  nlohmann::json meta = {{"scheme", to_string(s)},
                         {"run", run},
                         {"hidden", res.model.hidden()},
                         {"epoch", res.best_epoch},
                         {"val_loss", res.best_val_loss},
                         {"config_hash", training_config_hash(cfg)},
                         {"scaler", res.model.scaler().to_json()}};
  fs::path side = bin;
  side.replace_extension(".json");
  write_file_atomic(side, meta.dump(2) + "\n");

  std::string csv = "epoch,train_loss,val_loss,relabeled\n";
  for (const EpochMetrics& em : res.curve) {
    csv += std::to_string(em.epoch) + "," + fmt_num(em.train_loss) + "," + fmt_num(em.val_loss) +
           "," + std::to_string(em.relabeled) + "\n";
  }
  write_file_atomic(fs::path(cfg.out) / "curves" / (run_name(s, run) + ".csv"), csv);
}

struct LoadedCheckpoint {
  GnnModel model;
  double val_loss = 0.0;
};

/// nullopt if absent or trained under a different configuration.
inline std::optional<LoadedCheckpoint> load_checkpoint(const ExperimentConfig& cfg, Scheme s,
                                                       int run) {
  const fs::path bin = checkpoint_path(cfg, s, run);
  fs::path side = bin;
  side.replace_extension(".json");
  if (!fs::exists(bin) || !fs::exists(side)) return std::nullopt;
  const nlohmann::json meta = read_json(side);
  if (meta.value("config_hash", std::string()) != training_config_hash(cfg)) return std::nullopt;
  LoadedCheckpoint lc{GnnModel(meta.at("hidden").get<int>()), meta.at("val_loss").get<double>()};
  lc.model.scaler() = FeatureScaler::from_json(meta.at("scaler"));
  std::ifstream is(bin, std::ios::binary);
  read_checkpoint_binary(is, lc.model);
  return lc;
}

/// Records the z draws of one (scheme, run) as samples/<scheme>_r<k>.json.
inline void write_samples(const ExperimentConfig& cfg, const Dataset& ds, Scheme s, int run) {
  auto dump = [&](const std::vector<int>& ids, int per_instance) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TrainingSample& t : make_samples(ds, ids, s, per_instance, cfg.seed, run)) {
      arr.push_back({{"instance", instance_stem(ds.items[t.instance_id].index)},
                     {"sample", t.sample_id},
                     {"augmentation", augmentation_to_json(t.z)}});
    }
    return arr;
  };
  const nlohmann::json j = {{"scheme", to_string(s)},
                            {"run", run},
                            {"train", dump(ds.train_ids, cfg.samples_per_instance)},
                            {"val", dump(ds.val_ids, 1)}};
  write_file_atomic(fs::path(cfg.out) / "samples" / (run_name(s, run) + ".json"), j.dump() + "\n");
}

inline int cmd_train(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  cfg.validate();
  if (cfg.schemes.empty()) throw std::invalid_argument("train: empty scheme list");
  const Dataset ds = load_dataset(cfg, log);
  if (ds.train_ids.empty()) throw std::invalid_argument("train: dataset has no instances");
  for (Scheme s : cfg.schemes) {
    for (int r = 0; r < cfg.runs; ++r) {
      const TrainResult res = train_run(ds, cfg, s, r);
      save_checkpoint(cfg, s, r, res);
      write_samples(cfg, ds, s, r);
      log << "train: " << run_name(s, r) << " best epoch " << res.best_epoch << " val loss "
          << fmt_num(res.best_val_loss) << "\n";
    }
  }
  return kExitOk;
}

inline std::string metrics_csv(const std::vector<EvalRow>& rows, const Dataset& ds) {
  std::string csv = "instance,scheme,seed,m30,m50,m70,m90,violation,exact_alignment\n";
  for (const EvalRow& r : rows) {
    csv += instance_stem(ds.items[r.instance].index) + "," + to_string(r.scheme) + "," +
           std::to_string(r.run);
    for (double v : r.eval.top_m) csv += "," + fmt_num(v);
    csv += "," + fmt_num(r.eval.violation) + "," + (r.eval.exact_alignment ? "1" : "0") + "\n";
  }
  return csv;
}

inline std::string summary_table(const std::vector<SchemeSummary>& sums) {
  auto f2 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  std::string md = "| Scheme | 30% | 50% | 70% | 90% | Violation | Val loss |\n";
  md += "|---|---|---|---|---|---|---|\n";
  for (const SchemeSummary& s : sums) {
    md += "| " + to_string(s.scheme);
    for (double v : s.top_m) md += " | " + f2(v);
    md += " | " + f2(s.violation) + " | " + fmt_num(s.best_val_loss) + " |\n";
  }
  return md;
}

/// Evaluates every (scheme, run) checkpoint, training any that is missing.
inline int cmd_eval(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  cfg.validate();
  if (cfg.schemes.empty()) throw std::invalid_argument("eval: empty scheme list");
  const Dataset ds = load_dataset(cfg, log);
  std::vector<EvalRow> rows;
  std::map<std::pair<Scheme, int>, double> val_loss;
  for (Scheme s : cfg.schemes) {
    for (int r = 0; r < cfg.runs; ++r) {
      auto lc = load_checkpoint(cfg, s, r);
      if (!lc) {
        const TrainResult res = train_run(ds, cfg, s, r);
        save_checkpoint(cfg, s, r, res);
        write_samples(cfg, ds, s, r);
        lc = load_checkpoint(cfg, s, r);
        if (!lc) throw std::runtime_error("eval: checkpoint reload failed");
      }
      val_loss[{s, r}] = lc->val_loss;
      auto part = evaluate_run(ds, lc->model, cfg, s, r);
      for (const EvalRow& row : part) {
        for (std::size_t k = 0; k + 1 < kTopMPercents.size(); ++k) {
          if (!(row.eval.top_m[k] >= 0.0 && row.eval.top_m[k] <= row.eval.top_m[k + 1])) {
            throw InvariantViolation("eval: Top-m% error not monotone in m");
          }
        }
      }
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  write_file_atomic(fs::path(cfg.out) / "metrics.csv", metrics_csv(rows, ds));
  const std::string table = summary_table(summarize(cfg.schemes, rows, val_loss));
  write_file_atomic(fs::path(cfg.out) / "table.md", table);
  log << table;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Property suite over a stored dataset
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

inline std::vector<CheckResult> verify_dataset(const Dataset& ds, std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto check = [&](const std::string& name, auto&& body) {
    CheckResult cr{name, true, {}};
    for (std::size_t k = 0; k < ds.items.size() && cr.ok; ++k) {
      std::string why = body(static_cast<int>(k));
      if (!why.empty()) {
        cr.ok = false;
        cr.detail = instance_stem(ds.items[k].index) + ": " + why;
      }
    }
    out.push_back(cr);
  };

  check("labels feasible and optimal", [&](int k) -> std::string {
    const auto& b = ds.items[k];
    if (b.solution.status != SolveStatus::kOptimal) return "status not optimal";
    const Evaluation ev = evaluate(b.instance, b.solution.values);
    if (ev.violation != 0.0) return "violation " + fmt_num(ev.violation);
    if (ev.objective != b.solution.objective) return "objective mismatch";
    return {};
  });

  check("generators are formulation symmetries", [&](int k) -> std::string {
    for (const Generator& g : ds.detections[k].gens.generators) {
      if (!verify_symmetry(ds.items[k].instance, g.pi, g.sigma)) return "bad generator";
    }
    return {};
  });

  check("orbits partition the variables", [&](int k) -> std::string {
    const auto& orb = ds.detections[k].orbits;
    std::vector<int> seen(ds.items[k].instance.num_vars(), 0);
    for (const auto& o : orb.orbits) {
      for (int v : o) ++seen[v];
    }
    for (int c : seen) {
      if (c != 1) return "variable covered " + std::to_string(c) + " times";
    }
    return {};
  });

  check("bin swaps are symmetries inside the detected group", [&](int k) -> std::string {
    const auto& b = ds.items[k];
    if (b.sizes.empty()) return {};
    const int items = static_cast<int>(b.sizes.size());
    const int bins = b.instance.num_vars() / (items + 1);
    const auto& orb = ds.detections[k].orbits;
    for (int a = 0; a < bins; ++a) {
      for (int c = a + 1; c < bins; ++c) {
        std::vector<int> img(b.instance.num_vars());
        for (int v = 0; v < b.instance.num_vars(); ++v) img[v] = v;
        for (int i = 0; i < items; ++i) {
          std::swap(img[bpp_x_index(i, a, bins)], img[bpp_x_index(i, c, bins)]);
        }
        std::swap(img[bpp_y_index(a, items, bins)], img[bpp_y_index(c, items, bins)]);
        if (!find_constraint_permutation(b.instance, Permutation(img))) {
          return "bin swap " + std::to_string(a) + "<->" + std::to_string(c) + " rejected";
        }
        if (orb.orbit_of[bpp_y_index(a, items, bins)] != orb.orbit_of[bpp_y_index(c, items, bins)]) {
          return "bins not in one orbit";
        }
      }
    }
    if (!ds.detections[k].partial &&
        ds.detections[k].gens.log10_order + 1e-9 < std::lgamma(bins + 1.0) / std::log(10.0)) {
      return "group order below bins!";
    }
    return {};
  });

  check("linked blocks move in lockstep", [&](int k) -> std::string {
    std::vector<Permutation> perms;
    for (const Generator& g : ds.detections[k].gens.generators) perms.push_back(g.pi);
    if (!blocks_are_linked(ds.detections[k].blocks, perms)) return "block not linked";
    return {};
  });

  check("orbit features distinguish and cardinalities order", [&](int k) -> std::string {
    const auto& det = ds.detections[k];
    const int n = ds.items[k].instance.num_vars();
    for (Scheme s : {Scheme::kOrbit, Scheme::kOrbitPlus}) {
      const auto z = augment(s, &det.orbits, &det.blocks, n,
                             derive_seed(seed, SeedPurpose::kTest, k, static_cast<int>(s)));
      if (!check_distinguishability(z.z, det.orbits)) return to_string(s) + " not distinguishing";
    }
    const double cp = space_cardinality_log(Scheme::kPosition, &det.orbits, &det.blocks, n);
    const double co = space_cardinality_log(Scheme::kOrbit, &det.orbits, &det.blocks, n);
    const double cop = space_cardinality_log(Scheme::kOrbitPlus, &det.orbits, &det.blocks, n);
    if (!(cop <= co + 1e-12 && co <= cp + 1e-12)) return "cardinality ordering broken";
    return {};
  });

  GnnModel model;
  model.init(derive_seed(seed, SeedPurpose::kTest, 1));
  check("model equivariant under detected symmetries", [&](int k) -> std::string {
    const auto& det = ds.detections[k];
    const auto& g = *ds.graphs[k];
    const int n = g.num_vars();
    Rng rng(derive_seed(seed, SeedPurpose::kTest, 2, k));
    const auto z = augment(Scheme::kUniform, nullptr, nullptr, n, rng.next());
    // A random group element (product of random generators) and a random
    // relabelling of the whole graph.
    Permutation pi = Permutation::identity(n);
    Permutation sigma = Permutation::identity(g.num_cons());
    for (int s = 0; s < 8 && !det.gens.generators.empty(); ++s) {
      const Generator& gen = det.gens.generators[rng.uniform_index(det.gens.generators.size())];
      pi = pi.compose(gen.pi);
      sigma = sigma.compose(gen.sigma);
    }
    const auto base = forward(model, g, z.z);
    std::vector<int> pr(n), sr(g.num_cons());
    for (int v = 0; v < n; ++v) pr[v] = v;
    for (int c = 0; c < g.num_cons(); ++c) sr[c] = c;
    rng.shuffle(pr);
    rng.shuffle(sr);
    const Permutation rp(pr), rs(sr);
    const auto moved = forward(model, permute(g, rp, rs), permute_vector(rp, z.z));
    const auto expect = permute_vector(rp, base);
    for (int v = 0; v < n; ++v) {
      if (std::abs(moved[v] - expect[v]) > 1e-5) return "equivariance deviation";
    }
    // Group elements leave the graph unchanged.
    if (permute(g, pi, sigma) != g) return "group element changes the graph";
    const auto zero = forward(model, g, std::vector<double>(n, 0.0));
    for (const auto& o : det.orbits.orbits) {
      for (int v : o) {
        if (std::abs(zero[v] - zero[o[0]]) > 1e-6) return "orbit outputs differ with z = 0";
      }
    }
    return {};
  });

  check("aligned labels stay optimal", [&](int k) -> std::string {
    const auto& b = ds.items[k];
    Rng rng(derive_seed(seed, SeedPurpose::kTest, 3, k));
    std::vector<double> pred(b.instance.num_vars());
    for (double& p : pred) p = rng.uniform01();
    const AlignResult al = ds.aligners[k].align(ds.label(k), pred);
    std::vector<std::int64_t> x(al.label.begin(), al.label.end());
    const Evaluation ev = evaluate(b.instance, x);
    if (ev.violation != 0.0 || ev.objective != b.solution.objective) return "alignment broke label";
    if (l1_distance(al.label, pred) > l1_distance(ds.label(k), pred) + 1e-9) {
      return "alignment increased distance";
    }
    for (std::size_t m = 0; m + 1 < kTopMPercents.size(); ++m) {
      if (top_m_error(pred, al.label, kTopMPercents[m]) >
          top_m_error(pred, al.label, kTopMPercents[m + 1])) {
        return "Top-m% error not monotone";
      }
    }
    return {};
  });
  return out;
}

inline int cmd_verify(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  const Dataset ds = load_dataset(cfg, log);
  const auto results = verify_dataset(ds, cfg.seed);
  bool ok = true;
  for (const CheckResult& r : results) {
    log << (r.ok ? "PASS " : "FAIL ") << r.name;
    if (!r.ok) log << " (" << r.detail << ")";
    log << "\n";
    ok = ok && r.ok;
  }
  log << "verify: " << ds.items.size() << " instances, " << (ok ? "all checks passed" : "FAILED")
      << "\n";
  return ok ? kExitOk : kExitInvariant;
}

}  // namespace symaug

#endif  // SYMAUG_EXPERIMENT_HPP_
