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


#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "symaug/experiment.hpp"

namespace symaug {
namespace {

namespace fs = std::filesystem;

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("symaug_exp_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExperimentConfig tiny(const std::string& sub) const {
    ExperimentConfig cfg;
    cfg.bpp.count = 6;
    cfg.epochs = 2;
    cfg.runs = 1;
    cfg.schemes = {Scheme::kNoAug, Scheme::kOrbit};
    cfg.out = (dir_ / sub).string();
    return cfg;
  }

  fs::path dir_;
  std::ostringstream log_;
};

TEST_F(ExperimentTest, ConfigOverlayAndProfiles) {
  const ExperimentConfig base = apply_profile({}, "smoke");
  EXPECT_EQ(base.bpp.count, 20);
  EXPECT_EQ(base.epochs, 10);
  EXPECT_EQ(base.schemes, (std::vector<Scheme>{Scheme::kNoAug, Scheme::kOrbit}));
  const auto cfg = experiment_config_from_json(
      nlohmann::json::parse(R"({"epochs": 4, "bpp": {"capacity": 10}, "schemes": ["orbit+"]})"), base);
  EXPECT_EQ(cfg.epochs, 4);
  EXPECT_EQ(cfg.bpp.capacity, 10);
  EXPECT_EQ(cfg.bpp.count, 20);
  EXPECT_EQ(cfg.schemes, std::vector<Scheme>{Scheme::kOrbitPlus});
  EXPECT_THROW(experiment_config_from_json(nlohmann::json::parse(R"({"epoch": 4})")),
               std::invalid_argument);
  EXPECT_THROW(apply_profile({}, "huge"), std::invalid_argument);
  const auto round = experiment_config_from_json(experiment_config_to_json(cfg));
  EXPECT_EQ(training_config_hash(round), training_config_hash(cfg));
}

TEST_F(ExperimentTest, EmptyGenerationWritesEmptyManifest) {
  ExperimentConfig cfg = tiny("empty");
  cfg.bpp.count = 0;
  EXPECT_EQ(cmd_gen(cfg, log_), kExitOk);
  EXPECT_TRUE(read_manifest(cfg).empty());
}

TEST_F(ExperimentTest, GenIsReproducible) {
  const ExperimentConfig a = tiny("a"), b = tiny("b");
  ASSERT_EQ(cmd_gen(a, log_), kExitOk);
  ASSERT_EQ(cmd_gen(b, log_), kExitOk);
  for (const auto& entry : fs::recursive_directory_iterator(a.out)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a.out);
    EXPECT_EQ(read_file(entry.path()), read_file(fs::path(b.out) / rel)) << rel;
  }
}

TEST_F(ExperimentTest, DetectIsIdempotent) {
  const ExperimentConfig cfg = tiny("d");
  EXPECT_THROW(cmd_detect(cfg, log_), std::runtime_error);  // no manifest yet
  ASSERT_EQ(cmd_gen(cfg, log_), kExitOk);
  ASSERT_EQ(cmd_detect(cfg, log_), kExitOk);
  const fs::path side = fs::path(cfg.out) / "symmetry" / "bpp_0000.sym.json";
  const std::string first = read_file(side);
  std::ostringstream second_log;
  ASSERT_EQ(cmd_detect(cfg, second_log), kExitOk);
  EXPECT_NE(second_log.str().find("0 computed"), std::string::npos);
  EXPECT_EQ(read_file(side), first);
  const std::string timing = read_file(fs::path(cfg.out) / "detect_timing.csv");
  EXPECT_EQ(timing.rfind("instance,n,log10_order,seconds", 0), 0U);
}

TEST_F(ExperimentTest, EvalWritesTableAndIsDeterministic) {
  const ExperimentConfig cfg = tiny("e");
  ASSERT_EQ(cmd_eval(cfg, log_), kExitOk);
  const std::string metrics = read_file(fs::path(cfg.out) / "metrics.csv");
  EXPECT_EQ(metrics.rfind("instance,scheme,seed,m30,m50,m70,m90,violation,exact_alignment\n", 0), 0U);
  const std::string table = read_file(fs::path(cfg.out) / "table.md");
  EXPECT_NE(table.find("| noaug |"), std::string::npos);
  EXPECT_NE(table.find("| orbit |"), std::string::npos);
  EXPECT_NE(table.find("| 30% | 50% | 70% | 90% |"), std::string::npos);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "checkpoints" / "orbit_r0.bin"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "checkpoints" / "orbit_r0.json"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "curves" / "orbit_r0.csv"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "samples" / "orbit_r0.json"));
  // Second evaluation reuses the checkpoints and reproduces the metrics.
  ASSERT_EQ(cmd_eval(cfg, log_), kExitOk);
  EXPECT_EQ(read_file(fs::path(cfg.out) / "metrics.csv"), metrics);

  ExperimentConfig none = cfg;
  none.schemes.clear();
  EXPECT_THROW(cmd_eval(none, log_), std::invalid_argument);
}

TEST_F(ExperimentTest, VerifyCatchesCorruptLabels) {
  const ExperimentConfig cfg = tiny("v");
  ASSERT_EQ(cmd_gen(cfg, log_), kExitOk);
  EXPECT_EQ(cmd_verify(cfg, log_), kExitOk);
  const fs::path label = fs::path(cfg.out) / "labels" / "bpp_0000.sol.json";
  nlohmann::json j = read_json(label);
  j["values"][0] = 1 - j["values"][0].get<int>();
  write_file_atomic(label, j.dump());
  std::ostringstream out;
  EXPECT_EQ(cmd_verify(cfg, out), kExitInvariant);
  EXPECT_NE(out.str().find("FAIL labels"), std::string::npos);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SYMAUG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(ExperimentTest, CliExitCodes) {
  EXPECT_EQ(run_cli(""), kExitUsage);
  EXPECT_EQ(run_cli("frobnicate"), kExitUsage);
  EXPECT_EQ(run_cli("gen --epochs -3 --out " + dir_.string()), kExitUsage);
  EXPECT_EQ(run_cli("detect --out " + (dir_ / "missing").string()), kExitUsage);
  EXPECT_EQ(run_cli("gen --help"), kExitOk);
  const std::string out = (dir_ / "cli").string();
  EXPECT_EQ(run_cli("gen --count 4 --seed 3 --out " + out), kExitOk);
  EXPECT_EQ(run_cli("detect --count 4 --seed 3 --out " + out), kExitOk);
  EXPECT_EQ(run_cli("verify --count 4 --seed 3 --out " + out), kExitOk);
  // A solver budget too small to prove optimality.
  const fs::path cfg = dir_ / "tight.json";
  write_file_atomic(cfg, R"({"solver_node_budget": 5, "bpp": {"count": 2}})");
  EXPECT_EQ(run_cli("gen --config " + cfg.string() + " --out " + (dir_ / "tight").string()),
            kExitBudget);
  // A corrupt sidecar is an invariant violation.
  write_file_atomic(fs::path(out) / "symmetry" / "bpp_0000.sym.json", R"({"generators": 3})");
  EXPECT_EQ(run_cli("verify --count 4 --seed 3 --out " + out), kExitInvariant);
}

}  // namespace
}  // namespace symaug
