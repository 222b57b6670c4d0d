// Copyright 2026 The iongate Authors
//
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "iongate/serialization.hpp"
#include "support.hpp"

namespace iongate {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("iongate_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(IONGATE_CLI_PATH) + " " + args + " >" + (dir_ / "stdout.txt").string() +
                            " 2>" + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string fixture(const std::string& name) { return testing::fixture_path(name).string(); }
  std::string write_config(const std::string& text) {
    const fs::path p = dir_ / "cfg.json";
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

TEST_F(Cli, ModesWritesJsonAndCsv) {
  EXPECT_EQ(run("modes -c " + fixture("config_3qubit.json") + " -o " + dir_.string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "modes.json"));
  EXPECT_TRUE(fs::exists(dir_ / "modes.csv"));
}

TEST_F(Cli, VerifyPrintedScheme) {
  EXPECT_EQ(run("verify -c " + fixture("config_3qubit.json") + " -s " + fixture("table1_3qubit.json") + " -o " +
                dir_.string() + " --samples 4"),
            0);
  const auto diag = read_json(dir_ / "diagnostics.json");
  EXPECT_LT(diag.at("max_theta_deviation").get<double>(), 0.05);
  EXPECT_TRUE(fs::exists(dir_ / "trajectory.csv"));
}

TEST_F(Cli, SynthesizeThenSimulateSubset) {
  ASSERT_EQ(run("synthesize -c " + fixture("config_4qubit.json") + " -o " + dir_.string() + " --starts 2 --seed 5"),
            0);
  const PulseScheme s = load_scheme(dir_ / "scheme.json");
  EXPECT_EQ(s.n_ions(), 4);
  EXPECT_TRUE(fs::exists(dir_ / "synthesis.json"));
  EXPECT_TRUE(fs::exists(dir_ / "coupling.csv"));
  const fs::path sim = dir_ / "sim";
  ASSERT_EQ(run("simulate -c " + fixture("config_4qubit.json") + " -s " + (dir_ / "scheme.json").string() + " -o " +
                sim.string() + " --subset 1,3"),
            0);
  const auto gate = read_json(sim / "gate_result.json");
  EXPECT_GT(gate.at("fidelity").get<double>(), 0.999);
  EXPECT_TRUE(fs::exists(sim / "fringe.csv"));
}

TEST_F(Cli, ExitCodesFollowErrorClass) {
  // Input errors: missing file, malformed JSON, unknown option, bad subset.
  EXPECT_EQ(run("modes -c /nonexistent.json"), 4);
  EXPECT_EQ(run("modes -c " + write_config("{ not json")), 4);
  EXPECT_EQ(run("modes --bogus"), 4);
  EXPECT_EQ(run("simulate -c " + fixture("config_3qubit.json") + " -s " + fixture("table1_3qubit.json") +
                " --subset 7 -o " + dir_.string()),
            4);
  // Physics error: unstable chain.
  EXPECT_EQ(run("modes -o " + dir_.string() + " -c " +
                write_config(R"({"chain": {"n_ions": 12, "axial_frequency_mhz": 1.0, "transverse_frequency_mhz": 1.2}})")),
            2);
  // Optimizer error: too few segments to close every trajectory.
  EXPECT_EQ(run("synthesize -o " + dir_.string() + " -c " +
                write_config(R"({"chain": {"n_ions": 3, "axial_frequency_mhz": 0.41, "transverse_frequency_mhz": 2.19},
                                 "scheme": {"detuning_mhz": 2.1, "gate_time_us": 40, "n_segments": 2},
                                 "optimizer": {"starts": 2, "max_outer_iterations": 3}})")),
            3);
  EXPECT_TRUE(fs::exists(dir_ / "best_iterate.json"));
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  const fs::path env_dir = dir_ / "from_env";
  ::setenv("IONGATE_OUTPUT_DIR", env_dir.c_str(), 1);
  EXPECT_EQ(run("modes -c " + fixture("config_3qubit.json")), 0);
  ::unsetenv("IONGATE_OUTPUT_DIR");
  EXPECT_TRUE(fs::exists(env_dir / "modes.json"));
}

}  // namespace
}  // namespace iongate
