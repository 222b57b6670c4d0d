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

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "iongate/config.hpp"
#include "iongate/errors.hpp"
#include "iongate/serialization.hpp"
#include "support.hpp"

namespace iongate {
namespace {

using nlohmann::json;

json minimal_config() {
  return json::parse(R"({
    "chain": {"n_ions": 3, "axial_frequency_mhz": 0.41, "transverse_frequency_mhz": 2.19},
    "scheme": {"detuning_mhz": 2.1, "gate_time_us": 80, "n_segments": 6}
  })");
}

TEST(Config, DefaultsAndUnitConversion) {
  const RunConfig cfg = parse_run_config(minimal_config());
  EXPECT_EQ(cfg.optimizer.starts, 64);
  EXPECT_EQ(cfg.optimizer.seed, 1u);
  EXPECT_TRUE(cfg.optimizer.mirror);
  EXPECT_TRUE(cfg.output.wants("json"));
  const ChainModel chain = build_chain(cfg.chain);
  EXPECT_FALSE(chain.fit_rms.has_value());
  EXPECT_DOUBLE_EQ(chain.trap.transverse_freq, constants::mhz_to_angular(2.19));
  const SynthesisProblem p = make_problem(cfg, chain);
  EXPECT_DOUBLE_EQ(p.detuning, 2.0 * constants::kPi * 2.1e6);
  EXPECT_DOUBLE_EQ(p.gate_time, 80e-6);
  EXPECT_DOUBLE_EQ(p.target_coupling, constants::kPi / 4);
  EXPECT_EQ(p.n_segments, 6);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  json j = minimal_config();
  j["chain"]["n_ion"] = 3;
  EXPECT_THROW(parse_run_config(j), InputError);
  j = minimal_config();
  j["extra"] = 1;
  EXPECT_THROW(parse_run_config(j), InputError);
  j = minimal_config();
  j["scheme"]["n_segments"] = "six";
  EXPECT_THROW(parse_run_config(j), InputError);
  j = minimal_config();
  j.erase("chain");
  EXPECT_THROW(parse_run_config(j), InputError);
  j = minimal_config();
  j["output"] = {{"formats", {"xml"}}};
  EXPECT_THROW(parse_run_config(j), InputError);
  j = minimal_config();
  j["simulate"] = {{"subset_mask", {1, 2}}};
  EXPECT_THROW(parse_run_config(j), InputError);
  EXPECT_THROW(load_run_config("/nonexistent/config.json"), InputError);
}

TEST(Config, SimulateSectionAndMotion) {
  json j = minimal_config();
  j["simulate"] = {{"subset_mask", {1, 0, true}}, {"nbar", 0.2}, {"parity_points", 41}};
  const RunConfig cfg = parse_run_config(j);
  EXPECT_EQ(cfg.simulate.subset_mask, (std::vector<bool>{true, false, true}));
  const MotionalInit m = make_motion(cfg.simulate, 3);
  EXPECT_EQ(m.nbar, Eigen::VectorXd::Constant(3, 0.2));
  SimulateSection two;
  two.nbar = {0.1, 0.2};
  EXPECT_THROW(make_motion(two, 3), InputError);
  EXPECT_EQ(make_motion(SimulateSection{}, 3).nbar.size(), 0);
}

TEST(Config, FixtureFitsMeasuredSpectra) {
  const testing::Fixture f3 = testing::load_fixture("config_3qubit.json");
  ASSERT_TRUE(f3.chain.fit_rms.has_value());
  EXPECT_LT(*f3.chain.fit_rms, constants::mhz_to_angular(3e-3));
  const testing::Fixture f4 = testing::load_fixture("config_4qubit.json");
  EXPECT_LT(*f4.chain.fit_rms, constants::mhz_to_angular(5e-3));
  EXPECT_EQ(f4.chain.eta.n_ions(), 4);
}

TEST(Config, ChainNeedsFrequencies) {
  ChainSection c;
  c.n_ions = 3;
  EXPECT_THROW(build_chain(c), InputError);
  c.transverse_frequency_mhz = 2.0;
  EXPECT_THROW(build_chain(c), InputError);
  c.measured_mode_frequencies_mhz = {2.1, 2.0};
  EXPECT_THROW(build_chain(c), InputError);
}

TEST(Serialization, FormatDoubleRoundTripsBits) {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t b = bits(gen);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string text = format_double(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(back, v) << text;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.5e-7), "-2.5e-07");
}

TEST(Serialization, SchemeRoundTripIsExact) {
  std::mt19937_64 gen(2);
  PulseScheme s;
  s.detuning = constants::mhz_to_angular(2.0945);
  s.gate_time = 81.3e-6;
  s.n_segments = 5;
  s.phases = testing::random_phases(gen, 3, 5);
  s.peak_amplitudes = Eigen::Vector3d(-1.1e6, 1.7e6, -1.1e6);
  s.comment = "round trip";
  const PulseScheme back = scheme_from_json(json::parse(scheme_to_json(s).dump()));
  EXPECT_EQ(back.n_segments, 5);
  EXPECT_EQ(back.comment, "round trip");
  EXPECT_NEAR(back.detuning / s.detuning, 1.0, 1e-15);
  EXPECT_NEAR(back.gate_time / s.gate_time, 1.0, 1e-15);
  EXPECT_LT((back.phases - s.phases).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(((back.peak_amplitudes - s.peak_amplitudes).array() / s.peak_amplitudes.array()).abs().maxCoeff(), 1e-15);
  // A second round trip is bit-exact.
  const PulseScheme again = scheme_from_json(json::parse(scheme_to_json(back).dump()));
  EXPECT_EQ(again.phases, back.phases);
  EXPECT_EQ(again.peak_amplitudes, back.peak_amplitudes);
  EXPECT_EQ(again.detuning, back.detuning);
}

TEST(Serialization, SchemeRejectsMalformedInput) {
  json j = scheme_to_json(load_scheme(testing::fixture_path("table1_3qubit.json")));
  json bad = j;
  bad.erase("phases_pi");
  EXPECT_THROW(scheme_from_json(bad), InputError);
  bad = j;
  bad["phases_pi"][1] = {0.1, 0.2};
  EXPECT_THROW(scheme_from_json(bad), InputError);
  bad = j;
  bad["units"] = "rad";
  EXPECT_THROW(scheme_from_json(bad), InputError);
  bad = j;
  bad["n_segments"] = 5;
  EXPECT_THROW(scheme_from_json(bad), InputError);
  EXPECT_THROW(load_scheme("/nonexistent/scheme.json"), InputError);
}

TEST(Serialization, PrintedTableLoadsInSiUnits) {
  const PulseScheme s = load_scheme(testing::fixture_path("table1_3qubit.json"));
  EXPECT_DOUBLE_EQ(s.detuning, constants::mhz_to_angular(2.094));
  EXPECT_DOUBLE_EQ(s.gate_time, 80e-6);
  EXPECT_NEAR(s.peak_amplitudes[0], constants::mhz_to_angular(-0.181), 1e-6);
  EXPECT_NEAR(s.phases(1, 0), 0.104 * constants::kPi, 1e-15);
  EXPECT_NEAR(s.phases(1, 5), -0.104 * constants::kPi, 1e-15);
}

TEST(Serialization, CsvWritersEmitHeadersAndRows) {
  const testing::Fixture f = testing::load_fixture("config_3qubit.json");
  const PulseScheme s = load_scheme(testing::fixture_path("table1_3qubit.json"));
  const SchemeDiagnostics diag = diagnose(f.chain.eta, f.chain.modes, s, 2);
  std::ostringstream traj, coup, modes;
  write_trajectory_csv(traj, diag.samples, s.gate_time);
  write_coupling_csv(coup, diag.samples, s.gate_time);
  write_modes_csv(modes, f.chain.modes, f.chain.eta);
  auto lines = [](const std::string& t) { return std::count(t.begin(), t.end(), '\n'); };
  EXPECT_EQ(traj.str().rfind("t_s,j,m,re_alpha,im_alpha\n", 0), 0u);
  EXPECT_EQ(lines(traj.str()), 1 + 13 * 9);
  EXPECT_EQ(coup.str().rfind("t_s,j,jp,theta\n", 0), 0u);
  EXPECT_EQ(lines(coup.str()), 1 + 13 * 3);
  EXPECT_EQ(lines(modes.str()), 4);

  const json dj = diagnostics_to_json(diag, s, constants::kPi / 4);
  EXPECT_DOUBLE_EQ(dj.at("max_abs_alpha").get<double>(), diag.max_abs_alpha());
  const json mj = modes_to_json(f.chain.trap, f.chain.modes, f.chain.eta);
  EXPECT_TRUE(mj.is_object());
}

TEST(Serialization, WriteTextCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "iongate_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_text(dir / "x.json", "{\"a\": 1}\n");
  EXPECT_EQ(read_json(dir / "x.json").at("a").get<int>(), 1);
  write_text(dir / "bad.json", "{");
  EXPECT_THROW(read_json(dir / "bad.json"), InputError);
  std::filesystem::remove_all(dir.parent_path());
}

}  // namespace
}  // namespace iongate
