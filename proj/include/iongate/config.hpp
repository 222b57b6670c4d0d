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

// Run configuration: one JSON file per experiment. Frequencies are entered as
// ordinary frequencies in MHz and times in microseconds; the 2 pi factor and the
// SI conversion happen here and nowhere else.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iongate/chain.hpp"
#include "iongate/optimizer.hpp"
#include "iongate/simulator.hpp"

namespace iongate {

struct ChainSection {
  int n_ions = 0;
  std::vector<double> measured_mode_frequencies_mhz;  // descending; triggers a trap fit
  std::optional<double> axial_frequency_mhz;
  std::optional<double> transverse_frequency_mhz;
  double ion_mass_amu = 0.0;      // 0: 171Yb+
  double raman_wavelength_nm = 0.0;  // 0: 377 nm
  double fit_max_rms_khz = 5.0;
};

struct SchemeSection {
  bool present = false;
  double detuning_mhz = 0.0;
  double gate_time_us = 0.0;
  int n_segments = 0;
};

struct OptimizerSection {
  std::uint64_t seed = 1;
  int starts = 64;
  double constraint_tolerance = 1e-8;
  double objective_tolerance = 1e-6;
  int max_outer_iterations = 25;
  int max_inner_iterations = 1000;
  bool mirror = true;
  bool time_antisymmetric = true;
  double target_coupling_pi = 0.25;
  int samples_per_segment = 20;
};

struct SimulateSection {
  std::vector<bool> subset_mask;  // empty: every ion
  std::vector<double> nbar;       // empty: ground state; one value: all modes
  int parity_points = 0;          // 0: 8N + 1
};

struct OutputSection {
  std::string directory;  // empty: $IONGATE_OUTPUT_DIR or "."
  std::vector<std::string> formats{"json", "csv"};

  bool wants(const std::string& fmt) const;
};

struct RunConfig {
  ChainSection chain;
  SchemeSection scheme;
  OptimizerSection optimizer;
  SimulateSection simulate;
  OutputSection output;
};

/// Throws InputError on unknown keys, wrong types, or inconsistent values.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Chain resolved to physical quantities.
struct ChainModel {
  TrapConfig trap;
  std::optional<double> fit_rms;  // rad/s, set when fitted to measured modes
  NormalModeData modes;
  LambDickeMatrix eta;
};

ChainModel build_chain(const ChainSection& section);

SynthesisProblem make_problem(const RunConfig& cfg, const ChainModel& chain);

MotionalInit make_motion(const SimulateSection& section, int n_modes);

}  // namespace iongate
