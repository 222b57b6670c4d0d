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

// JSON and CSV encodings. Doubles are written in shortest round-trip form so
// every file parses back to the same bits.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "iongate/chain.hpp"
#include "iongate/optimizer.hpp"
#include "iongate/pulse_scheme.hpp"
#include "iongate/simulator.hpp"

namespace iongate {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// {detuning_hz, gate_time_s, n_segments, phases_pi, peak_amplitudes_hz, comment}.
/// Frequencies are ordinary (not angular); amplitudes are signed.
nlohmann::json scheme_to_json(const PulseScheme& scheme);
/// Throws InputError on missing or malformed fields.
PulseScheme scheme_from_json(const nlohmann::json& j);
PulseScheme load_scheme(const std::filesystem::path& path);

nlohmann::json modes_to_json(const TrapConfig& trap, const NormalModeData& modes, const LambDickeMatrix& eta);
nlohmann::json problem_to_json(const SynthesisProblem& problem);
nlohmann::json result_to_json(const SynthesisResult& result);
nlohmann::json diagnostics_to_json(const SchemeDiagnostics& diag, const PulseScheme& scheme, double target);
nlohmann::json gate_result_to_json(const GateResult& result);

/// Columns t_s, j, m, re_alpha, im_alpha (ions and modes 1-based).
void write_trajectory_csv(std::ostream& os, const TrajectorySamples& samples, double gate_time);
/// Columns t_s, j, jp, theta for j < jp.
void write_coupling_csv(std::ostream& os, const TrajectorySamples& samples, double gate_time);
/// Columns phi, parity.
void write_fringe_csv(std::ostream& os, const ParityScan& scan);
/// Columns index, bitstring, population.
void write_populations_csv(std::ostream& os, const Eigen::VectorXd& populations, int n_qubits);
/// Columns mode, frequency_hz, then eta_1..eta_N.
void write_modes_csv(std::ostream& os, const NormalModeData& modes, const LambDickeMatrix& eta);

void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace iongate
