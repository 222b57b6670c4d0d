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

#include "iongate/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "iongate/constants.hpp"
#include "iongate/errors.hpp"

namespace iongate {

using nlohmann::json;

namespace {

json matrix_rows(const Eigen::MatrixXd& m, double scale = 1.0) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c) * scale);
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v, double scale = 1.0) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i] * scale);
  return out;
}

json complex_rows(const Eigen::MatrixXcd& m) {
  json out = json::object();
  out["re"] = matrix_rows(m.real());
  out["im"] = matrix_rows(m.imag());
  return out;
}

std::string bitstring(Eigen::Index index, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int j = 0; j < n; ++j)
    if ((index >> (n - 1 - j)) & 1) s[static_cast<std::size_t>(j)] = '1';
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json scheme_to_json(const PulseScheme& scheme) {
  json j;
  j["detuning_hz"] = scheme.detuning / constants::kTwoPi;
  j["gate_time_s"] = scheme.gate_time;
  j["n_segments"] = scheme.n_segments;
  j["phases_pi"] = matrix_rows(scheme.phases, 1.0 / constants::kPi);
  j["peak_amplitudes_hz"] = vector_json(scheme.peak_amplitudes, 1.0 / constants::kTwoPi);
  j["comment"] = scheme.comment;
  return j;
}

PulseScheme scheme_from_json(const json& j) {
  if (!j.is_object()) throw InputError("scheme: expected a JSON object");
  static const std::set<std::string> allowed{"detuning_hz", "gate_time_s", "n_segments", "phases_pi",
                                             "peak_amplitudes_hz", "comment"};
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw InputError("scheme: unknown key '" + item.key() + "'");
  PulseScheme s;
  try {
    s.detuning = constants::kTwoPi * j.at("detuning_hz").get<double>();
    s.gate_time = j.at("gate_time_s").get<double>();
    s.n_segments = j.at("n_segments").get<int>();
    const auto rows = j.at("phases_pi").get<std::vector<std::vector<double>>>();
    const auto amps = j.at("peak_amplitudes_hz").get<std::vector<double>>();
    if (j.contains("comment")) s.comment = j.at("comment").get<std::string>();
    s.phases.resize(static_cast<Eigen::Index>(rows.size()), s.n_segments);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(rows[r].size()) != s.n_segments)
        throw InputError("scheme: row " + std::to_string(r + 1) + " of phases_pi does not have n_segments entries");
      for (int k = 0; k < s.n_segments; ++k) s.phases(static_cast<Eigen::Index>(r), k) = constants::kPi * rows[r][k];
    }
    s.peak_amplitudes.resize(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) s.peak_amplitudes[static_cast<Eigen::Index>(i)] = constants::kTwoPi * amps[i];
  } catch (const json::exception& e) {
    throw InputError(std::string("scheme: ") + e.what());
  }
  s.validate();
  return s;
}

PulseScheme load_scheme(const std::filesystem::path& path) { return scheme_from_json(read_json(path)); }

json modes_to_json(const TrapConfig& trap, const NormalModeData& modes, const LambDickeMatrix& eta) {
  json j;
  j["n_ions"] = trap.n_ions;
  j["axial_frequency_hz"] = trap.axial_freq / constants::kTwoPi;
  j["transverse_frequency_hz"] = trap.transverse_freq / constants::kTwoPi;
  j["ion_mass_kg"] = trap.ion_mass;
  j["raman_wavelength_m"] = trap.raman_wavelength;
  j["equilibrium_positions_m"] = equilibrium_positions(trap);
  j["mode_frequencies_hz"] = vector_json(modes.frequencies, 1.0 / constants::kTwoPi);
  j["participation"] = matrix_rows(modes.participation);
  j["lamb_dicke"] = matrix_rows(eta.eta);
  return j;
}

json problem_to_json(const SynthesisProblem& p) {
  json j;
  j["n_ions"] = p.n_ions();
  j["detuning_hz"] = p.detuning / constants::kTwoPi;
  j["gate_time_s"] = p.gate_time;
  j["n_segments"] = p.n_segments;
  j["mode_frequencies_hz"] = vector_json(p.modes.frequencies, 1.0 / constants::kTwoPi);
  j["lamb_dicke"] = matrix_rows(p.eta.eta);
  j["symmetry"] = {{"mirror", p.symmetry.mirror}, {"time_antisymmetric", p.symmetry.time_antisymmetric}};
  j["target_coupling_pi"] = p.target_coupling / constants::kPi;
  j["multistart"] = p.multistart;
  j["seed"] = p.seed;
  j["constraint_tolerance"] = p.constraint_tolerance;
  j["objective_tolerance"] = p.objective_tolerance;
  j["max_outer_iterations"] = p.max_outer_iterations;
  j["max_inner_iterations"] = p.max_inner_iterations;
  return j;
}

json result_to_json(const SynthesisResult& r) {
  json j;
  j["scheme"] = scheme_to_json(r.scheme);
  j["objective"] = r.objective;
  j["equality_residuals"] = vector_json(r.equality_residuals);
  j["inequality_residuals"] = vector_json(r.inequality_residuals);
  j["max_violation"] = r.max_violation;
  j["max_theta_deviation"] = r.max_theta_deviation;
  j["seed"] = r.seed;
  j["best_start"] = r.best_start;
  j["constraint_form"] = r.constraint_form;
  j["warnings"] = r.warnings;
  json starts = json::array();
  for (const auto& s : r.starts) {
    starts.push_back({{"start", s.start},
                      {"converged", s.converged},
                      {"objective", s.objective},
                      {"max_violation", s.max_violation},
                      {"max_amplitude_omega_tau", std::isfinite(s.max_amplitude) ? json(s.max_amplitude) : json()},
                      {"outer_iterations", s.outer_iterations},
                      {"inner_iterations", s.inner_iterations}});
  }
  j["starts"] = std::move(starts);
  return j;
}

json diagnostics_to_json(const SchemeDiagnostics& diag, const PulseScheme& scheme, double target) {
  json j;
  j["objective"] = diag.objective();
  j["max_abs_alpha"] = diag.max_abs_alpha();
  j["max_theta_deviation"] = diag.max_theta_deviation(target, scheme);
  j["target_coupling_pi"] = target / constants::kPi;
  j["theta"] = matrix_rows(diag.theta);
  j["theta_over_target"] = matrix_rows(diag.theta, 1.0 / target);
  j["scaled_coupling"] = matrix_rows(diag.g);
  j["alpha"] = complex_rows(diag.alpha);
  j["scaled_displacement"] = complex_rows(diag.d);
  return j;
}

json gate_result_to_json(const GateResult& r) {
  json j;
  json qubits = json::array();
  for (int q : r.qubits) qubits.push_back(q + 1);
  j["qubits"] = std::move(qubits);
  j["populations"] = vector_json(r.populations);
  j["fidelity"] = r.fidelity;
  j["fidelity_clamped"] = r.fidelity_clamped;
  j["parity"] = {{"contrast", r.parity.contrast},
                 {"phase_offset", r.parity.phase_offset},
                 {"offset", r.parity.offset},
                 {"fit_residual", r.parity.fit_residual},
                 {"fit_flagged", r.parity.fit_flagged},
                 {"dominant_frequency", r.parity.dominant_frequency}};
  json fringe = json::array();
  for (std::size_t i = 0; i < r.parity.phases.size(); ++i) fringe.push_back({r.parity.phases[i], r.parity.parity[i]});
  j["fringe"] = std::move(fringe);
  j["warnings"] = r.warnings;
  return j;
}

void write_trajectory_csv(std::ostream& os, const TrajectorySamples& samples, double gate_time) {
  os << "t_s,j,m,re_alpha,im_alpha\n";
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    const std::string t = format_double(samples.times[i] * gate_time);
    const Eigen::MatrixXcd& a = samples.alpha[i];
    for (Eigen::Index j = 0; j < a.rows(); ++j)
      for (Eigen::Index m = 0; m < a.cols(); ++m)
        os << t << ',' << j + 1 << ',' << m + 1 << ',' << format_double(a(j, m).real()) << ','
           << format_double(a(j, m).imag()) << '\n';
  }
}

void write_coupling_csv(std::ostream& os, const TrajectorySamples& samples, double gate_time) {
  os << "t_s,j,jp,theta\n";
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    const std::string t = format_double(samples.times[i] * gate_time);
    const Eigen::MatrixXd& th = samples.theta[i];
    for (Eigen::Index j = 0; j < th.rows(); ++j)
      for (Eigen::Index jp = j + 1; jp < th.cols(); ++jp)
        os << t << ',' << j + 1 << ',' << jp + 1 << ',' << format_double(th(j, jp)) << '\n';
  }
}

void write_fringe_csv(std::ostream& os, const ParityScan& scan) {
  os << "phi,parity\n";
  for (std::size_t i = 0; i < scan.phases.size(); ++i)
    os << format_double(scan.phases[i]) << ',' << format_double(scan.parity[i]) << '\n';
}

void write_populations_csv(std::ostream& os, const Eigen::VectorXd& populations, int n_qubits) {
  os << "index,bitstring,population\n";
  for (Eigen::Index i = 0; i < populations.size(); ++i)
    os << i << ',' << bitstring(i, n_qubits) << ',' << format_double(populations[i]) << '\n';
}

void write_modes_csv(std::ostream& os, const NormalModeData& modes, const LambDickeMatrix& eta) {
  os << "mode,frequency_hz";
  for (int j = 0; j < eta.n_ions(); ++j) os << ",eta_" << j + 1;
  os << '\n';
  for (int m = 0; m < modes.n_modes(); ++m) {
    os << m + 1 << ',' << format_double(modes.frequencies[m] / constants::kTwoPi);
    for (int j = 0; j < eta.n_ions(); ++j) os << ',' << format_double(eta.eta(j, m));
    os << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace iongate
