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

#include "iongate/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "iongate/constants.hpp"
#include "iongate/errors.hpp"

namespace iongate {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw InputError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
T read(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void read_opt(const json& obj, const char* key, const std::string& where, T& out) {
  if (obj.contains(key)) out = read<T>(obj, key, where);
}

}  // namespace

bool OutputSection::wants(const std::string& fmt) const {
  return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

RunConfig parse_run_config(const json& j) {
  reject_unknown(j, {"chain", "scheme", "optimizer", "simulate", "output", "comment"}, "config");
  RunConfig cfg;

  if (!j.contains("chain")) throw InputError("config: missing 'chain' section");
  {
    const json& c = j.at("chain");
    const std::string w = "chain";
    reject_unknown(c,
                   {"n_ions", "measured_mode_frequencies_mhz", "axial_frequency_mhz", "transverse_frequency_mhz",
                    "ion_mass_amu", "raman_wavelength_nm", "fit_max_rms_khz"},
                   w);
    cfg.chain.n_ions = read<int>(c, "n_ions", w);
    read_opt(c, "measured_mode_frequencies_mhz", w, cfg.chain.measured_mode_frequencies_mhz);
    if (c.contains("axial_frequency_mhz")) cfg.chain.axial_frequency_mhz = read<double>(c, "axial_frequency_mhz", w);
    if (c.contains("transverse_frequency_mhz"))
      cfg.chain.transverse_frequency_mhz = read<double>(c, "transverse_frequency_mhz", w);
    read_opt(c, "ion_mass_amu", w, cfg.chain.ion_mass_amu);
    read_opt(c, "raman_wavelength_nm", w, cfg.chain.raman_wavelength_nm);
    read_opt(c, "fit_max_rms_khz", w, cfg.chain.fit_max_rms_khz);
    if (cfg.chain.n_ions < 1) throw InputError("chain.n_ions must be >= 1");
  }

  if (j.contains("scheme")) {
    const json& s = j.at("scheme");
    const std::string w = "scheme";
    reject_unknown(s, {"detuning_mhz", "gate_time_us", "n_segments"}, w);
    cfg.scheme.present = true;
    cfg.scheme.detuning_mhz = read<double>(s, "detuning_mhz", w);
    cfg.scheme.gate_time_us = read<double>(s, "gate_time_us", w);
    cfg.scheme.n_segments = read<int>(s, "n_segments", w);
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    const std::string w = "optimizer";
    reject_unknown(o,
                   {"seed", "starts", "constraint_tolerance", "objective_tolerance", "max_outer_iterations",
                    "max_inner_iterations", "mirror", "time_antisymmetric", "target_coupling_pi",
                    "samples_per_segment"},
                   w);
    OptimizerSection& op = cfg.optimizer;
    read_opt(o, "seed", w, op.seed);
    read_opt(o, "starts", w, op.starts);
    read_opt(o, "constraint_tolerance", w, op.constraint_tolerance);
    read_opt(o, "objective_tolerance", w, op.objective_tolerance);
    read_opt(o, "max_outer_iterations", w, op.max_outer_iterations);
    read_opt(o, "max_inner_iterations", w, op.max_inner_iterations);
    read_opt(o, "mirror", w, op.mirror);
    read_opt(o, "time_antisymmetric", w, op.time_antisymmetric);
    read_opt(o, "target_coupling_pi", w, op.target_coupling_pi);
    read_opt(o, "samples_per_segment", w, op.samples_per_segment);
    if (op.starts < 1) throw InputError("optimizer.starts must be >= 1");
    if (op.samples_per_segment < 1) throw InputError("optimizer.samples_per_segment must be >= 1");
  }

  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    const std::string w = "simulate";
    reject_unknown(s, {"subset_mask", "nbar", "parity_points"}, w);
    if (s.contains("subset_mask")) {
      const json& m = s.at("subset_mask");
      if (!m.is_array()) throw InputError("simulate.subset_mask must be an array");
      for (const auto& v : m) {
        if (v.is_boolean()) cfg.simulate.subset_mask.push_back(v.get<bool>());
        else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1))
          cfg.simulate.subset_mask.push_back(v.get<int>() == 1);
        else
          throw InputError("simulate.subset_mask entries must be booleans or 0/1");
      }
    }
    if (s.contains("nbar")) {
      if (s.at("nbar").is_number()) cfg.simulate.nbar = {read<double>(s, "nbar", w)};
      else read_opt(s, "nbar", w, cfg.simulate.nbar);
    }
    read_opt(s, "parity_points", w, cfg.simulate.parity_points);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    const std::string w = "output";
    reject_unknown(o, {"directory", "formats"}, w);
    read_opt(o, "directory", w, cfg.output.directory);
    read_opt(o, "formats", w, cfg.output.formats);
    for (const auto& f : cfg.output.formats)
      if (f != "json" && f != "csv") throw InputError("output.formats: unsupported format '" + f + "'");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

ChainModel build_chain(const ChainSection& section) {
  ChainModel out;
  TrapConfig tmpl;
  tmpl.n_ions = section.n_ions;
  if (section.ion_mass_amu > 0.0) tmpl.ion_mass = section.ion_mass_amu * constants::kAtomicMassUnit;
  if (section.raman_wavelength_nm > 0.0) tmpl.raman_wavelength = section.raman_wavelength_nm * 1e-9;

  if (!section.measured_mode_frequencies_mhz.empty()) {
    if (static_cast<int>(section.measured_mode_frequencies_mhz.size()) != section.n_ions)
      throw InputError("chain: measured_mode_frequencies_mhz must list one frequency per ion");
    std::vector<double> measured;
    for (double f : section.measured_mode_frequencies_mhz) measured.push_back(constants::mhz_to_angular(f));
    // A rough axial guess lets the fit start; the template value is replaced.
    tmpl.transverse_freq = measured.front();
    tmpl.axial_freq = 0.2 * measured.front();
    const TrapFit fit = fit_trap_frequencies(measured, tmpl, constants::mhz_to_angular(section.fit_max_rms_khz * 1e-3));
    out.trap = fit.config;
    out.fit_rms = fit.rms_residual;
  } else {
    if (!section.transverse_frequency_mhz) throw InputError("chain: need measured modes or transverse_frequency_mhz");
    tmpl.transverse_freq = constants::mhz_to_angular(*section.transverse_frequency_mhz);
    if (section.axial_frequency_mhz) tmpl.axial_freq = constants::mhz_to_angular(*section.axial_frequency_mhz);
    else if (section.n_ions > 1) throw InputError("chain: axial_frequency_mhz is required for more than one ion");
    else tmpl.axial_freq = tmpl.transverse_freq;
    out.trap = tmpl;
  }
  out.trap.validate();
  out.modes = transverse_normal_modes(out.trap);
  out.eta = lamb_dicke_parameters(out.modes, out.trap);
  return out;
}

SynthesisProblem make_problem(const RunConfig& cfg, const ChainModel& chain) {
  if (!cfg.scheme.present) throw InputError("config: synthesis needs a 'scheme' section");
  SynthesisProblem p;
  p.eta = chain.eta;
  p.modes = chain.modes;
  p.detuning = constants::mhz_to_angular(cfg.scheme.detuning_mhz);
  p.gate_time = cfg.scheme.gate_time_us * 1e-6;
  p.n_segments = cfg.scheme.n_segments;
  const OptimizerSection& o = cfg.optimizer;
  p.symmetry = {o.mirror, o.time_antisymmetric};
  p.target_coupling = o.target_coupling_pi * constants::kPi;
  p.multistart = o.starts;
  p.seed = o.seed;
  p.constraint_tolerance = o.constraint_tolerance;
  p.objective_tolerance = o.objective_tolerance;
  p.max_outer_iterations = o.max_outer_iterations;
  p.max_inner_iterations = o.max_inner_iterations;
  p.validate();
  return p;
}

MotionalInit make_motion(const SimulateSection& section, int n_modes) {
  MotionalInit m;
  if (section.nbar.size() == 1) m.nbar = Eigen::VectorXd::Constant(n_modes, section.nbar.front());
  else if (!section.nbar.empty()) m.nbar = Eigen::Map<const Eigen::VectorXd>(section.nbar.data(), static_cast<Eigen::Index>(section.nbar.size()));
  m.validate(n_modes);
  return m;
}

}  // namespace iongate
