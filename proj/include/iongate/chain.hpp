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

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "iongate/constants.hpp"

namespace iongate {

/// Linear ion chain in a harmonic trap. Frequencies are angular (rad/s).
struct TrapConfig {
  int n_ions = 1;
  double axial_freq = 0.0;
  /// Single-ion transverse (x) secular frequency; equals the transverse COM mode.
  double transverse_freq = 0.0;
  double ion_mass = constants::kYb171IonMass;
  double raman_wavelength = constants::kDefaultRamanWavelength;

  /// Throws InputError on non-positive sizes or frequencies.
  void validate() const;
};

/// Transverse normal modes. `frequencies` are sorted descending (COM first);
/// column m of `participation` is the mode vector b_{., m}.
struct NormalModeData {
  Eigen::VectorXd frequencies;
  Eigen::MatrixXd participation;  // N x M

  int n_ions() const { return static_cast<int>(participation.rows()); }
  int n_modes() const { return static_cast<int>(frequencies.size()); }
};

/// eta(j, m): Lamb-Dicke parameter of ion j on mode m.
struct LambDickeMatrix {
  Eigen::MatrixXd eta;

  int n_ions() const { return static_cast<int>(eta.rows()); }
  int n_modes() const { return static_cast<int>(eta.cols()); }
};

/// Coulomb length scale (e^2 / (4 pi eps0 M nu_ax^2))^(1/3) in metres.
double chain_length_scale(const TrapConfig& cfg);

/// Equilibrium axial positions in units of chain_length_scale(), ascending.
std::vector<double> equilibrium_positions_scaled(int n_ions);

/// Equilibrium axial positions (m), ascending and antisymmetric about 0.
std::vector<double> equilibrium_positions(const TrapConfig& cfg);

/// Throws PhysicsError naming the first mode with non-positive squared
/// frequency when the linear configuration is not a minimum.
NormalModeData transverse_normal_modes(const TrapConfig& cfg);

LambDickeMatrix lamb_dicke_parameters(const NormalModeData& modes, const TrapConfig& cfg);

struct TrapFit {
  TrapConfig config;
  double rms_residual = 0.0;  // rad/s
};

/// Least-squares fit of (axial_freq, transverse_freq) to a measured
/// transverse spectrum (descending, rad/s). Other fields come from the
/// template. Throws PhysicsError if the RMS residual exceeds `max_rms`.
TrapFit fit_trap_frequencies(const std::vector<double>& measured, const TrapConfig& cfg_template,
                             double max_rms);

}  // namespace iongate
