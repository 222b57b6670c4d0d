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

// Exact spin-register evolution under the Molmer-Sorensen propagator
//   U = exp[sum_{j,m} (alpha_jm a_m^dag - h.c.) sigma_x^j - i sum_{j<j'} theta_jj' sigma_x^j sigma_x^j'],
// with the motion traced out. All terms are diagonal in the x basis.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "iongate/pulse_scheme.hpp"

namespace iongate {

/// 2^N x 2^N density matrix in the z basis; qubit 1 is the most significant bit.
using SpinDensityMatrix = Eigen::MatrixXcd;

/// Largest register the dense simulator accepts.
inline constexpr int kMaxSimulatedQubits = 10;

/// Mean phonon number per mode; an empty vector means every mode in its ground state.
struct MotionalInit {
  Eigen::VectorXd nbar;

  double occupation(int m) const { return nbar.size() ? nbar[m] : 0.0; }
  void validate(int n_modes) const;
};

int register_size(const SpinDensityMatrix& rho);
/// Throws InputError unless rho is a Hermitian, unit-trace, PSD 2^N square matrix.
void validate_density_matrix(const SpinDensityMatrix& rho, double tol = 1e-10);

SpinDensityMatrix ground_state(int n_qubits);
SpinDensityMatrix pure_state(const Eigen::VectorXcd& psi);

/// Conjugation by the N-fold Hadamard; maps z-basis matrices to x-basis matrices and back.
SpinDensityMatrix hadamard_conjugate(const SpinDensityMatrix& rho);

/// x-basis eigenvalue sum_{j<j'} theta_jj' s_j s_j' for the string encoded by `bits`
/// (bit set -> s = -1).
double coupling_phase(const Eigen::MatrixXd& theta, unsigned bits);

SpinDensityMatrix evolve_ideal(const Eigen::MatrixXd& theta, const SpinDensityMatrix& rho_in);

SpinDensityMatrix evolve_with_residuals(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha,
                                        const MotionalInit& motion, const SpinDensityMatrix& rho_in);

/// exp(-i pi/4 sigma_x) on every qubit.
SpinDensityMatrix rotate_all_x_half_pi(const SpinDensityMatrix& rho);

struct ParityScan {
  std::vector<double> phases;  // analysis phase phi
  std::vector<double> parity;  // <prod sigma_z>
  double contrast = 0.0;       // C in C cos(N phi + phi0)
  double phase_offset = 0.0;   // phi0
  double offset = 0.0;         // constant term of the fit
  double fit_residual = 0.0;   // rms
  int dominant_frequency = 0;  // largest Fourier harmonic of the fringe
  bool fit_flagged = false;
};

/// Analysis rotation exp[-i (pi/4)(cos phi sigma_x + sin phi sigma_y)] on every qubit,
/// then parity. Phases are sampled uniformly on [0, 2 pi).
ParityScan parity_scan(const SpinDensityMatrix& rho, int n_phase_points, double residual_tolerance = 1e-2);

/// Parity after the analysis rotation at a single phase.
double parity_at(const SpinDensityMatrix& rho, double phi);

struct Fidelity {
  double value = 0.0;
  bool clamped = false;
};

/// F = (P_0..0 + P_1..1)/2 + C/2, clamped to [0, 1].
Fidelity ghz_fidelity(double p_all_zero, double p_all_one, double contrast);
Fidelity ghz_fidelity(const Eigen::VectorXd& populations, double contrast);

struct GateResult {
  SpinDensityMatrix rho;
  Eigen::VectorXd populations;
  ParityScan parity;
  double fidelity = 0.0;
  bool fidelity_clamped = false;
  std::vector<int> qubits;  // 0-based ions simulated
  std::vector<std::string> warnings;

  int n_qubits() const { return static_cast<int>(qubits.size()); }
};

/// Restrict theta / alpha to the ions flagged in `mask`. Ions switched off carry no
/// amplitude, so they remain in |0> and factor out of the register exactly.
struct SubsetProblem {
  Eigen::MatrixXd theta;
  Eigen::MatrixXcd alpha;
  std::vector<int> qubits;
};
SubsetProblem restrict_to_subset(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha,
                                 const std::vector<bool>& mask);

/// Gate on |0...0>, pi/2 x rotations if N is odd, populations, parity scan and fidelity.
GateResult prepare_ghz(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha, const MotionalInit& motion,
                       int n_phase_points = 0);

/// Full pipeline for a pulse scheme: beams of ions outside `mask` are switched off
/// (amplitude zeroed, modulation untouched), the remaining register is evolved from
/// |0...0> and analysed with prepare_ghz. An empty mask drives every ion.
GateResult simulate_scheme(const LambDickeMatrix& eta, const NormalModeData& modes, PulseScheme scheme,
                           std::vector<bool> mask, const MotionalInit& motion, int n_phase_points = 0);

}  // namespace iongate
