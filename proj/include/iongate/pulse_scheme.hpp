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
#include <complex>
#include <string>
#include <vector>

#include "iongate/chain.hpp"

namespace iongate {

using cplx = std::complex<double>;

/// Discretely phase-modulated, sin^2-edged bichromatic drive.
///
/// Units: detuning in rad/s, gate_time in s, phases in rad (N x K),
/// peak_amplitudes Omega_j^max in rad/s and signed.
struct PulseScheme {
  double detuning = 0.0;
  double gate_time = 0.0;
  int n_segments = 1;
  Eigen::MatrixXd phases;
  Eigen::VectorXd peak_amplitudes;
  std::string comment;

  int n_ions() const { return static_cast<int>(phases.rows()); }
  double segment_duration() const { return gate_time / n_segments; }
  /// Throws InputError on inconsistent shapes or non-positive durations.
  void validate() const;
};

/// Maps an angle to (-pi, pi].
double wrap_phase(double phi);

/// Full-segment integrals per mode, in gate-time units (s = t / tau).
///   f(m, k) = int_seg w(s) e^{i delta_m s} ds
///   tri(m, k) = int_seg ds2 int_{seg start}^{s2} ds1 w w e^{i delta_m (s2 - s1)}
/// with delta_m = (nu_m - mu) tau.
struct ModeIntegrals {
  Eigen::VectorXd delta;
  Eigen::MatrixXcd f;
  Eigen::MatrixXcd tri;

  int n_modes() const { return static_cast<int>(delta.size()); }
  int n_segments() const { return static_cast<int>(f.cols()); }
};

ModeIntegrals mode_integrals(const Eigen::VectorXd& mode_frequencies, double detuning,
                             double gate_time, int n_segments);

/// Ts(m, k) = int_seg w sin(delta_m s), Tc(m, k) = -int_seg w cos(delta_m s);
/// gate-time units.
struct TsTc {
  Eigen::MatrixXd ts;
  Eigen::MatrixXd tc;
};

TsTc ts_tc_kernels(const NormalModeData& modes, const PulseScheme& scheme);

/// Gs/Gc for one ordered ion pair (j at the later time t2, j' at t1);
/// K x K, zero above the diagonal.
struct PairKernel {
  Eigen::MatrixXd gs;
  Eigen::MatrixXd gc;
};

struct SchemeKernels {
  TsTc t;
  int n_ions = 0;
  std::vector<PairKernel> pairs;  // row-major over (j, j')

  const PairKernel& pair(int j, int jp) const { return pairs[static_cast<std::size_t>(j * n_ions + jp)]; }
};

/// Gs/Gc for every ordered pair (including j == j').
std::vector<PairKernel> gs_gc_kernels(const LambDickeMatrix& eta, const NormalModeData& modes,
                                      const PulseScheme& scheme);

SchemeKernels scheme_kernels(const LambDickeMatrix& eta, const NormalModeData& modes,
                             const PulseScheme& scheme);

/// d(j, m) = (Ts_m^T X_j + Tc_m^T Y_j) + i (Tc_m^T X_j - Ts_m^T Y_j).
Eigen::MatrixXcd scaled_displacements(const TsTc& t, const PulseScheme& scheme);

/// Symmetrized scaled couplings from the Gs/Gc matrices; zero diagonal.
/// The ordered form g_{j,j'} = X_j^T Gs X_j' + Y_j^T Gs Y_j' + X_j^T Gc Y_j' - Y_j^T Gc X_j'
/// is averaged with g_{j',j}: the average is the Magnus coefficient of
/// sigma_x^j sigma_x^j', and the two orderings agree once trajectories close.
Eigen::MatrixXd scaled_couplings(const SchemeKernels& kernels, const PulseScheme& scheme);

/// Same quantity as scaled_couplings, computed from ModeIntegrals with
/// prefix sums (O(M K) per pair) and parallelized over pairs.
Eigen::MatrixXd scaled_couplings(const ModeIntegrals& ints, const LambDickeMatrix& eta,
                                 const Eigen::MatrixXd& phases);

/// Ordered (unsymmetrized) coupling of ion j (later time) to ion jp and its
/// derivative with respect to every phase; gradient rows other than j and jp are zero.
struct OrderedCoupling {
  double value = 0.0;
  Eigen::MatrixXd gradient;  // N x K
};

OrderedCoupling ordered_coupling(const ModeIntegrals& ints, const LambDickeMatrix& eta,
                                 const Eigen::MatrixXd& phases, int j, int jp, bool with_gradient);

/// u[j](m, k) = f(m, k) e^{-i phi_{j,k}}; computed once and shared by all pair evaluations.
struct PhasedIntegrals {
  Eigen::MatrixXcd phasor;          // N x K, e^{-i phi}
  std::vector<Eigen::MatrixXcd> u;  // per ion, M x K
};

PhasedIntegrals phased_integrals(const ModeIntegrals& ints, const Eigen::MatrixXd& phases);

struct PairCoupling {
  double value = 0.0;       // symmetrized g(j, j')
  Eigen::VectorXd grad_j;   // d value / d phi(j, .)
  Eigen::VectorXd grad_jp;  // d value / d phi(j', .)
};

/// Both orderings of one pair in a single pass. Equals the average of the two
/// ordered_coupling() calls; only rows j and j' of the gradient are non-zero.
PairCoupling pair_coupling(const ModeIntegrals& ints, const LambDickeMatrix& eta, const PhasedIntegrals& pi, int j,
                           int jp, bool with_gradient);

/// d(j, m) = -i sum_k f(m, k) e^{-i phi_{j,k}}  (identical to the Ts/Tc form).
Eigen::MatrixXcd scaled_displacements(const ModeIntegrals& ints, const Eigen::MatrixXd& phases);

/// alpha(j, m) = eta(j, m) * Omega_j tau * d(j, m) / 2.
Eigen::MatrixXcd residual_displacements(const LambDickeMatrix& eta, const Eigen::MatrixXcd& d,
                                        const PulseScheme& scheme);

/// theta(j, j') = Omega_j tau * Omega_j' tau * g(j, j').
Eigen::MatrixXd coupling_matrix(const Eigen::MatrixXd& g, const PulseScheme& scheme);

struct TrajectorySamples {
  std::vector<double> times;             // s
  std::vector<Eigen::MatrixXcd> alpha;   // N x M per time
  std::vector<Eigen::MatrixXd> theta;    // N x N per time
};

/// Time-resolved alpha_{j,m}(t) and theta_{j,j'}(t) on a uniform grid aligned
/// with segment boundaries (`samples_per_segment` intervals per segment,
/// first sample at t = 0, last at t = tau).
TrajectorySamples trajectory_samples(const LambDickeMatrix& eta, const NormalModeData& modes,
                                     const PulseScheme& scheme, int samples_per_segment);

struct SchemeDiagnostics {
  Eigen::MatrixXcd d;      // gate-time units
  Eigen::MatrixXcd alpha;  // alpha_{j,m}(tau)
  Eigen::MatrixXd g;
  Eigen::MatrixXd theta;
  TrajectorySamples samples;

  double max_abs_alpha() const;
  double objective() const;  // sum |d|^2
  /// max_{j<j', both driven} |theta - target| / target
  double max_theta_deviation(double target, const PulseScheme& scheme) const;
};

SchemeDiagnostics diagnose(const LambDickeMatrix& eta, const NormalModeData& modes,
                           const PulseScheme& scheme, int samples_per_segment);

}  // namespace iongate
