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
#include <cstdint>
#include <string>
#include <vector>

#include "iongate/chain.hpp"
#include "iongate/constants.hpp"
#include "iongate/errors.hpp"
#include "iongate/pulse_scheme.hpp"

namespace iongate {

struct SymmetryFlags {
  /// Ions j and N+1-j share phases and peak amplitude.
  bool mirror = true;
  /// phi_{j,k} = -phi_{j,K-k+1}.
  bool time_antisymmetric = true;
};

struct SynthesisProblem {
  LambDickeMatrix eta;
  NormalModeData modes;
  double detuning = 0.0;   // rad/s
  double gate_time = 0.0;  // s
  int n_segments = 1;
  SymmetryFlags symmetry;
  double target_coupling = constants::kPi / 4.0;
  int multistart = 64;
  std::uint64_t seed = 1;
  double constraint_tolerance = 1e-8;  // on normalized coupling residuals (inf-norm)
  double objective_tolerance = 1e-6;   // on sum |d|^2, gate-time units
  int max_outer_iterations = 25;
  int max_inner_iterations = 1000;

  int n_ions() const { return eta.n_ions(); }
  void validate() const;
};

/// Free phase variables after the mirror / time-antisymmetry reductions.
class ReducedVariableMap {
 public:
  ReducedVariableMap(int n_ions, int n_segments, SymmetryFlags flags);

  int n_vars() const { return n_vars_; }
  int n_ions() const { return n_ions_; }
  int n_segments() const { return n_segments_; }
  /// Ion classes; each class shares one phase pattern and one amplitude.
  const std::vector<std::vector<int>>& classes() const { return classes_; }
  int class_of(int ion) const { return class_of_[static_cast<std::size_t>(ion)]; }

  Eigen::MatrixXd expand(const Eigen::VectorXd& vars) const;
  /// Reads the free variables off a full phase matrix (first ion of each class).
  Eigen::VectorXd reduce(const Eigen::MatrixXd& phases) const;
  /// Chain rule: gradient w.r.t. the full N x K phases -> reduced gradient.
  Eigen::VectorXd reduce_gradient(const Eigen::MatrixXd& full_gradient) const;
  /// grad += d/dvars of a quantity depending on ion `ion` only through `row` (length K).
  void accumulate_row(int ion, const Eigen::VectorXd& row, Eigen::VectorXd& grad) const;
  /// True if `phases` lies in the symmetric subspace (to `tol`).
  bool contains(const Eigen::MatrixXd& phases, double tol) const;

 private:
  struct Entry {
    int var = -1;  // -1: fixed at zero
    double sign = 0.0;
  };
  int n_ions_;
  int n_segments_;
  int n_vars_ = 0;
  std::vector<std::vector<int>> classes_;
  std::vector<int> class_of_;
  std::vector<Entry> entries_;  // row-major N x K
};

/// Builds the reduced variable map; throws InputError if mirror symmetry is
/// requested but |eta_{j,m}| != |eta_{N+1-j,m}| beyond 1e-8 (relative to max |eta|).
ReducedVariableMap symmetry_reduce(const SynthesisProblem& problem);

/// Equality and inequality constraints on the scaled couplings, normalized by
/// a fixed problem-dependent coupling scale.
struct CouplingConstraints {
  Eigen::VectorXd equality;    // must vanish
  Eigen::VectorXd inequality;  // must be >= 0
  Eigen::MatrixXd equality_jacobian;    // rows x n_vars (empty if not requested)
  Eigen::MatrixXd inequality_jacobian;
};

/// Precomputed data for evaluating the phase problem repeatedly.
class PhaseProblem {
 public:
  explicit PhaseProblem(const SynthesisProblem& problem);

  const SynthesisProblem& problem() const { return *problem_; }
  const ReducedVariableMap& variables() const { return map_; }
  const ModeIntegrals& integrals() const { return ints_; }
  double coupling_scale() const { return coupling_scale_; }
  /// "mirror-explicit" for the reduced 4-ion equalities, "amplitude-explicit" from three
  /// ion classes on, otherwise "log-compatibility".
  const std::string& constraint_form() const { return constraint_form_; }

  /// Phase variables of the map, followed by one log-amplitude per ion class in the
  /// amplitude-explicit form.
  int n_vars() const { return map_.n_vars() + n_amp_; }
  int n_amplitude_vars() const { return n_amp_; }
  Eigen::MatrixXd phases(const Eigen::VectorXd& vars) const { return map_.expand(vars.head(map_.n_vars())); }
  /// Upper bound on the log-amplitudes, equivalent to |g| >= kappa g_scale.
  double log_amplitude_bound() const;
  /// Class c's sign under pattern bits (class 0 always positive).
  static double class_sign(int c, int pattern) { return c > 0 && ((pattern >> (c - 1)) & 1) ? -1.0 : 1.0; }

  /// sum_{j,m} |d_{j,m}|^2 and its gradient w.r.t. the reduced variables.
  double objective(const Eigen::VectorXd& vars, Eigen::VectorXd* gradient) const;
  /// Number of class sign patterns the multistart cycles through; 0 when the sign
  /// pattern is always 2-colourable (fewer than three ion classes).
  int n_sign_patterns() const;
  /// sign_pattern selects the class signs in the amplitude-explicit form (ignored otherwise).
  CouplingConstraints constraints(const Eigen::VectorXd& vars, bool with_jacobian, int sign_pattern = -1) const;
  /// Stacked [Re d; Im d] residuals and their Jacobian (for the final Newton polish).
  void displacement_residuals(const Eigen::VectorXd& vars, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const;

 private:
  const SynthesisProblem* problem_;
  ReducedVariableMap map_;
  ModeIntegrals ints_;
  double coupling_scale_ = 1.0;
  int n_amp_ = 0;
  std::string constraint_form_;
  std::vector<std::pair<int, int>> pair_reps_;     // one representative pair per pair class
  std::vector<std::pair<int, int>> mirror_pairs_;  // (j, N-1-j), j < N-1-j
  Eigen::MatrixXd compat_basis_;                   // rows: left null space of the incidence matrix

  struct PairValue {
    double value;
    Eigen::VectorXd gradient;
  };
  PairValue symmetric_coupling(const PhasedIntegrals& pi, int j, int jp, bool with_gradient) const;
};

/// Free-function forms of the evaluation operations.
std::pair<double, Eigen::VectorXd> objective_and_gradient(const Eigen::VectorXd& vars, const SynthesisProblem& problem);
CouplingConstraints coupling_constraints(const Eigen::VectorXd& vars, const SynthesisProblem& problem);

struct AmplitudeSolution {
  Eigen::VectorXd omega_tau;   // signed Omega_j^max * tau
  double max_relative_deviation = 0.0;
};

/// Signed peak amplitudes (times the gate time) with Omega_j Omega_j' g_{j,j'} = target:
/// magnitudes from least squares on log|g|, signs from a 2-colouring of the sign
/// pattern (first ion positive). Throws OptimizerError naming an odd cycle when the
/// sign pattern admits no colouring, or when some g_{j,j'} vanishes.
AmplitudeSolution solve_amplitudes(const Eigen::MatrixXd& g, double target);

struct StartOutcome {
  int start = 0;
  double objective = 0.0;
  double max_violation = 0.0;  // equality inf-norm and inequality shortfall
  double max_amplitude = 0.0;  // max |Omega tau|, NaN if the amplitude solve failed
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  int sign_pattern = -1;
  Eigen::VectorXd vars;
};

struct SynthesisResult {
  PulseScheme scheme;
  double objective = 0.0;
  Eigen::VectorXd equality_residuals;
  Eigen::VectorXd inequality_residuals;
  double max_violation = 0.0;
  double max_theta_deviation = 0.0;
  std::uint64_t seed = 0;
  int best_start = -1;
  std::string constraint_form;
  std::vector<StartOutcome> starts;  // ranked, best first
  std::vector<std::string> warnings;
};

/// Thrown when no start meets the tolerances; carries the best infeasible iterate.
class SynthesisFailure : public OptimizerError {
 public:
  SynthesisFailure(const std::string& what, SynthesisResult best) : OptimizerError(what), best_(std::move(best)) {}
  const SynthesisResult& best() const { return best_; }

 private:
  SynthesisResult best_;
};

/// Multistart augmented-Lagrangian search over the reduced phases, then the
/// amplitude solve. Deterministic for a given seed regardless of thread count.
SynthesisResult solve_phases(const SynthesisProblem& problem);

struct Synthesis {
  SynthesisResult result;
  SchemeDiagnostics diagnostics;
};

/// solve_phases + solve_amplitudes + diagnostics recomputed from the final scheme.
Synthesis synthesize(const SynthesisProblem& problem, int samples_per_segment = 20);

/// Naive feasibility count: free variables versus N*M + N(N-1)/2 constraints.
std::string feasibility_warning(const SynthesisProblem& problem);

}  // namespace iongate
