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

// Straightforward single-threaded versions of the hot kernels. Kept for
// cross-checking the parallel code paths and as the benchmark baseline.
#pragma once

#include <Eigen/Dense>

#include "iongate/chain.hpp"
#include "iongate/pulse_scheme.hpp"
#include "iongate/simulator.hpp"

namespace iongate::reference {

/// Direct O(K^2) double sum over segment pairs for the symmetrized scaled coupling.
Eigen::MatrixXd scaled_couplings(const ModeIntegrals& ints, const LambDickeMatrix& eta, const Eigen::MatrixXd& phases);

/// Same physics as iongate::evolve_with_residuals, built from dense matrices:
/// explicit Hadamard product and an elementwise loop, no threading.
SpinDensityMatrix evolve_with_residuals(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha,
                                        const MotionalInit& motion, const SpinDensityMatrix& rho_in);

/// Parity fringe by explicit Kronecker products of the analysis rotation.
std::vector<double> parity_fringe(const SpinDensityMatrix& rho, const std::vector<double>& phases);

}  // namespace iongate::reference
