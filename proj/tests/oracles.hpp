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

// Brute-force reference evolutions used as oracles for the x-basis simulator.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "iongate/simulator.hpp"

namespace iongate::testing {

inline Eigen::MatrixXcd pauli_x() {
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

/// sigma_x on qubit q (0 = most significant) of an n-qubit register.
inline Eigen::MatrixXcd sigma_x_on(int q, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXcd f = i == q ? pauli_x() : Eigen::MatrixXcd::Identity(2, 2);
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

/// exp(-i sum_{j<j'} theta sigma_x sigma_x) by dense matrix exponential.
inline SpinDensityMatrix dense_ideal_gate(const Eigen::MatrixXd& theta, const SpinDensityMatrix& rho) {
  const int n = static_cast<int>(theta.rows());
  const int dim = 1 << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < n; ++j)
    for (int jp = j + 1; jp < n; ++jp) h += theta(j, jp) * sigma_x_on(j, n) * sigma_x_on(jp, n);
  const Eigen::MatrixXcd u = (cplx(0.0, -1.0) * h).exp();
  return u * rho * u.adjoint();
}

/// Full spin (x) Fock-space evolution with the motion traced out. One mode,
/// thermal initial state with mean occupation nbar, Fock space truncated at `levels`.
inline SpinDensityMatrix fock_gate(const Eigen::MatrixXd& theta, const Eigen::VectorXcd& alpha, double nbar,
                                   int levels, const SpinDensityMatrix& rho_spin) {
  const int n = static_cast<int>(theta.rows());
  const int ds = 1 << n;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXcd id_m = Eigen::MatrixXcd::Identity(levels, levels);
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(ds * levels, ds * levels);
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXcd disp = alpha[j] * a.adjoint() - std::conj(alpha[j]) * a;
    gen += Eigen::kroneckerProduct(sigma_x_on(j, n), disp);
    for (int jp = j + 1; jp < n; ++jp)
      gen += cplx(0.0, -theta(j, jp)) * Eigen::kroneckerProduct((sigma_x_on(j, n) * sigma_x_on(jp, n)).eval(), id_m);
  }
  const Eigen::MatrixXcd u = gen.exp();
  Eigen::MatrixXcd thermal = Eigen::MatrixXcd::Zero(levels, levels);
  for (int k = 0; k < levels; ++k) thermal(k, k) = std::pow(nbar, k) / std::pow(nbar + 1.0, k + 1);
  if (nbar == 0.0) thermal(0, 0) = 1.0;
  const Eigen::MatrixXcd full = u * Eigen::kroneckerProduct(rho_spin, thermal) * u.adjoint();
  SpinDensityMatrix out = SpinDensityMatrix::Zero(ds, ds);
  for (int r = 0; r < ds; ++r)
    for (int c = 0; c < ds; ++c) out(r, c) = full.block(r * levels, c * levels, levels, levels).trace();
  return out;
}

}  // namespace iongate::testing
