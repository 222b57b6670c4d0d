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

// Helpers shared by the unit tests and the acceptance driver.

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <random>
#include <string>

#include "iongate/config.hpp"
#include "iongate/pulse_scheme.hpp"
#include "iongate/simulator.hpp"

namespace iongate::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(IONGATE_FIXTURE_DIR) / name;
}

struct Fixture {
  RunConfig config;
  ChainModel chain;
};

inline Fixture load_fixture(const std::string& config_name) {
  Fixture f;
  f.config = load_run_config(fixture_path(config_name));
  f.chain = build_chain(f.config.chain);
  return f;
}

/// Half the trace norm of a - b (both Hermitian).
inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::MatrixXcd diff = a - b;
  const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline Eigen::MatrixXd random_phases(std::mt19937_64& gen, int rows, int cols) {
  std::uniform_real_distribution<double> u(-3.14159, 3.14159);
  Eigen::MatrixXd p(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) p(i, k) = u(gen);
  return p;
}

/// Random symmetric coupling matrix with zero diagonal.
inline Eigen::MatrixXd random_theta(std::mt19937_64& gen, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int jp = j + 1; jp < n; ++jp) t(j, jp) = t(jp, j) = u(gen);
  return t;
}

inline Eigen::MatrixXcd random_alpha(std::mt19937_64& gen, int n, int m, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXcd a(n, m);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < m; ++k) a(j, k) = cplx(u(gen), u(gen));
  return a;
}

/// Random mixed state of n qubits (Wishart, rank 2^n).
inline SpinDensityMatrix random_density_matrix(std::mt19937_64& gen, int n) {
  const int dim = 1 << n;
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) a(i, k) = cplx(g(gen), g(gen));
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace();
}

/// Uniform theta(j, j') = value on every pair.
inline Eigen::MatrixXd uniform_theta(int n, double value) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(n, n, value);
  t.diagonal().setZero();
  return t;
}

}  // namespace iongate::testing
