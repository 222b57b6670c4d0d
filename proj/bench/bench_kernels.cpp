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

// Parallel kernels against the serial reference. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "iongate/chain.hpp"
#include "iongate/reference/serial_kernels.hpp"
#include "iongate/simulator.hpp"

namespace {

using namespace iongate;

struct Chain {
  NormalModeData modes;
  LambDickeMatrix eta;
  ModeIntegrals ints;
  Eigen::MatrixXd phases;
};

Chain make_chain(int n, int kk) {
  TrapConfig trap;
  trap.n_ions = n;
  trap.axial_freq = constants::kTwoPi * 0.41e6;
  trap.transverse_freq = constants::kTwoPi * 2.186e6;
  Chain c;
  c.modes = transverse_normal_modes(trap);
  c.eta = lamb_dicke_parameters(c.modes, trap);
  c.ints = mode_integrals(c.modes.frequencies, constants::kTwoPi * 2.104e6, kk * 10e-6, kk);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-constants::kPi, constants::kPi);
  c.phases = Eigen::MatrixXd::NullaryExpr(n, kk, [&] { return u(gen); });
  return c;
}

void BM_Couplings(benchmark::State& state) {
  const Chain c = make_chain(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(scaled_couplings(c.ints, c.eta, c.phases));
}

void BM_CouplingsSerial(benchmark::State& state) {
  const Chain c = make_chain(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::scaled_couplings(c.ints, c.eta, c.phases));
}

struct Gate {
  Eigen::MatrixXd theta;
  Eigen::MatrixXcd alpha;
  MotionalInit motion;
  SpinDensityMatrix rho;
};

Gate make_gate(int n) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> g(0.0, 0.05);
  Gate s;
  s.theta = Eigen::MatrixXd::Constant(n, n, constants::kPi / 4);
  s.alpha = Eigen::MatrixXcd::NullaryExpr(n, n, [&] { return cplx(g(gen), g(gen)); });
  s.motion.nbar = Eigen::VectorXd::Constant(n, 0.1);
  Eigen::VectorXcd psi = Eigen::VectorXcd::NullaryExpr(1 << n, [&] { return cplx(g(gen), g(gen)); });
  s.rho = pure_state(psi.normalized());
  return s;
}

void BM_Evolve(benchmark::State& state) {
  const Gate s = make_gate(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evolve_with_residuals(s.theta, s.alpha, s.motion, s.rho));
}

void BM_EvolveSerial(benchmark::State& state) {
  const Gate s = make_gate(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::evolve_with_residuals(s.theta, s.alpha, s.motion, s.rho));
}

std::vector<double> fringe_phases() {
  std::vector<double> p(64);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = constants::kTwoPi * static_cast<double>(i) / 64.0;
  return p;
}

void BM_Parity(benchmark::State& state) {
  const Gate s = make_gate(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parity_scan(s.rho, 64));
}

void BM_ParitySerial(benchmark::State& state) {
  const Gate s = make_gate(static_cast<int>(state.range(0)));
  const std::vector<double> phases = fringe_phases();
  for (auto _ : state) benchmark::DoNotOptimize(reference::parity_fringe(s.rho, phases));
}

}  // namespace

BENCHMARK(BM_Couplings)->Args({4, 12})->Args({6, 18})->Args({10, 30});
BENCHMARK(BM_CouplingsSerial)->Args({4, 12})->Args({6, 18})->Args({10, 30});
BENCHMARK(BM_Evolve)->DenseRange(3, 7, 2);
BENCHMARK(BM_EvolveSerial)->DenseRange(3, 7, 2);
BENCHMARK(BM_Parity)->DenseRange(3, 7, 2);
BENCHMARK(BM_ParitySerial)->DenseRange(3, 7, 2);

BENCHMARK_MAIN();
