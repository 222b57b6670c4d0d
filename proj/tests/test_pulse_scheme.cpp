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

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "iongate/errors.hpp"
#include "iongate/pulse_scheme.hpp"
#include "iongate/reference/serial_kernels.hpp"
#include "iongate/segment_integrals.hpp"
#include "support.hpp"

namespace iongate {
namespace {

using boost::math::quadrature::gauss_kronrod;
using constants::mhz_to_angular;

struct Drive {
  TrapConfig trap;
  NormalModeData modes;
  LambDickeMatrix eta;
  PulseScheme scheme;
};

Drive make_drive(int n, int kk, std::uint64_t seed) {
  Drive s;
  s.trap.n_ions = n;
  s.trap.axial_freq = mhz_to_angular(0.41);
  s.trap.transverse_freq = mhz_to_angular(2.19);
  s.modes = transverse_normal_modes(s.trap);
  s.eta = lamb_dicke_parameters(s.modes, s.trap);
  std::mt19937_64 gen(seed);
  s.scheme.detuning = mhz_to_angular(2.1);
  s.scheme.gate_time = 60e-6;
  s.scheme.n_segments = kk;
  s.scheme.phases = testing::random_phases(gen, n, kk);
  std::uniform_real_distribution<double> amp(-0.3, 0.3);
  s.scheme.peak_amplitudes.resize(n);
  for (int j = 0; j < n; ++j) s.scheme.peak_amplitudes[j] = mhz_to_angular(amp(gen));
  return s;
}

// Piecewise Gauss-Kronrod over the segments overlapping [0, s].
template <class F>
double piecewise(F f, double s, int kk) {
  double total = 0.0;
  for (int k = 0; k < kk && k < s * kk + 1e-12; ++k) {
    const double a = static_cast<double>(k) / kk;
    const double b = std::min(s, static_cast<double>(k + 1) / kk);
    if (b > a) total += gauss_kronrod<double, 21>::integrate(f, a, b, 10, 1e-13);
  }
  return total;
}

struct QuadOracle {
  const Drive& s;
  int kk() const { return s.scheme.n_segments; }
  double window(double x) const { return window_value(x, 1.0, 1.0 / kk()); }
  double phase(int j, double x) const {
    const int k = std::min(static_cast<int>(x * kk()), kk() - 1);
    return s.scheme.phases(j, k);
  }
  double delta(int m) const { return (s.modes.frequencies[m] - s.scheme.detuning) * s.scheme.gate_time; }
  // int_0^x w e^{i delta s} e^{-i phi_j}
  cplx single(int j, int m, double x) const {
    auto re = [&](double t) { return window(t) * std::cos(delta(m) * t - phase(j, t)); };
    auto im = [&](double t) { return window(t) * std::sin(delta(m) * t - phase(j, t)); };
    return {piecewise(re, x, kk()), piecewise(im, x, kk())};
  }
  cplx alpha(int j, int m, double x) const {
    const double amp = s.scheme.peak_amplitudes[j] * s.scheme.gate_time;
    return 0.5 * s.eta.eta(j, m) * amp * cplx(0.0, -1.0) * single(j, m, x);
  }
  double ordered_g(int j, int jp, double x) const {
    double total = 0.0;
    for (int m = 0; m < s.modes.n_modes(); ++m) {
      auto f = [&](double t) {
        const cplx outer = window(t) * std::exp(cplx(0.0, delta(m) * t - phase(j, t)));
        return (outer * std::conj(single(jp, m, t))).imag();
      };
      total += -0.5 * s.eta.eta(j, m) * s.eta.eta(jp, m) * piecewise(f, x, kk());
    }
    return total;
  }
  double theta(int j, int jp, double x) const {
    const double a = s.scheme.peak_amplitudes[j] * s.scheme.peak_amplitudes[jp] * s.scheme.gate_time *
                     s.scheme.gate_time;
    return a * 0.5 * (ordered_g(j, jp, x) + ordered_g(jp, j, x));
  }
};

TEST(ModeIntegrals, MatchSegmentKernels) {
  const Drive s = make_drive(3, 5, 1);
  const ModeIntegrals ints =
      mode_integrals(s.modes.frequencies, s.scheme.detuning, s.scheme.gate_time, s.scheme.n_segments);
  for (int m = 0; m < 3; ++m) {
    EXPECT_DOUBLE_EQ(ints.delta[m], (s.modes.frequencies[m] - s.scheme.detuning) * s.scheme.gate_time);
    for (int k = 0; k < 5; ++k) {
      EXPECT_EQ(ints.f(m, k), segment_exp_integral(k, 5, ints.delta[m], 0.2));
      EXPECT_EQ(ints.tri(m, k), segment_triangle_integral(k, 5, ints.delta[m], 0.2));
    }
  }
}

TEST(Displacements, TsTcFormEqualsPhasorForm) {
  const Drive s = make_drive(4, 7, 2);
  const TsTc t = ts_tc_kernels(s.modes, s.scheme);
  const ModeIntegrals ints =
      mode_integrals(s.modes.frequencies, s.scheme.detuning, s.scheme.gate_time, s.scheme.n_segments);
  const Eigen::MatrixXcd a = scaled_displacements(t, s.scheme);
  const Eigen::MatrixXcd b = scaled_displacements(ints, s.scheme.phases);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Couplings, AllImplementationsAgree) {
  for (int n : {2, 3, 5}) {
    const Drive s = make_drive(n, 8, 10 + n);
    const ModeIntegrals ints =
        mode_integrals(s.modes.frequencies, s.scheme.detuning, s.scheme.gate_time, s.scheme.n_segments);
    const Eigen::MatrixXd from_kernels = scaled_couplings(scheme_kernels(s.eta, s.modes, s.scheme), s.scheme);
    const Eigen::MatrixXd fast = scaled_couplings(ints, s.eta, s.scheme.phases);
    const Eigen::MatrixXd serial = reference::scaled_couplings(ints, s.eta, s.scheme.phases);
    const double scale = fast.cwiseAbs().maxCoeff();
    EXPECT_LT((from_kernels - fast).cwiseAbs().maxCoeff(), 1e-13 * scale);
    EXPECT_LT((serial - fast).cwiseAbs().maxCoeff(), 1e-13 * scale);
    EXPECT_EQ((fast - fast.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(fast.diagonal().cwiseAbs().maxCoeff(), 0.0);

    const PhasedIntegrals pi = phased_integrals(ints, s.scheme.phases);
    for (int j = 0; j < n; ++j)
      for (int jp = j + 1; jp < n; ++jp) {
        const double avg = 0.5 * (ordered_coupling(ints, s.eta, s.scheme.phases, j, jp, false).value +
                                  ordered_coupling(ints, s.eta, s.scheme.phases, jp, j, false).value);
        EXPECT_NEAR(pair_coupling(ints, s.eta, pi, j, jp, false).value, avg, 1e-14 * scale);
        EXPECT_NEAR(fast(j, jp), avg, 1e-14 * scale);
      }
  }
}

TEST(Couplings, DependOnlyOnPhaseDifferences) {
  const Drive s = make_drive(3, 6, 3);
  const ModeIntegrals ints =
      mode_integrals(s.modes.frequencies, s.scheme.detuning, s.scheme.gate_time, s.scheme.n_segments);
  const Eigen::MatrixXd g0 = scaled_couplings(ints, s.eta, s.scheme.phases);
  const Eigen::MatrixXd shifted = (s.scheme.phases.array() + 0.731).matrix();
  EXPECT_LT((scaled_couplings(ints, s.eta, shifted) - g0).cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::MatrixXcd d0 = scaled_displacements(ints, s.scheme.phases);
  EXPECT_LT((scaled_displacements(ints, shifted).cwiseAbs() - d0.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Couplings, MirrorSymmetricSchemeGivesMirroredCouplings) {
  Drive s = make_drive(5, 6, 4);
  for (int j = 0; j < 2; ++j) s.scheme.phases.row(4 - j) = s.scheme.phases.row(j);
  const ModeIntegrals ints =
      mode_integrals(s.modes.frequencies, s.scheme.detuning, s.scheme.gate_time, s.scheme.n_segments);
  const Eigen::MatrixXd g = scaled_couplings(ints, s.eta, s.scheme.phases);
  for (int j = 0; j < 5; ++j)
    for (int jp = 0; jp < 5; ++jp) EXPECT_NEAR(g(j, jp), g(4 - j, 4 - jp), 1e-12 * g.cwiseAbs().maxCoeff());
}

TEST(Couplings, PairGradientMatchesCentralDifferences) {
  const Drive s = make_drive(3, 6, 5);
  const ModeIntegrals ints =
      mode_integrals(s.modes.frequencies, s.scheme.detuning, s.scheme.gate_time, s.scheme.n_segments);
  const PairCoupling pc = pair_coupling(ints, s.eta, phased_integrals(ints, s.scheme.phases), 0, 2, true);
  const OrderedCoupling oc = ordered_coupling(ints, s.eta, s.scheme.phases, 2, 0, true);
  const double h = 1e-6;
  for (int row : {0, 2}) {
    for (int k = 0; k < 6; ++k) {
      Eigen::MatrixXd p = s.scheme.phases, q = s.scheme.phases;
      p(row, k) += h;
      q(row, k) -= h;
      const double fd = (scaled_couplings(ints, s.eta, p)(0, 2) - scaled_couplings(ints, s.eta, q)(0, 2)) / (2 * h);
      const double an = row == 0 ? pc.grad_j[k] : pc.grad_jp[k];
      EXPECT_NEAR(an, fd, 1e-7 * std::max(1e-3, std::abs(fd))) << row << "," << k;
      const double fdo = (ordered_coupling(ints, s.eta, p, 2, 0, false).value -
                          ordered_coupling(ints, s.eta, q, 2, 0, false).value) /
                         (2 * h);
      EXPECT_NEAR(oc.gradient(row, k), fdo, 1e-7 * std::max(1e-3, std::abs(fdo)));
    }
  }
  EXPECT_EQ(oc.gradient.row(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Trajectory, MatchesNestedQuadrature) {
  const Drive s = make_drive(3, 4, 6);
  const TrajectorySamples samples = trajectory_samples(s.eta, s.modes, s.scheme, 3);
  ASSERT_EQ(samples.times.size(), 13u);
  EXPECT_EQ(samples.times.front(), 0.0);
  EXPECT_NEAR(samples.times.back(), s.scheme.gate_time, 1e-18);
  EXPECT_EQ(samples.alpha.front().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(samples.theta.front().cwiseAbs().maxCoeff(), 0.0);
  const QuadOracle oracle{s};
  for (std::size_t i : {1u, 5u, 8u, 12u}) {
    const double x = samples.times[i] / s.scheme.gate_time;
    for (int j = 0; j < 3; ++j)
      for (int m = 0; m < 3; ++m) EXPECT_LT(std::abs(samples.alpha[i](j, m) - oracle.alpha(j, m, x)), 1e-11);
    for (int j = 0; j < 3; ++j)
      for (int jp = j + 1; jp < 3; ++jp) EXPECT_NEAR(samples.theta[i](j, jp), oracle.theta(j, jp, x), 1e-11);
  }
}

TEST(Diagnose, EndpointsAgreeWithClosedForm) {
  const Drive s = make_drive(4, 8, 7);
  const SchemeDiagnostics diag = diagnose(s.eta, s.modes, s.scheme, 5);
  EXPECT_LT((diag.samples.alpha.back() - diag.alpha).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((diag.samples.theta.back() - diag.theta).cwiseAbs().maxCoeff(), 1e-13);
  const Eigen::VectorXd amp = s.scheme.peak_amplitudes * s.scheme.gate_time;
  for (int j = 0; j < 4; ++j) {
    for (int m = 0; m < 4; ++m)
      EXPECT_LT(std::abs(diag.alpha(j, m) - 0.5 * s.eta.eta(j, m) * amp[j] * diag.d(j, m)), 1e-15);
    for (int jp = 0; jp < 4; ++jp)
      if (jp != j) EXPECT_NEAR(diag.theta(j, jp), amp[j] * amp[jp] * diag.g(j, jp), 1e-15);
  }
  EXPECT_NEAR(diag.objective(), diag.d.cwiseAbs2().sum(), 0.0);
  EXPECT_EQ(diag.max_abs_alpha(), diag.alpha.cwiseAbs().maxCoeff());
}

TEST(Diagnose, ThetaDeviationIgnoresUndrivenIons) {
  Drive s = make_drive(3, 4, 8);
  s.scheme.peak_amplitudes[1] = 0.0;
  const SchemeDiagnostics diag = diagnose(s.eta, s.modes, s.scheme, 0);
  const double target = constants::kPi / 4;
  EXPECT_NEAR(diag.max_theta_deviation(target, s.scheme), std::abs(diag.theta(0, 2) - target) / target, 1e-15);
  EXPECT_TRUE(diag.samples.times.empty());
}

TEST(PulseScheme, ValidationAndPhaseWrapping) {
  Drive s = make_drive(2, 3, 9);
  EXPECT_NO_THROW(s.scheme.validate());
  PulseScheme bad = s.scheme;
  bad.phases.resize(2, 4);
  EXPECT_THROW(bad.validate(), InputError);
  bad = s.scheme;
  bad.gate_time = 0.0;
  EXPECT_THROW(bad.validate(), InputError);
  bad = s.scheme;
  bad.peak_amplitudes.resize(3);
  EXPECT_THROW(bad.validate(), InputError);
  bad = s.scheme;
  bad.phases(0, 0) = std::nan("");
  EXPECT_THROW(bad.validate(), InputError);
  EXPECT_THROW(diagnose(LambDickeMatrix{Eigen::MatrixXd::Ones(3, 2)}, s.modes, s.scheme, 0), InputError);

  using constants::kPi;
  EXPECT_DOUBLE_EQ(wrap_phase(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_phase(-kPi), kPi);
  EXPECT_NEAR(wrap_phase(3 * kPi + 0.25), -kPi + 0.25, 1e-14);
  EXPECT_NEAR(wrap_phase(-7.0), -7.0 + 2 * kPi, 1e-14);
}

}  // namespace
}  // namespace iongate
