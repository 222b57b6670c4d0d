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

#include "iongate/reference/serial_kernels.hpp"

#include <cmath>
#include <complex>

#include "iongate/constants.hpp"
#include "iongate/errors.hpp"

namespace iongate::reference {

namespace {

using cplx = std::complex<double>;

Eigen::MatrixXcd hadamard_matrix(int n) {
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = 1.0;
  Eigen::Matrix2cd h1;
  h1 << 1.0, 1.0, 1.0, -1.0;
  h1 /= std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXcd next(h.rows() * 2, h.cols() * 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) next.block(a * h.rows(), b * h.cols(), h.rows(), h.cols()) = h1(a, b) * h;
    h = next;
  }
  return h;
}

Eigen::MatrixXcd kron_power(const Eigen::Matrix2cd& op, int n) {
  Eigen::MatrixXcd out(1, 1);
  out(0, 0) = 1.0;
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) next.block(a * out.rows(), b * out.cols(), out.rows(), out.cols()) = op(a, b) * out;
    out = next;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd scaled_couplings(const ModeIntegrals& ints, const LambDickeMatrix& eta, const Eigen::MatrixXd& phases) {
  const auto n = phases.rows();
  const int kk = ints.n_segments();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index jp = 0; jp < n; ++jp) {
      if (j == jp) continue;
      double ordered = 0.0;
      for (int m = 0; m < ints.n_modes(); ++m) {
        const double c = 0.5 * eta.eta(j, m) * eta.eta(jp, m);
        for (int k = 0; k < kk; ++k) {
          const cplx ek = std::polar(1.0, -phases(j, k));
          for (int l = 0; l < k; ++l) {
            const cplx el = std::polar(1.0, -phases(jp, l));
            ordered -= c * (ints.f(m, k) * ek * std::conj(ints.f(m, l) * el)).imag();
          }
          ordered -= c * (ints.tri(m, k) * std::polar(1.0, -(phases(j, k) - phases(jp, k)))).imag();
        }
      }
      g(j, jp) += 0.5 * ordered;
      g(jp, j) += 0.5 * ordered;
    }
  return g;
}

SpinDensityMatrix evolve_with_residuals(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha,
                                        const MotionalInit& motion, const SpinDensityMatrix& rho_in) {
  const int n = register_size(rho_in);
  if (theta.rows() != n || alpha.rows() != n) throw InputError("reference::evolve_with_residuals: size mismatch");
  const Eigen::Index dim = rho_in.rows();
  const Eigen::MatrixXcd h = hadamard_matrix(n);
  Eigen::MatrixXcd rx = h * rho_in * h;
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) {
      double phase = 0.0;
      for (int j = 0; j < n; ++j)
        for (int jp = j + 1; jp < n; ++jp) {
          const double sr = ((r >> (n - 1 - j)) & 1 ? -1.0 : 1.0) * ((r >> (n - 1 - jp)) & 1 ? -1.0 : 1.0);
          const double sc = ((c >> (n - 1 - j)) & 1 ? -1.0 : 1.0) * ((c >> (n - 1 - jp)) & 1 ? -1.0 : 1.0);
          phase -= theta(j, jp) * (sr - sc);
        }
      cplx factor = std::polar(1.0, phase);
      for (Eigen::Index m = 0; m < alpha.cols(); ++m) {
        cplx dr = 0.0, dc = 0.0;
        for (int j = 0; j < n; ++j) {
          dr += ((r >> (n - 1 - j)) & 1 ? -1.0 : 1.0) * alpha(j, m);
          dc += ((c >> (n - 1 - j)) & 1 ? -1.0 : 1.0) * alpha(j, m);
        }
        const double nbar = motion.occupation(static_cast<int>(m));
        factor *= std::exp(-(2.0 * nbar + 1.0) * std::norm(dr - dc) / 2.0) * std::polar(1.0, (dr * std::conj(dc)).imag());
      }
      rx(r, c) *= factor;
    }
  return h * rx * h;
}

std::vector<double> parity_fringe(const SpinDensityMatrix& rho, const std::vector<double>& phases) {
  const int n = register_size(rho);
  const double s = std::sin(constants::kPi / 4);
  Eigen::Matrix2cd z;
  z << 1.0, 0.0, 0.0, -1.0;
  const Eigen::MatrixXcd zn = kron_power(z, n);
  std::vector<double> out;
  out.reserve(phases.size());
  for (double phi : phases) {
    Eigen::Matrix2cd r;
    r << s, cplx(0.0, -s) * std::polar(1.0, -phi), cplx(0.0, -s) * std::polar(1.0, phi), s;
    const Eigen::MatrixXcd rn = kron_power(r, n);
    out.push_back((zn * rn * rho * rn.adjoint()).trace().real());
  }
  return out;
}

}  // namespace iongate::reference
