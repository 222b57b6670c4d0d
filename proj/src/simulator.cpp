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

#include "iongate/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "iongate/constants.hpp"
#include "iongate/errors.hpp"

namespace iongate {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// s_j for the x-basis string `bits`, qubit 0 most significant.
inline double spin(unsigned bits, int j, int n) { return (bits >> (n - 1 - j)) & 1u ? -1.0 : 1.0; }

void fwht_inplace(cplx* v, Eigen::Index len, Eigen::Index stride) {
  for (Eigen::Index h = 1; h < len; h *= 2)
    for (Eigen::Index i = 0; i < len; i += 2 * h)
      for (Eigen::Index k = i; k < i + h; ++k) {
        const cplx a = v[k * stride];
        const cplx b = v[(k + h) * stride];
        v[k * stride] = a + b;
        v[(k + h) * stride] = a - b;
      }
}

void check_theta(const Eigen::MatrixXd& theta, int n) {
  if (theta.rows() != n || theta.cols() != n) {
    std::ostringstream msg;
    msg << "theta is " << theta.rows() << "x" << theta.cols() << " but the register has " << n << " qubits";
    throw InputError(msg.str());
  }
  const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j)
    for (int jp = j + 1; jp < n; ++jp)
      if (std::abs(theta(j, jp) - theta(jp, j)) > 1e-12 * scale) throw InputError("theta must be symmetric");
}

std::vector<double> ising_phases(const Eigen::MatrixXd& theta) {
  const int n = static_cast<int>(theta.rows());
  std::vector<double> phi(std::size_t{1} << n);
  for (unsigned b = 0; b < phi.size(); ++b) phi[b] = coupling_phase(theta, b);
  return phi;
}

// rho_x(s, s') *= exp(-i (phi_s - phi_s')) in the x basis.
SpinDensityMatrix apply_diagonal_phases(const std::vector<double>& phi, const SpinDensityMatrix& rho) {
  SpinDensityMatrix rx = hadamard_conjugate(rho);
  const auto dim = rx.rows();
#pragma omp parallel for
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) rx(r, c) *= std::polar(1.0, -(phi[r] - phi[c]));
  return hadamard_conjugate(rx);
}

}  // namespace

void MotionalInit::validate(int n_modes) const {
  if (nbar.size() != 0 && nbar.size() != n_modes) {
    std::ostringstream msg;
    msg << "MotionalInit: " << nbar.size() << " occupations for " << n_modes << " modes";
    throw InputError(msg.str());
  }
  for (Eigen::Index m = 0; m < nbar.size(); ++m)
    if (!std::isfinite(nbar[m]) || nbar[m] < 0.0) throw InputError("MotionalInit: nbar must be finite and >= 0");
}

int register_size(const SpinDensityMatrix& rho) {
  const auto dim = rho.rows();
  if (dim != rho.cols() || dim < 2 || !std::has_single_bit(static_cast<std::size_t>(dim)))
    throw InputError("density matrix must be square with dimension 2^N, N >= 1");
  const int n = std::countr_zero(static_cast<std::size_t>(dim));
  if (n > kMaxSimulatedQubits) throw InputError("register exceeds the simulator's qubit cap");
  return n;
}

void validate_density_matrix(const SpinDensityMatrix& rho, double tol) {
  register_size(rho);
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw InputError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol) throw InputError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw InputError("density matrix is not positive semidefinite");
}

SpinDensityMatrix ground_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxSimulatedQubits) throw InputError("ground_state: qubit count out of range");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  SpinDensityMatrix rho = SpinDensityMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return rho;
}

SpinDensityMatrix pure_state(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw InputError("pure_state: zero vector");
  const Eigen::VectorXcd v = psi / norm;
  return v * v.adjoint();
}

SpinDensityMatrix hadamard_conjugate(const SpinDensityMatrix& rho) {
  const int n = register_size(rho);
  const Eigen::Index dim = rho.rows();
  SpinDensityMatrix out = rho;
  cplx* data = out.data();  // column major
  for (Eigen::Index c = 0; c < dim; ++c) fwht_inplace(data + c * dim, dim, 1);
  for (Eigen::Index r = 0; r < dim; ++r) fwht_inplace(data + r, dim, dim);
  out /= static_cast<double>(Eigen::Index{1} << n);
  return out;
}

double coupling_phase(const Eigen::MatrixXd& theta, unsigned bits) {
  const int n = static_cast<int>(theta.rows());
  double sum = 0.0;
  for (int j = 0; j < n; ++j)
    for (int jp = j + 1; jp < n; ++jp) sum += theta(j, jp) * spin(bits, j, n) * spin(bits, jp, n);
  return sum;
}

SpinDensityMatrix evolve_ideal(const Eigen::MatrixXd& theta, const SpinDensityMatrix& rho_in) {
  const int n = register_size(rho_in);
  check_theta(theta, n);
  return apply_diagonal_phases(ising_phases(theta), rho_in);
}

SpinDensityMatrix evolve_with_residuals(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha,
                                        const MotionalInit& motion, const SpinDensityMatrix& rho_in) {
  const int n = register_size(rho_in);
  check_theta(theta, n);
  if (alpha.rows() != n) throw InputError("evolve_with_residuals: alpha rows must match the register size");
  const auto n_modes = static_cast<int>(alpha.cols());
  motion.validate(n_modes);
  if (alpha.size() == 0 || alpha.cwiseAbs().maxCoeff() == 0.0) return evolve_ideal(theta, rho_in);

  const Eigen::Index dim = rho_in.rows();
  const std::vector<double> phi = ising_phases(theta);
  // Branch displacements D(s, m) = sum_j s_j alpha(j, m).
  Eigen::MatrixXcd branch = Eigen::MatrixXcd::Zero(dim, n_modes);
  for (Eigen::Index b = 0; b < dim; ++b)
    for (int j = 0; j < n; ++j) branch.row(b) += spin(static_cast<unsigned>(b), j, n) * alpha.row(j);
  Eigen::VectorXd width(n_modes);
  for (int m = 0; m < n_modes; ++m) width[m] = 0.5 * (2.0 * motion.occupation(m) + 1.0);

  SpinDensityMatrix rx = hadamard_conjugate(rho_in);
#pragma omp parallel for
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      // Tr[D(D_s) rho_th D(D_s')^dag] = exp(-(2n+1)|D_s - D_s'|^2 / 2) exp(i Im(D_s D_s'^*))
      double re = 0.0, im = -(phi[r] - phi[c]);
      for (int m = 0; m < n_modes; ++m) {
        const cplx ds = branch(r, m);
        const cplx dsp = branch(c, m);
        re -= width[m] * std::norm(ds - dsp);
        im += (ds * std::conj(dsp)).imag();
      }
      rx(r, c) *= std::exp(cplx(re, im));
    }
  return hadamard_conjugate(rx);
}

SpinDensityMatrix rotate_all_x_half_pi(const SpinDensityMatrix& rho) {
  const int n = register_size(rho);
  std::vector<double> phi(static_cast<std::size_t>(rho.rows()));
  for (unsigned b = 0; b < phi.size(); ++b) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += spin(b, j, n);
    phi[b] = 0.25 * constants::kPi * s;
  }
  return apply_diagonal_phases(phi, rho);
}

double parity_at(const SpinDensityMatrix& rho, double phi) {
  const int n = register_size(rho);
  const double c = std::cos(constants::kPi / 4), s = std::sin(constants::kPi / 4);
  Eigen::Matrix2cd r;
  // cos(pi/4) I - i sin(pi/4)(cos phi X + sin phi Y)
  r << c, -kI * s * std::polar(1.0, -phi), -kI * s * std::polar(1.0, phi), c;
  Eigen::Matrix2cd z;
  z << 1.0, 0.0, 0.0, -1.0;
  const Eigen::Matrix2cd o = r.adjoint() * z * r;

  // Tr[rho O^{(x)N}] = sum_{b,b'} rho(b, b') prod_j O(b'_j, b_j)
  const Eigen::Index dim = rho.rows();
  cplx total = 0.0;
  for (Eigen::Index bp = 0; bp < dim; ++bp)
    for (Eigen::Index b = 0; b < dim; ++b) {
      cplx w = 1.0;
      for (int j = 0; j < n; ++j) {
        const int shift = n - 1 - j;
        w *= o((bp >> shift) & 1, (b >> shift) & 1);
      }
      total += rho(b, bp) * w;
    }
  return total.real();
}

ParityScan parity_scan(const SpinDensityMatrix& rho, int n_phase_points, double residual_tolerance) {
  const int n = register_size(rho);
  if (n_phase_points < 4 * n + 1) {
    std::ostringstream msg;
    msg << "parity_scan: need at least " << 4 * n + 1 << " phase points for " << n << " qubits";
    throw InputError(msg.str());
  }
  ParityScan out;
  out.phases.resize(static_cast<std::size_t>(n_phase_points));
  out.parity.resize(out.phases.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_phase_points; ++i) {
    out.phases[i] = constants::kTwoPi * i / n_phase_points;
    out.parity[i] = parity_at(rho, out.phases[i]);
  }

  Eigen::MatrixXd a(n_phase_points, 3);
  Eigen::VectorXd y(n_phase_points);
  for (int i = 0; i < n_phase_points; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::cos(n * out.phases[i]);
    a(i, 2) = std::sin(n * out.phases[i]);
    y[i] = out.parity[i];
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
  out.offset = coef[0];
  out.contrast = std::hypot(coef[1], coef[2]);
  out.phase_offset = std::atan2(-coef[2], coef[1]);
  out.fit_residual = std::sqrt((a * coef - y).squaredNorm() / n_phase_points);
  out.fit_flagged = out.fit_residual > residual_tolerance;

  double best = -1.0;
  for (int k = 1; 2 * k < n_phase_points; ++k) {
    cplx acc = 0.0;
    for (int i = 0; i < n_phase_points; ++i) acc += out.parity[i] * std::polar(1.0, -k * out.phases[i]);
    if (std::abs(acc) > best * (1.0 + 1e-9)) {
      best = std::abs(acc);
      out.dominant_frequency = k;
    }
  }
  return out;
}

Fidelity ghz_fidelity(double p_all_zero, double p_all_one, double contrast) {
  const double f = 0.5 * (p_all_zero + p_all_one) + 0.5 * contrast;
  Fidelity out{std::clamp(f, 0.0, 1.0), false};
  out.clamped = out.value != f;
  return out;
}

Fidelity ghz_fidelity(const Eigen::VectorXd& populations, double contrast) {
  if (populations.size() < 2) throw InputError("ghz_fidelity: need at least two populations");
  return ghz_fidelity(populations[0], populations[populations.size() - 1], contrast);
}

SubsetProblem restrict_to_subset(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha,
                                 const std::vector<bool>& mask) {
  const auto n = theta.rows();
  if (static_cast<Eigen::Index>(mask.size()) != n || alpha.rows() != n) {
    std::ostringstream msg;
    msg << "subset mask has " << mask.size() << " entries for " << n << " ions";
    throw InputError(msg.str());
  }
  SubsetProblem out;
  for (Eigen::Index j = 0; j < n; ++j)
    if (mask[static_cast<std::size_t>(j)]) out.qubits.push_back(static_cast<int>(j));
  if (out.qubits.empty()) throw InputError("subset mask selects no ions");
  const auto k = static_cast<Eigen::Index>(out.qubits.size());
  out.theta.resize(k, k);
  out.alpha.resize(k, alpha.cols());
  for (Eigen::Index a = 0; a < k; ++a) {
    out.alpha.row(a) = alpha.row(out.qubits[a]);
    for (Eigen::Index b = 0; b < k; ++b) out.theta(a, b) = theta(out.qubits[a], out.qubits[b]);
  }
  return out;
}

GateResult prepare_ghz(const Eigen::MatrixXd& theta, const Eigen::MatrixXcd& alpha, const MotionalInit& motion,
                       int n_phase_points) {
  const auto n = static_cast<int>(theta.rows());
  if (n < 1 || n > kMaxSimulatedQubits) throw InputError("prepare_ghz: qubit count out of range");
  GateResult out;
  out.rho = evolve_with_residuals(theta, alpha, motion, ground_state(n));
  if (n % 2 == 1) out.rho = rotate_all_x_half_pi(out.rho);
  out.populations = out.rho.diagonal().real();
  out.parity = parity_scan(out.rho, n_phase_points > 0 ? n_phase_points : 8 * n + 1);
  for (int j = 0; j < n; ++j) out.qubits.push_back(j);

  if (n == 1) {
    out.fidelity = 0.5;
    out.warnings.push_back("single qubit: no entanglement, fidelity set to the 0.5 convention");
    return out;
  }
  const Fidelity f = ghz_fidelity(out.populations, out.parity.contrast);
  out.fidelity = f.value;
  out.fidelity_clamped = f.clamped;
  if (f.clamped) out.warnings.push_back("fidelity clamped to [0, 1]");
  if (out.parity.fit_flagged) out.warnings.push_back("parity fringe deviates from a single harmonic");
  return out;
}

GateResult simulate_scheme(const LambDickeMatrix& eta, const NormalModeData& modes, PulseScheme scheme,
                           std::vector<bool> mask, const MotionalInit& motion, int n_phase_points) {
  scheme.validate();
  if (mask.empty()) mask.assign(static_cast<std::size_t>(scheme.n_ions()), true);
  if (static_cast<int>(mask.size()) != scheme.n_ions()) {
    std::ostringstream msg;
    msg << "subset mask has " << mask.size() << " entries for " << scheme.n_ions() << " ions";
    throw InputError(msg.str());
  }
  for (int j = 0; j < scheme.n_ions(); ++j)
    if (!mask[static_cast<std::size_t>(j)]) scheme.peak_amplitudes[j] = 0.0;

  const SchemeDiagnostics diag = diagnose(eta, modes, scheme, 0);
  const SubsetProblem sub = restrict_to_subset(diag.theta, diag.alpha, mask);
  GateResult result = prepare_ghz(sub.theta, sub.alpha, motion, n_phase_points);
  result.qubits = sub.qubits;
  return result;
}

}  // namespace iongate
