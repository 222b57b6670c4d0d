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

#include "iongate/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "iongate/errors.hpp"

namespace iongate {

namespace {

// Scaled force on each ion: harmonic restoring term minus Coulomb repulsion.
Eigen::VectorXd force_residual(const Eigen::VectorXd& u) {
  const auto n = u.size();
  Eigen::VectorXd f = u;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double r = u[i] - u[k];
      f[i] -= std::copysign(1.0, r) / (r * r);
    }
  }
  return f;
}

Eigen::MatrixXd force_jacobian(const Eigen::VectorXd& u) {
  const auto n = u.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double c = 2.0 / std::pow(std::abs(u[i] - u[k]), 3);
      jac(i, i) += c;
      jac(i, k) -= c;
    }
  }
  return jac;
}

double scaled_potential(const Eigen::VectorXd& u) {
  double v = 0.5 * u.squaredNorm();
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index k = i + 1; k < u.size(); ++k) v += 1.0 / std::abs(u[i] - u[k]);
  return v;
}

bool strictly_increasing(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (!(u[i] > u[i - 1])) return false;
  return true;
}

// Fallback: steepest descent on the potential with backtracking.
Eigen::VectorXd minimize_potential(Eigen::VectorXd u) {
  double v = scaled_potential(u);
  for (int iter = 0; iter < 200000; ++iter) {
    const Eigen::VectorXd g = force_residual(u);
    if (g.lpNorm<Eigen::Infinity>() < 1e-13) break;
    double step = 0.1;
    while (step > 1e-16) {
      Eigen::VectorXd trial = u - step * g;
      if (strictly_increasing(trial)) {
        const double vt = scaled_potential(trial);
        if (vt < v) {
          u = trial;
          v = vt;
          break;
        }
      }
      step *= 0.5;
    }
    if (step <= 1e-16) break;
  }
  return u;
}

constexpr double kForceTolerance = 1e-12;

// Eigenvalues of the dimensionless transverse Coulomb matrix; the transverse
// spectrum is nu_m^2 = nu_x^2 + nu_ax^2 * c_m for every trap.
struct CoulombSpectrum {
  Eigen::VectorXd c;        // descending
  Eigen::MatrixXd vectors;  // columns aligned with c
};

CoulombSpectrum coulomb_spectrum(int n) {
  const std::vector<double> pos = equilibrium_positions_scaled(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const double c = 1.0 / std::pow(std::abs(pos[i] - pos[k]), 3);
      m(i, i) -= c;
      m(i, k) += c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  CoulombSpectrum out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (int col = 0; col < n; ++col) {
    const int src = n - 1 - col;  // solver sorts ascending
    out.c[col] = es.eigenvalues()[src];
    Eigen::VectorXd v = es.eigenvectors().col(src);
    // Sign convention: first non-negligible component positive.
    for (int j = 0; j < n; ++j) {
      if (std::abs(v[j]) > 1e-9) {
        if (v[j] < 0) v = -v;
        break;
      }
    }
    out.vectors.col(col) = v;
  }
  return out;
}

}  // namespace

void TrapConfig::validate() const {
  if (n_ions < 1) throw InputError("TrapConfig: n_ions must be >= 1");
  if (!(axial_freq > 0.0) || !(transverse_freq > 0.0))
    throw InputError("TrapConfig: trap frequencies must be positive");
  if (!(ion_mass > 0.0)) throw InputError("TrapConfig: ion_mass must be positive");
  if (!(raman_wavelength > 0.0)) throw InputError("TrapConfig: raman_wavelength must be positive");
}

double chain_length_scale(const TrapConfig& cfg) {
  using namespace constants;
  const double e2 = kElementaryCharge * kElementaryCharge;
  return std::cbrt(e2 / (4.0 * kPi * kVacuumPermittivity * cfg.ion_mass * cfg.axial_freq * cfg.axial_freq));
}

std::vector<double> equilibrium_positions_scaled(int n) {
  if (n < 1) throw InputError("equilibrium_positions: n_ions must be >= 1");
  if (n == 1) return {0.0};

  Eigen::VectorXd u(n);
  const double half_width = 0.8 * std::pow(static_cast<double>(n), 0.56);
  for (int i = 0; i < n; ++i) u[i] = half_width * (2.0 * i / (n - 1) - 1.0);

  // Damped Newton from the symmetric ansatz.
  Eigen::VectorXd f = force_residual(u);
  double norm = f.norm();
  for (int iter = 0; iter < 100 && f.lpNorm<Eigen::Infinity>() > kForceTolerance; ++iter) {
    const Eigen::VectorXd step = force_jacobian(u).partialPivLu().solve(-f);
    double lambda = 1.0;
    bool accepted = false;
    while (lambda > 1e-8) {
      Eigen::VectorXd trial = u + lambda * step;
      if (strictly_increasing(trial)) {
        const Eigen::VectorXd ft = force_residual(trial);
        if (ft.norm() < norm || ft.lpNorm<Eigen::Infinity>() <= kForceTolerance) {
          u = trial;
          f = ft;
          norm = ft.norm();
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (f.lpNorm<Eigen::Infinity>() > kForceTolerance) {
    u = minimize_potential(u);
    f = force_residual(u);
  }

  // Enforce exact mirror antisymmetry, then polish.
  const Eigen::VectorXd mirrored = 0.5 * (u - u.reverse());
  u = mirrored;
  f = force_residual(u);
  if (f.lpNorm<Eigen::Infinity>() > kForceTolerance) {
    std::ostringstream msg;
    msg << "equilibrium_positions: root solve did not converge for " << n
        << " ions, last residual " << f.lpNorm<Eigen::Infinity>();
    throw PhysicsError(msg.str());
  }
  return {u.data(), u.data() + n};
}

std::vector<double> equilibrium_positions(const TrapConfig& cfg) {
  cfg.validate();
  const double scale = chain_length_scale(cfg);
  std::vector<double> pos = equilibrium_positions_scaled(cfg.n_ions);
  for (double& z : pos) z *= scale;
  return pos;
}

NormalModeData transverse_normal_modes(const TrapConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_ions;
  const CoulombSpectrum spec = coulomb_spectrum(n);
  NormalModeData out{Eigen::VectorXd(n), spec.vectors};
  const double wx2 = cfg.transverse_freq * cfg.transverse_freq;
  const double wa2 = cfg.axial_freq * cfg.axial_freq;
  for (int m = 0; m < n; ++m) {
    const double w2 = wx2 + wa2 * spec.c[m];
    if (!(w2 > 0.0)) {
      std::ostringstream msg;
      msg << "transverse mode " << (m + 1) << " of " << n
          << " is unstable (squared frequency " << w2
          << " rad^2/s^2); linear chain is not a minimum, raise transverse_freq/axial_freq";
      throw PhysicsError(msg.str());
    }
    out.frequencies[m] = std::sqrt(w2);
  }
  return out;
}

LambDickeMatrix lamb_dicke_parameters(const NormalModeData& modes, const TrapConfig& cfg) {
  cfg.validate();
  if (modes.n_ions() != cfg.n_ions || modes.n_modes() != cfg.n_ions)
    throw InputError("lamb_dicke_parameters: mode data does not match the trap config");
  using namespace constants;
  const double dk = 2.0 * std::sqrt(2.0) * kPi / cfg.raman_wavelength;
  LambDickeMatrix out{Eigen::MatrixXd(modes.n_ions(), modes.n_modes())};
  for (int m = 0; m < modes.n_modes(); ++m) {
    const double x0 = std::sqrt(kHbar / (2.0 * cfg.ion_mass * modes.frequencies[m]));
    out.eta.col(m) = modes.participation.col(m) * (dk * x0);
  }
  return out;
}

namespace {

struct SpectrumFunctor : Eigen::DenseFunctor<double> {
  SpectrumFunctor(const Eigen::VectorXd& measured, const Eigen::VectorXd& c, double scale)
      : Eigen::DenseFunctor<double>(2, static_cast<int>(measured.size())),
        measured_(measured), c_(c), scale_(scale) {}

  // x = (nu_x, nu_ax) / scale; residuals in units of scale.
  int operator()(const InputType& x, ValueType& fvec) const {
    for (Eigen::Index m = 0; m < measured_.size(); ++m) {
      const double w2 = x[0] * x[0] + x[1] * x[1] * c_[m];
      fvec[m] = (w2 > 0 ? std::sqrt(w2) : -std::sqrt(-w2)) - measured_[m] / scale_;
    }
    return 0;
  }
  int df(const InputType& x, JacobianType& jac) const {
    for (Eigen::Index m = 0; m < measured_.size(); ++m) {
      const double w = std::sqrt(std::max(x[0] * x[0] + x[1] * x[1] * c_[m], 1e-300));
      jac(m, 0) = x[0] / w;
      jac(m, 1) = x[1] * c_[m] / w;
    }
    return 0;
  }

  Eigen::VectorXd measured_;
  Eigen::VectorXd c_;
  double scale_;
};

}  // namespace

TrapFit fit_trap_frequencies(const std::vector<double>& measured, const TrapConfig& cfg_template,
                             double max_rms) {
  const int n = cfg_template.n_ions;
  if (static_cast<int>(measured.size()) != n)
    throw InputError("fit_trap_frequencies: measured spectrum length must equal n_ions");
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (!(measured[i] > 0)) throw InputError("fit_trap_frequencies: frequencies must be positive");
    if (i > 0 && measured[i] > measured[i - 1])
      throw InputError("fit_trap_frequencies: measured spectrum must be descending");
  }

  TrapFit out{cfg_template, 0.0};
  if (n == 1) {
    out.config.transverse_freq = measured[0];
    out.config.validate();
    return out;
  }

  const CoulombSpectrum spec = coulomb_spectrum(n);
  const double scale = measured[0];
  Eigen::VectorXd meas = Eigen::Map<const Eigen::VectorXd>(measured.data(), n);

  // Linear least squares on squared frequencies for the starting point.
  Eigen::MatrixXd a(n, 2);
  a.col(0).setOnes();
  a.col(1) = spec.c;
  const Eigen::Vector2d sq = a.colPivHouseholderQr().solve((meas / scale).array().square().matrix());
  Eigen::VectorXd x(2);
  x << std::sqrt(std::max(sq[0], 1e-6)), std::sqrt(std::max(sq[1], 1e-6));

  SpectrumFunctor functor(meas, spec.c, scale);
  Eigen::LevenbergMarquardt<SpectrumFunctor> lm(functor);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(0.0);
  lm.setMaxfev(2000);
  lm.minimize(x);

  out.config.transverse_freq = std::abs(x[0]) * scale;
  out.config.axial_freq = std::abs(x[1]) * scale;
  out.config.validate();

  const NormalModeData modes = transverse_normal_modes(out.config);
  out.rms_residual = std::sqrt((modes.frequencies - meas).squaredNorm() / n);
  if (out.rms_residual > max_rms) {
    std::ostringstream msg;
    msg << "fit_trap_frequencies: RMS residual " << out.rms_residual << " rad/s exceeds tolerance "
        << max_rms << " rad/s";
    throw PhysicsError(msg.str());
  }
  return out;
}

}  // namespace iongate
