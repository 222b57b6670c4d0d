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

#include "iongate/pulse_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iongate/constants.hpp"
#include "iongate/errors.hpp"
#include "iongate/segment_integrals.hpp"

namespace iongate {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx unit_phasor(double phi) { return {std::cos(phi), -std::sin(phi)}; }  // e^{-i phi}

void check_eta(const LambDickeMatrix& eta, const ModeIntegrals& ints, const Eigen::MatrixXd& phases) {
  if (eta.n_ions() != phases.rows() || eta.n_modes() != ints.n_modes() || phases.cols() != ints.n_segments())
    throw InputError("pulse_scheme: eta / mode / phase dimensions disagree");
}

}  // namespace

void PulseScheme::validate() const {
  if (n_segments < 1) throw InputError("PulseScheme: n_segments must be >= 1");
  if (!(gate_time > 0.0)) throw InputError("PulseScheme: gate_time must be positive");
  if (phases.rows() < 1 || phases.cols() != n_segments) {
    std::ostringstream msg;
    msg << "PulseScheme: phases must be N x " << n_segments << ", got " << phases.rows() << " x "
        << phases.cols();
    throw InputError(msg.str());
  }
  if (peak_amplitudes.size() != phases.rows())
    throw InputError("PulseScheme: peak_amplitudes length must equal the number of ions");
  if (!phases.allFinite() || !peak_amplitudes.allFinite() || !std::isfinite(detuning))
    throw InputError("PulseScheme: non-finite entries");
}

double wrap_phase(double phi) {
  using constants::kPi;
  using constants::kTwoPi;
  double r = std::fmod(phi, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

ModeIntegrals mode_integrals(const Eigen::VectorXd& mode_frequencies, double detuning, double gate_time,
                             int n_segments) {
  const auto m_count = mode_frequencies.size();
  ModeIntegrals out{(mode_frequencies.array() - detuning).matrix() * gate_time,
                    Eigen::MatrixXcd(m_count, n_segments), Eigen::MatrixXcd(m_count, n_segments)};
  const double h = 1.0 / n_segments;
  for (Eigen::Index m = 0; m < m_count; ++m) {
    for (int k = 0; k < n_segments; ++k) {
      out.f(m, k) = segment_exp_integral(k, n_segments, out.delta[m], h);
      out.tri(m, k) = segment_triangle_integral(k, n_segments, out.delta[m], h);
    }
  }
  return out;
}

TsTc ts_tc_kernels(const NormalModeData& modes, const PulseScheme& scheme) {
  scheme.validate();
  const ModeIntegrals ints = mode_integrals(modes.frequencies, scheme.detuning, scheme.gate_time, scheme.n_segments);
  return {ints.f.imag(), -ints.f.real()};
}

std::vector<PairKernel> gs_gc_kernels(const LambDickeMatrix& eta, const NormalModeData& modes,
                                      const PulseScheme& scheme) {
  scheme.validate();
  const ModeIntegrals ints = mode_integrals(modes.frequencies, scheme.detuning, scheme.gate_time, scheme.n_segments);
  check_eta(eta, ints, scheme.phases);
  const int n = eta.n_ions();
  const int kk = scheme.n_segments;
  const int mm = ints.n_modes();

  // Per-mode complex double integrals Q_m(k, l), l <= k.
  std::vector<Eigen::MatrixXcd> q(static_cast<std::size_t>(mm), Eigen::MatrixXcd::Zero(kk, kk));
  for (int m = 0; m < mm; ++m) {
    for (int k = 0; k < kk; ++k) {
      for (int l = 0; l < k; ++l) q[m](k, l) = ints.f(m, k) * std::conj(ints.f(m, l));
      q[m](k, k) = ints.tri(m, k);
    }
  }

  std::vector<PairKernel> out(static_cast<std::size_t>(n * n));
#pragma omp parallel for schedule(static)
  for (int idx = 0; idx < n * n; ++idx) {
    const int j = idx / n;
    const int jp = idx % n;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(kk, kk);
    for (int m = 0; m < mm; ++m) acc += (-0.5 * eta.eta(j, m) * eta.eta(jp, m)) * q[m];
    out[idx] = PairKernel{acc.imag(), acc.real()};
  }
  return out;
}

SchemeKernels scheme_kernels(const LambDickeMatrix& eta, const NormalModeData& modes, const PulseScheme& scheme) {
  return {ts_tc_kernels(modes, scheme), eta.n_ions(), gs_gc_kernels(eta, modes, scheme)};
}

Eigen::MatrixXcd scaled_displacements(const TsTc& t, const PulseScheme& scheme) {
  const Eigen::MatrixXd x = scheme.phases.array().cos();
  const Eigen::MatrixXd y = scheme.phases.array().sin();
  // Rows of x/y are the vectors X_j, Y_j; rows of ts/tc are Ts_m, Tc_m.
  const Eigen::MatrixXd re = x * t.ts.transpose() + y * t.tc.transpose();
  const Eigen::MatrixXd im = x * t.tc.transpose() - y * t.ts.transpose();
  Eigen::MatrixXcd d(re.rows(), re.cols());
  d.real() = re;
  d.imag() = im;
  return d;
}

Eigen::MatrixXd scaled_couplings(const SchemeKernels& kernels, const PulseScheme& scheme) {
  const int n = scheme.n_ions();
  const Eigen::MatrixXd x = scheme.phases.array().cos();
  const Eigen::MatrixXd y = scheme.phases.array().sin();
  auto ordered = [&](int j, int jp) {
    const PairKernel& p = kernels.pair(j, jp);
    return x.row(j).dot(p.gs * x.row(jp).transpose()) + y.row(j).dot(p.gs * y.row(jp).transpose()) +
           x.row(j).dot(p.gc * y.row(jp).transpose()) - y.row(j).dot(p.gc * x.row(jp).transpose());
  };
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int jp = j + 1; jp < n; ++jp) {
      g(j, jp) = g(jp, j) = 0.5 * (ordered(j, jp) + ordered(jp, j));
    }
  }
  return g;
}

OrderedCoupling ordered_coupling(const ModeIntegrals& ints, const LambDickeMatrix& eta,
                                 const Eigen::MatrixXd& phases, int j, int jp, bool with_gradient) {
  const int kk = ints.n_segments();
  OrderedCoupling out;
  if (with_gradient) out.gradient = Eigen::MatrixXd::Zero(phases.rows(), kk);

  std::vector<cplx> uj(kk), ujp(kk), rot(kk);
  for (int k = 0; k < kk; ++k) rot[k] = unit_phasor(phases(j, k) - phases(jp, k));

  for (int m = 0; m < ints.n_modes(); ++m) {
    const double c = 0.5 * eta.eta(j, m) * eta.eta(jp, m);
    if (c == 0.0) continue;
    for (int k = 0; k < kk; ++k) {
      uj[k] = ints.f(m, k) * unit_phasor(phases(j, k));
      ujp[k] = ints.f(m, k) * unit_phasor(phases(jp, k));
    }
    double sum = 0.0;
    cplx prefix = 0.0;  // sum_{l<k} ujp[l]
    for (int k = 0; k < kk; ++k) {
      const cplx diag = ints.tri(m, k) * rot[k];
      sum += (uj[k] * std::conj(prefix)).imag() + diag.imag();
      if (with_gradient) {
        out.gradient(j, k) -= c * (-(uj[k] * std::conj(prefix)).real() - diag.real());
        out.gradient(jp, k) -= c * diag.real();
      }
      prefix += ujp[k];
    }
    if (with_gradient) {
      cplx suffix = 0.0;  // sum_{k>l} uj[k]
      for (int l = kk - 1; l >= 0; --l) {
        out.gradient(jp, l) -= c * (suffix * std::conj(ujp[l])).real();
        suffix += uj[l];
      }
    }
    out.value -= c * sum;
  }
  return out;
}

PhasedIntegrals phased_integrals(const ModeIntegrals& ints, const Eigen::MatrixXd& phases) {
  const auto n = phases.rows();
  PhasedIntegrals out;
  out.phasor.resize(n, ints.n_segments());
  for (Eigen::Index j = 0; j < n; ++j)
    for (int k = 0; k < ints.n_segments(); ++k) out.phasor(j, k) = unit_phasor(phases(j, k));
  out.u.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) out.u[j] = ints.f * out.phasor.row(j).asDiagonal();
  return out;
}

PairCoupling pair_coupling(const ModeIntegrals& ints, const LambDickeMatrix& eta, const PhasedIntegrals& pi, int j,
                           int jp, bool with_gradient) {
  const int kk = ints.n_segments();
  PairCoupling out;
  if (with_gradient) {
    out.grad_j = Eigen::VectorXd::Zero(kk);
    out.grad_jp = Eigen::VectorXd::Zero(kk);
  }
  const Eigen::MatrixXcd& ua = pi.u[j];
  const Eigen::MatrixXcd& ub = pi.u[jp];
  for (int m = 0; m < ints.n_modes(); ++m) {
    const double c = 0.25 * eta.eta(j, m) * eta.eta(jp, m);  // half of the ordered weight
    if (c == 0.0) continue;
    double sum = 0.0;
    cplx pa = 0.0, pb = 0.0;  // prefix sums over l < k
    for (int k = 0; k < kk; ++k) {
      const cplx a = ua(m, k), b = ub(m, k);
      const cplx diag = ints.tri(m, k) * pi.phasor(j, k) * std::conj(pi.phasor(jp, k));  // e^{-i(phi_j - phi_j')}
      const cplx diag_rev = ints.tri(m, k) * std::conj(pi.phasor(j, k)) * pi.phasor(jp, k);
      const cplx ab = a * std::conj(pb), ba = b * std::conj(pa);
      sum += ab.imag() + diag.imag() + ba.imag() + diag_rev.imag();
      if (with_gradient) {
        out.grad_j[k] -= c * (-ab.real() - diag.real() + diag_rev.real());
        out.grad_jp[k] -= c * (-ba.real() - diag_rev.real() + diag.real());
      }
      pa += a;
      pb += b;
    }
    if (with_gradient) {
      cplx sa = 0.0, sb = 0.0;  // suffix sums over k > l
      for (int l = kk - 1; l >= 0; --l) {
        out.grad_jp[l] -= c * (sa * std::conj(ub(m, l))).real();
        out.grad_j[l] -= c * (sb * std::conj(ua(m, l))).real();
        sa += ua(m, l);
        sb += ub(m, l);
      }
    }
    out.value -= c * sum;
  }
  return out;
}

Eigen::MatrixXd scaled_couplings(const ModeIntegrals& ints, const LambDickeMatrix& eta, const Eigen::MatrixXd& phases) {
  check_eta(eta, ints, phases);
  const int n = static_cast<int>(phases.rows());
  const int n_pairs = n * (n - 1) / 2;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  const PhasedIntegrals pi = phased_integrals(ints, phases);
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < n_pairs; ++p) {
    // Unrank p -> (j, jp), j < jp.
    int j = 0, rem = p;
    while (rem >= n - 1 - j) {
      rem -= n - 1 - j;
      ++j;
    }
    const int jp = j + 1 + rem;
    const double v = pair_coupling(ints, eta, pi, j, jp, false).value;
    g(j, jp) = v;
    g(jp, j) = v;
  }
  return g;
}

Eigen::MatrixXcd scaled_displacements(const ModeIntegrals& ints, const Eigen::MatrixXd& phases) {
  const auto n = phases.rows();
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, ints.n_modes());
  for (Eigen::Index j = 0; j < n; ++j)
    for (int m = 0; m < ints.n_modes(); ++m)
      for (int k = 0; k < ints.n_segments(); ++k) d(j, m) += -kI * ints.f(m, k) * unit_phasor(phases(j, k));
  return d;
}

Eigen::MatrixXcd residual_displacements(const LambDickeMatrix& eta, const Eigen::MatrixXcd& d,
                                        const PulseScheme& scheme) {
  Eigen::MatrixXcd alpha(d.rows(), d.cols());
  for (Eigen::Index j = 0; j < d.rows(); ++j) {
    const double amp = scheme.peak_amplitudes[j] * scheme.gate_time;
    for (Eigen::Index m = 0; m < d.cols(); ++m) alpha(j, m) = 0.5 * eta.eta(j, m) * amp * d(j, m);
  }
  return alpha;
}

Eigen::MatrixXd coupling_matrix(const Eigen::MatrixXd& g, const PulseScheme& scheme) {
  const Eigen::VectorXd amp = scheme.peak_amplitudes * scheme.gate_time;
  Eigen::MatrixXd theta = (amp * amp.transpose()).cwiseProduct(g);
  theta.diagonal().setZero();
  return theta;
}

TrajectorySamples trajectory_samples(const LambDickeMatrix& eta, const NormalModeData& modes,
                                     const PulseScheme& scheme, int samples_per_segment) {
  scheme.validate();
  if (samples_per_segment < 1) throw InputError("trajectory_samples: need at least one sample per segment");
  const ModeIntegrals ints = mode_integrals(modes.frequencies, scheme.detuning, scheme.gate_time, scheme.n_segments);
  check_eta(eta, ints, scheme.phases);
  const int n = scheme.n_ions();
  const int mm = ints.n_modes();
  const int kk = scheme.n_segments;
  const double h = 1.0 / kk;
  const Eigen::VectorXd amp = scheme.peak_amplitudes * scheme.gate_time;

  // Completed-segment state: prefix(j, m) = sum_{k<kappa} u, ordered(j, jp) accumulates
  // the ordered coupling integrand over completed segments (before the -eta eta / 2 factor).
  Eigen::MatrixXcd prefix = Eigen::MatrixXcd::Zero(n, mm);
  std::vector<Eigen::MatrixXd> ordered(static_cast<std::size_t>(mm), Eigen::MatrixXd::Zero(n, n));

  TrajectorySamples out;
  const auto emit = [&](double s, int seg, const Eigen::VectorXcd& fp, const Eigen::VectorXcd& tp) {
    Eigen::MatrixXcd alpha(n, mm);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < mm; ++m) {
      for (int j = 0; j < n; ++j) {
        const cplx partial = seg < 0 ? cplx(0.0) : fp[m] * unit_phasor(scheme.phases(j, seg));
        alpha(j, m) = 0.5 * eta.eta(j, m) * amp[j] * (-kI) * (prefix(j, m) + partial);
      }
      for (int j = 0; j < n; ++j) {
        for (int jp = 0; jp < n; ++jp) {
          if (j == jp) continue;
          double v = ordered[m](j, jp);
          if (seg >= 0) {
            const cplx uj = fp[m] * unit_phasor(scheme.phases(j, seg));
            v += (uj * std::conj(prefix(jp, m))).imag() +
                 (tp[m] * unit_phasor(scheme.phases(j, seg) - scheme.phases(jp, seg))).imag();
          }
          g(j, jp) -= 0.5 * eta.eta(j, m) * eta.eta(jp, m) * v;
        }
      }
    }
    const Eigen::MatrixXd gs = 0.5 * (g + g.transpose());
    Eigen::MatrixXd theta = (amp * amp.transpose()).cwiseProduct(gs);
    theta.diagonal().setZero();
    out.times.push_back(s * scheme.gate_time);
    out.alpha.push_back(std::move(alpha));
    out.theta.push_back(std::move(theta));
  };

  emit(0.0, -1, Eigen::VectorXcd(), Eigen::VectorXcd());
  Eigen::VectorXcd fp(mm), tp(mm);
  for (int seg = 0; seg < kk; ++seg) {
    for (int i = 1; i <= samples_per_segment; ++i) {
      const double len = h * i / samples_per_segment;
      if (i == samples_per_segment) {
        fp = ints.f.col(seg);
        tp = ints.tri.col(seg);
      } else {
        for (int m = 0; m < mm; ++m) {
          fp[m] = segment_exp_integral(seg, kk, ints.delta[m], len);
          tp[m] = segment_triangle_integral(seg, kk, ints.delta[m], len);
        }
      }
      emit(seg * h + len, seg, fp, tp);
    }
    // Fold the completed segment into the running state.
    for (int m = 0; m < mm; ++m) {
      for (int j = 0; j < n; ++j) {
        for (int jp = 0; jp < n; ++jp) {
          if (j == jp) continue;
          const cplx uj = ints.f(m, seg) * unit_phasor(scheme.phases(j, seg));
          ordered[m](j, jp) += (uj * std::conj(prefix(jp, m))).imag() +
                               (ints.tri(m, seg) * unit_phasor(scheme.phases(j, seg) - scheme.phases(jp, seg))).imag();
        }
      }
      for (int j = 0; j < n; ++j) prefix(j, m) += ints.f(m, seg) * unit_phasor(scheme.phases(j, seg));
    }
  }
  return out;
}

double SchemeDiagnostics::max_abs_alpha() const { return alpha.size() ? alpha.cwiseAbs().maxCoeff() : 0.0; }

double SchemeDiagnostics::objective() const { return d.cwiseAbs2().sum(); }

double SchemeDiagnostics::max_theta_deviation(double target, const PulseScheme& scheme) const {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < theta.rows(); ++j)
    for (Eigen::Index jp = j + 1; jp < theta.cols(); ++jp)
      if (scheme.peak_amplitudes[j] != 0.0 && scheme.peak_amplitudes[jp] != 0.0)
        worst = std::max(worst, std::abs(theta(j, jp) - target) / std::abs(target));
  return worst;
}

SchemeDiagnostics diagnose(const LambDickeMatrix& eta, const NormalModeData& modes, const PulseScheme& scheme,
                           int samples_per_segment) {
  scheme.validate();
  const ModeIntegrals ints = mode_integrals(modes.frequencies, scheme.detuning, scheme.gate_time, scheme.n_segments);
  check_eta(eta, ints, scheme.phases);
  SchemeDiagnostics out;
  out.d = scaled_displacements(ints, scheme.phases);
  out.alpha = residual_displacements(eta, out.d, scheme);
  out.g = scaled_couplings(ints, eta, scheme.phases);
  out.theta = coupling_matrix(out.g, scheme);
  if (samples_per_segment > 0) out.samples = trajectory_samples(eta, modes, scheme, samples_per_segment);
  return out;
}

}  // namespace iongate
