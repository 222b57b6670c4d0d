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

#include "iongate/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "iongate/lbfgs.hpp"

namespace iongate {

namespace {

constexpr double kMirrorTolerance = 1e-8;
// Minimum |g| / g_scale accepted for a pair class; excludes vanishing-force solutions.
constexpr double kCouplingMargin = 2e-2;
// |g| below this fraction of the coupling scale is treated as vanishing.
constexpr double kLogFloor = 1e-12;
// Thresholds for handing an augmented-Lagrangian iterate to the Newton polish.
constexpr double kPolishObjective = 1e-2;
constexpr double kPolishViolation = 1e-1;
constexpr std::size_t kStallWindow = 3;

}  // namespace

void SynthesisProblem::validate() const {
  if (eta.n_ions() < 1) throw InputError("SynthesisProblem: empty Lamb-Dicke matrix");
  if (modes.n_modes() != eta.n_modes()) throw InputError("SynthesisProblem: eta and mode count disagree");
  if (n_segments < 1) throw InputError("SynthesisProblem: n_segments must be >= 1");
  if (!(gate_time > 0.0)) throw InputError("SynthesisProblem: gate_time must be positive");
  if (multistart < 1) throw InputError("SynthesisProblem: multistart must be >= 1");
  if (!(target_coupling != 0.0) || !std::isfinite(target_coupling))
    throw InputError("SynthesisProblem: target coupling must be finite and non-zero");
}

// ---------------------------------------------------------------------------
// ReducedVariableMap

ReducedVariableMap::ReducedVariableMap(int n_ions, int n_segments, SymmetryFlags flags)
    : n_ions_(n_ions), n_segments_(n_segments), class_of_(static_cast<std::size_t>(n_ions), -1),
      entries_(static_cast<std::size_t>(n_ions * n_segments)) {
  for (int j = 0; j < n_ions; ++j) {
    if (class_of_[j] >= 0) continue;
    std::vector<int> members{j};
    const int mirror = n_ions - 1 - j;
    if (flags.mirror && mirror != j) members.push_back(mirror);
    for (int m : members) class_of_[m] = static_cast<int>(classes_.size());
    classes_.push_back(std::move(members));
  }

  const int half = n_segments / 2;
  const int per_class = flags.time_antisymmetric ? half : n_segments;
  n_vars_ = per_class * static_cast<int>(classes_.size());
  for (int j = 0; j < n_ions; ++j) {
    const int base = class_of_[j] * per_class;
    for (int k = 0; k < n_segments; ++k) {
      Entry& e = entries_[static_cast<std::size_t>(j * n_segments + k)];
      if (!flags.time_antisymmetric) {
        e = {base + k, 1.0};
      } else if (k < half) {
        e = {base + k, 1.0};
      } else if (k >= n_segments - half) {
        e = {base + (n_segments - 1 - k), -1.0};
      }  // odd K: middle segment stays fixed at zero
    }
  }
}

Eigen::MatrixXd ReducedVariableMap::expand(const Eigen::VectorXd& vars) const {
  Eigen::MatrixXd phases = Eigen::MatrixXd::Zero(n_ions_, n_segments_);
  for (int j = 0; j < n_ions_; ++j)
    for (int k = 0; k < n_segments_; ++k) {
      const Entry& e = entries_[static_cast<std::size_t>(j * n_segments_ + k)];
      if (e.var >= 0) phases(j, k) = e.sign * vars[e.var];
    }
  return phases;
}

Eigen::VectorXd ReducedVariableMap::reduce(const Eigen::MatrixXd& phases) const {
  Eigen::VectorXd vars = Eigen::VectorXd::Zero(n_vars_);
  for (const auto& members : classes_) {
    const int j = members.front();
    for (int k = 0; k < n_segments_; ++k) {
      const Entry& e = entries_[static_cast<std::size_t>(j * n_segments_ + k)];
      if (e.var >= 0 && e.sign > 0) vars[e.var] = phases(j, k);
    }
  }
  return vars;
}

Eigen::VectorXd ReducedVariableMap::reduce_gradient(const Eigen::MatrixXd& full) const {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n_vars_);
  for (int j = 0; j < n_ions_; ++j)
    for (int k = 0; k < n_segments_; ++k) {
      const Entry& e = entries_[static_cast<std::size_t>(j * n_segments_ + k)];
      if (e.var >= 0) grad[e.var] += e.sign * full(j, k);
    }
  return grad;
}

void ReducedVariableMap::accumulate_row(int ion, const Eigen::VectorXd& row, Eigen::VectorXd& grad) const {
  for (int k = 0; k < n_segments_; ++k) {
    const Entry& e = entries_[static_cast<std::size_t>(ion * n_segments_ + k)];
    if (e.var >= 0) grad[e.var] += e.sign * row[k];
  }
}

bool ReducedVariableMap::contains(const Eigen::MatrixXd& phases, double tol) const {
  if (phases.rows() != n_ions_ || phases.cols() != n_segments_) return false;
  const Eigen::MatrixXd back = expand(reduce(phases));
  for (int j = 0; j < n_ions_; ++j)
    for (int k = 0; k < n_segments_; ++k)
      if (std::abs(wrap_phase(back(j, k) - phases(j, k))) > tol) return false;
  return true;
}

ReducedVariableMap symmetry_reduce(const SynthesisProblem& problem) {
  problem.validate();
  const int n = problem.n_ions();
  if (problem.symmetry.mirror) {
    const Eigen::MatrixXd& eta = problem.eta.eta;
    const double scale = std::max(eta.cwiseAbs().maxCoeff(), 1e-300);
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < eta.cols(); ++m)
        if (std::abs(std::abs(eta(j, m)) - std::abs(eta(n - 1 - j, m))) > kMirrorTolerance * scale) {
          std::ostringstream msg;
          msg << "symmetry_reduce: mirror symmetry requested but |eta(" << j + 1 << "," << m + 1
              << ")| != |eta(" << n - j << "," << m + 1 << ")|";
          throw InputError(msg.str());
        }
  }
  return ReducedVariableMap(n, problem.n_segments, problem.symmetry);
}

// ---------------------------------------------------------------------------
// PhaseProblem

PhaseProblem::PhaseProblem(const SynthesisProblem& problem)
    : problem_(&problem),
      map_(symmetry_reduce(problem)),
      ints_(mode_integrals(problem.modes.frequencies, problem.detuning, problem.gate_time, problem.n_segments)) {
  const int n = problem.n_ions();
  const Eigen::MatrixXd& eta = problem.eta.eta;

  double scale = 0.0;
  for (int m = 0; m < eta.cols(); ++m) {
    const double e = eta.col(m).cwiseAbs().maxCoeff();
    scale += 0.5 * e * e / std::max(1.0, std::abs(ints_.delta[m]));
  }
  coupling_scale_ = scale > 0.0 ? scale : 1.0;

  const bool mirror = problem.symmetry.mirror;
  auto canonical = [&](int j, int jp) {
    std::pair<int, int> p{std::min(j, jp), std::max(j, jp)};
    if (mirror) {
      std::pair<int, int> q{std::min(n - 1 - j, n - 1 - jp), std::max(n - 1 - j, n - 1 - jp)};
      p = std::min(p, q);
    }
    return p;
  };
  for (int j = 0; j < n; ++j)
    for (int jp = j + 1; jp < n; ++jp) {
      const auto c = canonical(j, jp);
      if (c == std::make_pair(j, jp)) pair_reps_.push_back(c);
    }
  if (mirror)
    for (int j = 0; j < n - 1 - j; ++j) mirror_pairs_.emplace_back(j, n - 1 - j);

  const int n_classes = static_cast<int>(map_.classes().size());
  if (n == 4 && mirror) {
    constraint_form_ = "mirror-explicit";
  } else if (n_classes >= 3) {
    // Sign patterns matter from three classes on; amplitudes become explicit variables.
    constraint_form_ = "amplitude-explicit";
    n_amp_ = n_classes;
  } else {
    constraint_form_ = "log-compatibility";
    const int n_pairs = static_cast<int>(pair_reps_.size());
    if (n_pairs > 0) {
      Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(n_pairs, n_classes);
      for (int p = 0; p < n_pairs; ++p) {
        incidence(p, map_.class_of(pair_reps_[p].first)) += 1.0;
        incidence(p, map_.class_of(pair_reps_[p].second)) += 1.0;
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(incidence, Eigen::ComputeFullU);
      svd.setThreshold(1e-10);
      const auto rank = svd.rank();
      compat_basis_ = svd.matrixU().rightCols(n_pairs - rank).transpose();
    }
  }
}

double PhaseProblem::log_amplitude_bound() const { return 0.5 * std::log(1.0 / kCouplingMargin); }

PhaseProblem::PairValue PhaseProblem::symmetric_coupling(const PhasedIntegrals& pi, int j, int jp,
                                                         bool with_gradient) const {
  const PairCoupling pc = pair_coupling(ints_, problem_->eta, pi, j, jp, with_gradient);
  PairValue out{pc.value / coupling_scale_, Eigen::VectorXd()};
  if (with_gradient) {
    out.gradient = Eigen::VectorXd::Zero(map_.n_vars());
    map_.accumulate_row(j, pc.grad_j / coupling_scale_, out.gradient);
    map_.accumulate_row(jp, pc.grad_jp / coupling_scale_, out.gradient);
  }
  return out;
}

double PhaseProblem::objective(const Eigen::VectorXd& vars, Eigen::VectorXd* gradient) const {
  const PhasedIntegrals pi = phased_integrals(ints_, phases(vars));
  const int n = map_.n_ions();
  const int kk = map_.n_segments();
  double value = 0.0;
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, kk);
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXcd& u = pi.u[static_cast<std::size_t>(j)];
    for (int m = 0; m < ints_.n_modes(); ++m) {
      const cplx d = cplx(0.0, -1.0) * u.row(m).sum();
      value += std::norm(d);
      if (gradient)
        for (int k = 0; k < kk; ++k) full(j, k) -= 2.0 * (std::conj(d) * u(m, k)).real();
    }
  }
  if (gradient) {
    gradient->setZero(n_vars());
    gradient->head(map_.n_vars()) = map_.reduce_gradient(full);
  }
  return value;
}

int PhaseProblem::n_sign_patterns() const {
  return n_amp_ > 0 ? 1 << (n_amp_ - 1) : 0;
}

CouplingConstraints PhaseProblem::constraints(const Eigen::VectorXd& vars, bool with_jacobian,
                                              int sign_pattern) const {
  const PhasedIntegrals pi = phased_integrals(ints_, phases(vars));
  const int nv = n_vars();
  const int np = map_.n_vars();
  CouplingConstraints out;
  auto pad = [&](const Eigen::VectorXd& g) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    row.head(np) = g.transpose();
    return row;
  };

  if (constraint_form_ == "mirror-explicit") {
    const PairValue g12 = symmetric_coupling(pi, 0, 1, with_jacobian);
    const PairValue g13 = symmetric_coupling(pi, 0, 2, with_jacobian);
    const PairValue g14 = symmetric_coupling(pi, 0, 3, with_jacobian);
    const PairValue g23 = symmetric_coupling(pi, 1, 2, with_jacobian);
    out.equality.resize(2);
    out.equality << g12.value - g13.value, g12.value * g13.value - g14.value * g23.value;
    if (with_jacobian) {
      out.equality_jacobian.resize(2, nv);
      out.equality_jacobian.row(0) = pad(g12.gradient - g13.gradient);
      out.equality_jacobian.row(1) = pad(g12.gradient * g13.value + g13.gradient * g12.value -
                                         g14.gradient * g23.value - g23.gradient * g14.value);
    }
  } else if (constraint_form_ == "amplitude-explicit") {
    // theta / Theta - 1 = sigma_a sigma_b (g / g_scale) exp(l_a + l_b) - 1 per pair class.
    const int pattern = std::max(sign_pattern, 0);
    const auto n_pairs = static_cast<Eigen::Index>(pair_reps_.size());
    out.equality.resize(n_pairs);
    if (with_jacobian) out.equality_jacobian.setZero(n_pairs, nv);
    for (Eigen::Index p = 0; p < n_pairs; ++p) {
      const auto [j, jp] = pair_reps_[static_cast<std::size_t>(p)];
      const int ca = map_.class_of(j), cb = map_.class_of(jp);
      const double s = class_sign(ca, pattern) * class_sign(cb, pattern);
      const double e = std::exp(vars[np + ca] + vars[np + cb]);
      const PairValue g = symmetric_coupling(pi, j, jp, with_jacobian);
      const double t = s * g.value * e;
      out.equality[p] = t - 1.0;
      if (with_jacobian) {
        out.equality_jacobian.row(p) = pad(s * e * g.gradient);
        out.equality_jacobian(p, np + ca) += t;
        out.equality_jacobian(p, np + cb) += t;
      }
    }
  } else {
    const auto n_pairs = static_cast<int>(pair_reps_.size());
    if (compat_basis_.rows() > 0) {
      Eigen::VectorXd logs(n_pairs);
      Eigen::MatrixXd dlogs = Eigen::MatrixXd::Zero(n_pairs, nv);
      for (int p = 0; p < n_pairs; ++p) {
        const PairValue g = symmetric_coupling(pi, pair_reps_[p].first, pair_reps_[p].second, with_jacobian);
        const double mag = std::abs(g.value);
        if (mag > kLogFloor) {
          logs[p] = std::log(mag);
          if (with_jacobian) dlogs.row(p) = pad(g.gradient / g.value);
        } else {
          logs[p] = std::log(kLogFloor);  // sentinel; zero subgradient
        }
      }
      out.equality = compat_basis_ * logs;
      if (with_jacobian) out.equality_jacobian = compat_basis_ * dlogs;
    } else {
      out.equality.resize(0);
      if (with_jacobian) out.equality_jacobian.resize(0, nv);
    }
  }

  if (n_amp_ > 0) {
    // |g| >= kappa g_scale on every pair class, expressed as a cap on the log-amplitudes.
    out.inequality.resize(n_amp_);
    if (with_jacobian) out.inequality_jacobian.setZero(n_amp_, nv);
    for (int c = 0; c < n_amp_; ++c) {
      out.inequality[c] = log_amplitude_bound() - vars[np + c];
      if (with_jacobian) out.inequality_jacobian(c, np + c) = -1.0;
    }
  } else {
    const auto n_ineq = static_cast<Eigen::Index>(mirror_pairs_.size());
    out.inequality.resize(n_ineq);
    if (with_jacobian) out.inequality_jacobian.resize(n_ineq, nv);
    for (Eigen::Index i = 0; i < n_ineq; ++i) {
      const auto [j, jp] = mirror_pairs_[static_cast<std::size_t>(i)];
      const PairValue g = symmetric_coupling(pi, j, jp, with_jacobian);
      out.inequality[i] = g.value - kCouplingMargin;
      if (with_jacobian) out.inequality_jacobian.row(i) = pad(g.gradient);
    }
  }
  return out;
}

void PhaseProblem::displacement_residuals(const Eigen::VectorXd& vars, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
  const PhasedIntegrals pi = phased_integrals(ints_, phases(vars));
  const int n = map_.n_ions();
  const int mm = ints_.n_modes();
  const int kk = map_.n_segments();
  r.resize(2 * n * mm);
  if (jac) jac->setZero(2 * n * mm, n_vars());
  Eigen::VectorXd row_re(kk), row_im(kk), g_re(map_.n_vars()), g_im(map_.n_vars());
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXcd& u = pi.u[static_cast<std::size_t>(j)];
    for (int m = 0; m < mm; ++m) {
      const int row = j * mm + m;
      const cplx d = cplx(0.0, -1.0) * u.row(m).sum();
      r[row] = d.real();
      r[n * mm + row] = d.imag();
      if (jac) {
        // d(d)/dphi = -u
        row_re = -u.row(m).real().transpose();
        row_im = -u.row(m).imag().transpose();
        g_re.setZero();
        g_im.setZero();
        map_.accumulate_row(j, row_re, g_re);
        map_.accumulate_row(j, row_im, g_im);
        jac->row(row).head(map_.n_vars()) = g_re.transpose();
        jac->row(n * mm + row).head(map_.n_vars()) = g_im.transpose();
      }
    }
  }
}

std::pair<double, Eigen::VectorXd> objective_and_gradient(const Eigen::VectorXd& vars, const SynthesisProblem& problem) {
  const PhaseProblem pp(problem);
  if (vars.size() != pp.n_vars()) throw InputError("objective_and_gradient: wrong variable count");
  Eigen::VectorXd grad;
  const double v = pp.objective(vars, &grad);
  return {v, grad};
}

CouplingConstraints coupling_constraints(const Eigen::VectorXd& vars, const SynthesisProblem& problem) {
  const PhaseProblem pp(problem);
  if (vars.size() != pp.n_vars()) throw InputError("coupling_constraints: wrong variable count");
  return pp.constraints(vars, true);
}

// ---------------------------------------------------------------------------
// Amplitudes

AmplitudeSolution solve_amplitudes(const Eigen::MatrixXd& g, double target) {
  const auto n = g.rows();
  if (g.cols() != n) throw InputError("solve_amplitudes: coupling matrix must be square");
  AmplitudeSolution out{Eigen::VectorXd::Zero(n), 0.0};
  if (n < 2) return out;

  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index jp = j + 1; jp < n; ++jp)
      if (g(j, jp) == 0.0 || !std::isfinite(g(j, jp))) {
        std::ostringstream msg;
        msg << "solve_amplitudes: coupling g(" << j + 1 << "," << jp + 1 << ") vanishes";
        throw OptimizerError(msg.str());
      }

  // Sign 2-colouring: s_j s_j' sign(g_jj') = sign(target) for every pair.
  const double tsign = target > 0 ? 1.0 : -1.0;
  Eigen::VectorXd sign(n);
  sign[0] = 1.0;
  for (Eigen::Index j = 1; j < n; ++j) sign[j] = (g(0, j) * tsign > 0) ? 1.0 : -1.0;
  for (Eigen::Index a = 1; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (sign[a] * sign[b] * g(a, b) * tsign < 0) {
        std::ostringstream msg;
        msg << "solve_amplitudes: sign pattern of g is not 2-colourable; odd cycle 1-" << a + 1 << "-" << b + 1
            << "-1";
        throw OptimizerError(msg.str());
      }

  const Eigen::Index rows = n * (n - 1) / 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd rhs(rows);
  Eigen::Index r = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index jp = j + 1; jp < n; ++jp, ++r) {
      a(r, j) = 1.0;
      a(r, jp) = 1.0;
      rhs[r] = std::log(std::abs(target) / std::abs(g(j, jp)));
    }
  const Eigen::VectorXd logs = a.completeOrthogonalDecomposition().solve(rhs);
  for (Eigen::Index j = 0; j < n; ++j) out.omega_tau[j] = sign[j] * std::exp(logs[j]);

  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index jp = j + 1; jp < n; ++jp) {
      const double theta = out.omega_tau[j] * out.omega_tau[jp] * g(j, jp);
      out.max_relative_deviation = std::max(out.max_relative_deviation, std::abs(theta - target) / std::abs(target));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Multistart search

namespace {

struct Evaluation {
  double objective;
  CouplingConstraints c;
  double violation;
};

Evaluation evaluate(const PhaseProblem& pp, const Eigen::VectorXd& v, int pattern) {
  Evaluation e{pp.objective(v, nullptr), pp.constraints(v, false, pattern), 0.0};
  double viol = e.c.equality.size() ? e.c.equality.lpNorm<Eigen::Infinity>() : 0.0;
  for (Eigen::Index i = 0; i < e.c.inequality.size(); ++i) viol = std::max(viol, -e.c.inequality[i]);
  e.violation = viol;
  return e;
}

// Gauss-Newton with minimum-norm steps on [Re d; Im d; equality]; drives
// zero-residual solutions to machine precision. Reverted if it breaks an inequality.
Eigen::VectorXd newton_polish(const PhaseProblem& pp, Eigen::VectorXd v, int pattern, int max_iter = 40) {
  auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    Eigen::VectorXd rd;
    Eigen::MatrixXd jd;
    pp.displacement_residuals(x, rd, jac ? &jd : nullptr);
    const CouplingConstraints c = pp.constraints(x, jac != nullptr, pattern);
    r.resize(rd.size() + c.equality.size());
    r << rd, c.equality;
    if (jac) {
      jac->resize(r.size(), x.size());
      *jac << jd, c.equality_jacobian;
    }
  };
  const Eigen::VectorXd start = v;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residual(v, r, &jac);
  double norm = r.squaredNorm();
  for (int iter = 0; iter < max_iter && norm > 1e-30; ++iter) {
    const Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(r);
    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd rt;
    for (int ls = 0; ls < 30; ++ls) {
      const Eigen::VectorXd trial = v + lambda * step;
      residual(trial, rt, nullptr);
      if (rt.squaredNorm() < norm) {
        v = trial;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    residual(v, r, &jac);
    norm = r.squaredNorm();
  }
  const CouplingConstraints c = pp.constraints(v, false, pattern);
  for (Eigen::Index i = 0; i < c.inequality.size(); ++i)
    if (c.inequality[i] < 0.0) return start;
  return v;
}

StartOutcome run_start(const PhaseProblem& pp, int start) {
  const SynthesisProblem& prob = pp.problem();
  const int nv = pp.n_vars();
  const int np = pp.variables().n_vars();
  std::seed_seq seq{static_cast<std::uint32_t>(prob.seed & 0xffffffffu), static_cast<std::uint32_t>(prob.seed >> 32),
                    static_cast<std::uint32_t>(start)};
  std::mt19937_64 gen(seq);
  std::uniform_real_distribution<double> dist(-constants::kPi, constants::kPi);
  Eigen::VectorXd v(nv);
  for (int i = 0; i < np; ++i) v[i] = dist(gen);
  // Log-amplitudes start at |g| ~ 0.1 g_scale.
  for (int i = np; i < nv; ++i) v[i] = 0.5 * std::log(10.0);

  StartOutcome out;
  out.start = start;

  const int pattern = pp.n_sign_patterns() > 0 ? start % pp.n_sign_patterns() : -1;
  out.sign_pattern = pattern;
  const CouplingConstraints c0 = pp.constraints(v, false, pattern);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(c0.equality.size());
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(c0.inequality.size());
  double rho = 10.0;
  double prev_violation = std::numeric_limits<double>::infinity();
  std::vector<double> history;

  LbfgsOptions opts;
  opts.max_iterations = prob.max_inner_iterations;
  opts.gradient_tolerance = 1e-6;

  auto meets = [&](const Evaluation& e) {
    return e.objective <= prob.objective_tolerance && e.violation <= prob.constraint_tolerance;
  };

  for (int outer = 0; outer < prob.max_outer_iterations; ++outer) {
    const ValueGradient lagrangian = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      double value = pp.objective(x, &grad);
      const CouplingConstraints c = pp.constraints(x, true, pattern);
      for (Eigen::Index i = 0; i < c.equality.size(); ++i) {
        value += lambda[i] * c.equality[i] + 0.5 * rho * c.equality[i] * c.equality[i];
        grad += (lambda[i] + rho * c.equality[i]) * c.equality_jacobian.row(i).transpose();
      }
      for (Eigen::Index i = 0; i < c.inequality.size(); ++i) {
        const double shifted = std::max(0.0, mu[i] - rho * c.inequality[i]);
        value += (shifted * shifted - mu[i] * mu[i]) / (2.0 * rho);
        grad -= shifted * c.inequality_jacobian.row(i).transpose();
      }
      return value;
    };
    const LbfgsResult inner = minimize_lbfgs(lagrangian, v, opts);
    v = inner.x;
    out.inner_iterations += inner.iterations;
    out.outer_iterations = outer + 1;

    const Evaluation e = evaluate(pp, v, pattern);
    // Close to a zero-residual point: Newton finishes far faster than further AL rounds.
    if (e.objective < kPolishObjective && e.violation < kPolishViolation) {
      const Eigen::VectorXd polished = newton_polish(pp, v, pattern);
      if (meets(evaluate(pp, polished, pattern))) {
        v = polished;
        break;
      }
    }
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] += rho * e.c.equality[i];
    for (Eigen::Index i = 0; i < mu.size(); ++i) mu[i] = std::max(0.0, mu[i] - rho * e.c.inequality[i]);
    if (e.violation > 0.25 * prev_violation) rho = std::min(rho * 10.0, 1e12);
    prev_violation = e.violation;
    // Stalled: no halving of the violation over the last kStallWindow rounds.
    history.push_back(e.violation);
    if (history.size() > kStallWindow && e.violation > 10.0 * prob.constraint_tolerance &&
        e.violation > 0.5 * history[history.size() - 1 - kStallWindow])
      break;
    opts.gradient_tolerance = std::max(1e-12, 0.1 * opts.gradient_tolerance);
  }

  if (!meets(evaluate(pp, v, pattern))) v = newton_polish(pp, v, pattern);
  for (int i = 0; i < np; ++i) v[i] = wrap_phase(v[i]);
  const Evaluation e = evaluate(pp, v, pattern);
  out.vars = v;
  out.objective = e.objective;
  out.max_violation = e.violation;
  out.converged = e.objective <= prob.objective_tolerance && e.violation <= prob.constraint_tolerance;
  out.max_amplitude = std::numeric_limits<double>::quiet_NaN();
  if (out.converged) {
    try {
      const Eigen::MatrixXd g = scaled_couplings(pp.integrals(), prob.eta, pp.phases(v));
      out.max_amplitude = solve_amplitudes(g, prob.target_coupling).omega_tau.cwiseAbs().maxCoeff();
    } catch (const OptimizerError&) {
      out.converged = false;
    }
  }
  return out;
}

bool better(const StartOutcome& a, const StartOutcome& b) {
  if (a.converged != b.converged) return a.converged;
  if (a.converged) {
    if (a.max_amplitude != b.max_amplitude) return a.max_amplitude < b.max_amplitude;
    if (a.objective != b.objective) return a.objective < b.objective;
    return a.start < b.start;
  }
  const double ma = a.objective + a.max_violation;
  const double mb = b.objective + b.max_violation;
  if (ma != mb) return ma < mb;
  return a.start < b.start;
}

}  // namespace

std::string feasibility_warning(const SynthesisProblem& problem) {
  const ReducedVariableMap map = symmetry_reduce(problem);
  const int n = problem.n_ions();
  const int needed = n * problem.modes.n_modes() + n * (n - 1) / 2;
  const int have = problem.n_segments * static_cast<int>(map.classes().size());
  if (have >= needed) return {};
  std::ostringstream msg;
  msg << "only " << have << " segment-class phases for " << needed
      << " constraints (N*M + N(N-1)/2); the problem is likely infeasible";
  return msg.str();
}

SynthesisResult solve_phases(const SynthesisProblem& problem) {
  problem.validate();
  const int n = problem.n_ions();
  SynthesisResult result;
  result.seed = problem.seed;
  result.scheme.detuning = problem.detuning;
  result.scheme.gate_time = problem.gate_time;
  result.scheme.n_segments = problem.n_segments;

  if (n == 1) {
    result.scheme.phases = Eigen::MatrixXd::Zero(1, problem.n_segments);
    result.scheme.peak_amplitudes = Eigen::VectorXd::Zero(1);
    result.warnings.push_back("single ion: no pairwise coupling to produce, returning an empty scheme");
    result.constraint_form = "none";
    return result;
  }

  const PhaseProblem pp(problem);
  result.constraint_form = pp.constraint_form();
  if (auto w = feasibility_warning(problem); !w.empty()) result.warnings.push_back(w);

  std::vector<StartOutcome> starts(static_cast<std::size_t>(problem.multistart));
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < problem.multistart; ++s) starts[s] = run_start(pp, s);
  std::sort(starts.begin(), starts.end(), better);

  const StartOutcome& best = starts.front();
  result.best_start = best.start;
  result.scheme.phases = pp.phases(best.vars).unaryExpr([](double p) { return wrap_phase(p); });
  result.scheme.peak_amplitudes = Eigen::VectorXd::Zero(n);

  // Residuals recomputed from the final phases, independent of solver state.
  const ModeIntegrals ints = mode_integrals(problem.modes.frequencies, problem.detuning, problem.gate_time, problem.n_segments);
  const Eigen::MatrixXd g = scaled_couplings(ints, problem.eta, result.scheme.phases);
  result.objective = scaled_displacements(ints, result.scheme.phases).cwiseAbs2().sum();
  Eigen::VectorXd final_vars(pp.n_vars());
  final_vars << pp.variables().reduce(result.scheme.phases), best.vars.tail(pp.n_amplitude_vars());
  const CouplingConstraints c = pp.constraints(final_vars, false, best.sign_pattern);
  result.equality_residuals = c.equality;
  result.inequality_residuals = c.inequality;
  double viol = c.equality.size() ? c.equality.lpNorm<Eigen::Infinity>() : 0.0;
  for (Eigen::Index i = 0; i < c.inequality.size(); ++i) viol = std::max(viol, -c.inequality[i]);
  result.max_violation = viol;
  result.starts = std::move(starts);

  if (!result.starts.front().converged) {
    std::ostringstream msg;
    msg << "solve_phases: none of " << problem.multistart << " starts converged; best objective "
        << result.objective << ", max constraint violation " << result.max_violation;
    throw SynthesisFailure(msg.str(), std::move(result));
  }

  const AmplitudeSolution amps = solve_amplitudes(g, problem.target_coupling);
  result.scheme.peak_amplitudes = amps.omega_tau / problem.gate_time;
  result.max_theta_deviation = amps.max_relative_deviation;
  return result;
}

Synthesis synthesize(const SynthesisProblem& problem, int samples_per_segment) {
  Synthesis out{solve_phases(problem), {}};
  out.diagnostics = diagnose(problem.eta, problem.modes, out.result.scheme, samples_per_segment);
  out.result.max_theta_deviation =
      problem.n_ions() > 1 ? out.diagnostics.max_theta_deviation(problem.target_coupling, out.result.scheme) : 0.0;
  return out;
}

}  // namespace iongate
