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

#include "iongate/lbfgs.hpp"

#include <cmath>
#include <algorithm>
#include <deque>
#include <vector>

namespace iongate {

LbfgsResult minimize_lbfgs(const ValueGradient& fg, Eigen::VectorXd x0, const LbfgsOptions& opts) {
  const auto n = x0.size();
  LbfgsResult out{std::move(x0), 0.0, 0, false};
  if (n == 0) {
    Eigen::VectorXd g;
    out.value = fg(out.x, g);
    out.converged = true;
    return out;
  }

  Eigen::VectorXd g(n), g_new(n), x_new(n);
  double f = fg(out.x, g);
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    out.iterations = iter;
    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      out.converged = true;
      break;
    }

    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> a(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      a[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= a[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    } else {
      q /= std::max(g.norm(), 1e-300);
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(q);
      q += s_hist[i] * (a[i] - b);
    }
    Eigen::VectorXd dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g / std::max(g.norm(), 1e-300);
      slope = g.dot(dir);
    }

    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = out.x + step * dir;
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // Quadratic interpolation of phi(step), safeguarded to [0.1, 0.5] step.
      double trial = -slope * step * step / (2.0 * (f_new - f - slope * step));
      if (!std::isfinite(trial)) trial = 0.5 * step;
      step = std::clamp(trial, 0.1 * step, 0.5 * step);
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_new - out.x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = f - f_new;
    out.x = x_new;
    g = g_new;
    f = f_new;
    if (decrease <= opts.value_tolerance * std::max(std::abs(f), 1e-300) && decrease >= 0.0 &&
        g.lpNorm<Eigen::Infinity>() <= 1e3 * opts.gradient_tolerance) {
      out.converged = true;
      break;
    }
  }
  out.value = f;
  return out;
}

}  // namespace iongate
