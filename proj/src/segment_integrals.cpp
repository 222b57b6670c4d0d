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

#include "iongate/segment_integrals.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "iongate/constants.hpp"
#include "iongate/errors.hpp"

namespace iongate {

namespace {

constexpr cplx kI{0.0, 1.0};

// e^z - 1 without cancellation.
cplx expm1_complex(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// Below this node spread the Taylor series of exp[w0, w1, w2] is used.
constexpr double kSeriesSpread = 0.5;

}  // namespace

std::vector<WindowTerm> window_terms(int segment, int n_segments) {
  if (n_segments < 1 || segment < 0 || segment >= n_segments)
    throw InputError("window_terms: segment index out of range");
  using constants::kPi;
  if (n_segments == 1) {
    // sin^2(pi s) = 1/2 - (e^{2 pi i s} + e^{-2 pi i s}) / 4
    return {{0.5, 0.0}, {-0.25, 2.0 * kPi}, {-0.25, -2.0 * kPi}};
  }
  const double omega = kPi * n_segments;
  if (segment == 0) {
    return {{0.5, 0.0}, {-0.25, omega}, {-0.25, -omega}};
  }
  if (segment == n_segments - 1) {
    // cos(omega (s - 1)) shifted to the segment's absolute time origin.
    const cplx shift = std::exp(-kI * omega);
    return {{0.5, 0.0}, {-0.25 * shift, omega}, {-0.25 * std::conj(shift), -omega}};
  }
  return {{1.0, 0.0}};
}

double window_value(double t, double tau, double tau_s) {
  if (!(t >= 0.0 && t <= tau)) throw InputError("window_value: t outside [0, tau]");
  using constants::kPi;
  if (tau_s >= tau) {
    const double s = std::sin(kPi * t / tau);
    return s * s;
  }
  if (t < tau_s) {
    const double s = std::sin(kPi / (2.0 * tau_s) * t);
    return s * s;
  }
  if (t > tau - tau_s) {
    const double s = std::sin(kPi / (2.0 * tau_s) * (t - tau));
    return s * s;
  }
  return 1.0;
}

cplx phi1(cplx z) {
  if (z == cplx(0.0, 0.0)) return 1.0;
  return expm1_complex(z) / z;
}

cplx exp_divided_difference(cplx z0, cplx z1, cplx z2) {
  const std::array<cplx, 3> z{z0, z1, z2};
  const std::array<double, 3> dist{std::abs(z[1] - z[0]), std::abs(z[2] - z[0]), std::abs(z[2] - z[1])};
  const double spread = *std::max_element(dist.begin(), dist.end());

  if (spread >= kSeriesSpread) {
    // Recurrence with the widest pair as outer nodes.
    int p = 0, q = 1, t = 2;
    if (dist[1] >= dist[0] && dist[1] >= dist[2]) {
      p = 0; q = 2; t = 1;
    } else if (dist[2] >= dist[0] && dist[2] >= dist[1]) {
      p = 1; q = 2; t = 0;
    }
    const cplx first_pt = std::exp(z[p]) * phi1(z[t] - z[p]);
    const cplx first_tq = std::exp(z[t]) * phi1(z[q] - z[t]);
    return (first_tq - first_pt) / (z[q] - z[p]);
  }

  // exp[w0,w1,w2] = sum_n h_n(w0,w1,w2) / (n+2)!, with h_n the complete
  // homogeneous symmetric polynomial, evaluated about the node centroid.
  const cplx c = (z[0] + z[1] + z[2]) / 3.0;
  const cplx w0 = z[0] - c, w1 = z[1] - c, w2 = z[2] - c;
  // h_1 vanishes about the centroid and odd h_n can vanish for symmetric nodes, so
  // termination uses the bound |h_n| <= C(n+2, 2) r^n rather than the last term.
  const double r = std::max({std::abs(w0), std::abs(w1), std::abs(w2)});
  cplx a = 1.0, b = 1.0, h = 1.0;  // h_0 for {w0}, {w0,w1}, {w0,w1,w2}
  cplx sum = 0.5;                  // h_0 / 2!
  double fact = 2.0;
  double rn = 1.0;
  for (int n = 1; n <= 40; ++n) {
    a *= w0;
    b = a + w1 * b;
    h = b + w2 * h;
    fact *= (n + 2);
    rn *= r;
    sum += h / fact;
    const double next_bound = 0.5 * (n + 3) * (n + 4) * rn * r / (fact * (n + 3));
    if (next_bound < 1e-17 * std::abs(sum)) break;
  }
  return std::exp(c) * sum;
}

cplx segment_exp_integral(int segment, int n_segments, double delta, double len) {
  const double a = static_cast<double>(segment) / n_segments;
  cplx total = 0.0;
  for (const WindowTerm& term : window_terms(segment, n_segments)) {
    const double kappa = term.freq + delta;
    total += term.coeff * std::exp(kI * (kappa * a)) * len * phi1(kI * (kappa * len));
  }
  return total;
}

cplx segment_triangle_integral(int segment, int n_segments, double delta, double len) {
  const double a = static_cast<double>(segment) / n_segments;
  const auto terms = window_terms(segment, n_segments);
  cplx total = 0.0;
  for (const WindowTerm& outer : terms) {
    const double fa = outer.freq + delta;
    for (const WindowTerm& inner : terms) {
      const double fb = inner.freq - delta;
      const cplx simplex = exp_divided_difference(0.0, kI * (fa * len), kI * ((fa + fb) * len));
      total += outer.coeff * inner.coeff * std::exp(kI * ((fa + fb) * a)) * (len * len) * simplex;
    }
  }
  return total;
}

}  // namespace iongate
