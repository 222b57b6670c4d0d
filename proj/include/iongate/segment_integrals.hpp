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

#pragma once

#include <complex>
#include <vector>

// Closed-form integrals of the sin^2-windowed drive over one segment.
//
// Time is measured in units of the gate time (s = t / tau), so the gate spans
// [0, 1] and segment k (0-based) spans [k/K, (k+1)/K]. On every segment the
// window is a short sum of complex exponentials, which makes all single and
// triangular double integrals elementary; they are evaluated through
// divided differences of exp to stay accurate near coincident frequencies.

namespace iongate {

using cplx = std::complex<double>;

/// w(s) on one segment written as sum_p coeff_p * exp(i * freq_p * s).
struct WindowTerm {
  cplx coeff;
  double freq;
};

std::vector<WindowTerm> window_terms(int segment, int n_segments);

/// sin^2 shaping window in physical time. Throws InputError for t outside
/// [0, tau]. For a single segment (tau_s == tau) the window is sin^2(pi t / tau).
double window_value(double t, double tau, double tau_s);

/// (e^z - 1) / z, accurate for all z including z -> 0.
cplx phi1(cplx z);

/// Second divided difference exp[z0, z1, z2]; symmetric in its arguments and
/// continuous through coincident nodes.
cplx exp_divided_difference(cplx z0, cplx z1, cplx z2);

/// int_a^{a+len} w(s) exp(i delta s) ds, a = segment / n_segments, 0 <= len <= 1/K.
cplx segment_exp_integral(int segment, int n_segments, double delta, double len);

/// int_a^{a+len} ds2 int_a^{s2} ds1 w(s2) w(s1) exp(i delta (s2 - s1)).
cplx segment_triangle_integral(int segment, int n_segments, double delta, double len);

}  // namespace iongate
