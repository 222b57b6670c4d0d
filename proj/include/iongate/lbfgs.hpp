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

#include <Eigen/Dense>
#include <functional>

namespace iongate {

struct LbfgsOptions {
  int max_iterations = 3000;
  int history = 12;
  double gradient_tolerance = 1e-13;  // on ||g||_inf
  double value_tolerance = 1e-16;     // relative decrease over one iteration
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Function returning f(x) and writing the gradient into its second argument.
using ValueGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with a backtracking (Armijo, safeguarded quadratic interpolation) line search.
LbfgsResult minimize_lbfgs(const ValueGradient& fg, Eigen::VectorXd x0, const LbfgsOptions& opts = {});

}  // namespace iongate
