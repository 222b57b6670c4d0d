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

#include <stdexcept>
#include <string>

namespace iongate {

// Exit-code contract used by the command-line tool:
//   PhysicsError   -> 2 (unstable chain, failed fit, non-converging root solve)
//   OptimizerError -> 3 (no multistart reached the tolerances)
//   InputError     -> 4 (malformed files, inconsistent dimensions)

class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iongate
