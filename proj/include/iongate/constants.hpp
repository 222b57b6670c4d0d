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

#include <numbers>

namespace iongate::constants {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double kHbar = 1.054571817e-34;             // J s
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kElectronMass = 9.1093837015e-31;     // kg

// 171Yb+ : neutral atomic mass minus one electron.
inline constexpr double kYb171IonMass = 170.9363302 * kAtomicMassUnit - kElectronMass;

inline constexpr double kDefaultRamanWavelength = 377e-9;  // m

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Ordinary frequency in MHz -> angular frequency in rad/s.
constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double angular_to_mhz(double omega) { return omega / (kTwoPi * 1e6); }

}  // namespace iongate::constants
