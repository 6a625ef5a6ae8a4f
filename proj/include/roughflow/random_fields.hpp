// Copyright 2026 The roughflow Authors
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

// Random trigonometric polynomials. Coefficients are drawn mode by mode in a
// fixed order that does not depend on the grid, so one seed describes the
// same continuous field on every grid that resolves it.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "roughflow/spectral_field.hpp"

namespace roughflow {

/// Uniform doubles in [0, 1) built from raw 64-bit draws, so sequences are
/// identical across standard library implementations.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Field with |c_k| = |k|^-decay and uniform random phases on 1 <= |k| <= k_max.
/// The result has zero mean; k_max must stay below n/2.
inline SpectralScalar random_trig_field(Grid grid, std::uint64_t seed, int k_max, double decay = 2.0) {
  if (k_max < 1 || 2 * k_max >= grid.n()) {
    throw InvalidArgument("random field band must satisfy 1 <= k_max < n/2");
  }
  UniformSource rng(seed);
  SpectralScalar f(grid);
  // Half-plane {k2 > 0} U {k2 == 0, k1 > 0}; the conjugate fills the rest.
  for (int k2 = 0; k2 <= k_max; ++k2) {
    for (int k1 = -k_max; k1 <= k_max; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      const int kk = k1 * k1 + k2 * k2;
      if (kk > k_max * k_max) continue;
      const double phase = 2.0 * std::numbers::pi * rng.next();
      const Complex c = std::polar(std::pow(std::sqrt(static_cast<double>(kk)), -decay), phase);
      f.set_coeff(k1, k2, c);
      f.set_coeff(-k1, -k2, std::conj(c));
    }
  }
  return f;
}

/// Divergence-free velocity from a random stream function, scaled so that
/// the root-mean-square speed ||v||_2 / (2pi) equals rms_speed.
inline SpectralVector random_solenoidal(Grid grid, std::uint64_t seed, int k_max, double rms_speed,
                                        double decay = 3.0) {
  const SpectralScalar psi = random_trig_field(grid, seed, k_max, decay);
  SpectralVector v(partial(psi, 1), -1.0 * partial(psi, 0));
  const double rms = v.l2_norm() / kTwoPi;
  if (rms > 0.0) v *= rms_speed / rms;
  v.flag_solenoidal(true);
  return v;
}

}  // namespace roughflow
