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

// Initial densities and velocities on the grid. Radial density samples are
// cell averages of base + amplitude * min(profile, cap) around (pi, pi), with
// the profile's support stretched to a disc of radius torus_radius.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "roughflow/errors.hpp"
#include "roughflow/norms_and_classes.hpp"
#include "roughflow/quadrature.hpp"
#include "roughflow/random_fields.hpp"
#include "roughflow/spectral_field.hpp"

namespace roughflow {

enum class InitialKind { taylor_green, random_solenoidal, radial_density_sample, custom };
enum class VelocityKind { zero, taylor_green, random_solenoidal };

inline InitialKind initial_kind_from_string(const std::string& s) {
  if (s == "taylor_green") return InitialKind::taylor_green;
  if (s == "random_solenoidal") return InitialKind::random_solenoidal;
  if (s == "radial_density_sample") return InitialKind::radial_density_sample;
  if (s == "custom") return InitialKind::custom;
  throw InvalidArgument("unknown initial data kind '" + s + "'");
}

inline VelocityKind velocity_kind_from_string(const std::string& s) {
  if (s == "zero") return VelocityKind::zero;
  if (s == "taylor_green") return VelocityKind::taylor_green;
  if (s == "random_solenoidal") return VelocityKind::random_solenoidal;
  throw InvalidArgument("unknown velocity kind '" + s + "'");
}

struct InitialDataParams {
  InitialKind kind = InitialKind::taylor_green;
  int grid_n = 64;
  // velocity
  VelocityKind velocity = VelocityKind::taylor_green;  // used by radial_density_sample
  double amplitude = 1.0;                              // Taylor-Green amplitude
  std::uint64_t seed = 1;
  int k_max = 8;
  double rms_speed = 1.0;
  // density
  double density_base = 1.0;       // random_solenoidal: rho = base + variation sin x1 sin x2
  double density_variation = 0.0;
  RadialProfile profile = RadialProfile::make(ProfileKind::log_log_abs_log, 2);
  double profile_amplitude = 1.0;
  double torus_radius = std::numbers::pi;
  // custom
  std::function<double(double, double)> custom_rho;
  std::function<std::array<double, 2>(double, double)> custom_v;
};

struct InitialData {
  SpectralScalar rho;
  SpectralVector v;
};

/// Radial density base + amplitude * min(profile(r R / torus_radius), cap),
/// r = |x - (pi, pi)|, and base outside the disc.
struct RadialDensity {
  RadialProfile profile;
  double base = 1.0;
  double amplitude = 1.0;
  double torus_radius = std::numbers::pi;

  double scale() const { return profile.support_radius / torus_radius; }

  double at_radius(double r) const {
    if (!(r < torus_radius)) return base;
    if (r == 0.0) return base + amplitude * profile.cap;
    return base + amplitude * profile(r * scale());
  }

  // Periodic in both coordinates.
  double operator()(double x1, double x2) const {
    const double tau = 2.0 * std::numbers::pi;
    return at_radius(std::hypot(std::remainder(x1 - std::numbers::pi, tau), std::remainder(x2 - std::numbers::pi, tau)));
  }

  /// Total mass over the torus by one-dimensional radial quadrature.
  double mass() const {
    const double outside = base * (4.0 * std::numbers::pi * std::numbers::pi - std::numbers::pi * torus_radius * torus_radius);
    // 2 pi int_0^Rt r (base + amplitude g) dr; in s = -log(r / Rt) the
    // integrand r^2 g is smooth and decays like exp(-2 s).
    auto h = [&](double s) {
      const double r = torus_radius * std::exp(-s);
      return r * r * at_radius(r);
    };
    const auto res = integrate(h, uniform_breakpoints(0.0, 40.0, 160), {1e-13, 0.0, 20000});
    return outside + 2.0 * std::numbers::pi * res.value;
  }
};

namespace detail {

inline constexpr std::array<double, 6> kGauss6Nodes = {-0.932469514203152, -0.661209386466265, -0.238619186083197,
                                                       0.238619186083197,  0.661209386466265,  0.932469514203152};
inline constexpr std::array<double, 6> kGauss6Weights = {0.171324492379170, 0.360761573048139, 0.467913934568623,
                                                         0.467913934568623, 0.360761573048139, 0.171324492379170};

// Average of rho over [x - h, x + h] x [y - h, y + h].
inline double cell_average(const RadialDensity& rho, double x, double y, double h) {
  const double pi = std::numbers::pi;
  const double R = rho.torus_radius;
  const double near = std::hypot(std::max(0.0, std::abs(x - pi) - h), std::max(0.0, std::abs(y - pi) - h));
  const double far = std::hypot(std::abs(x - pi) + h, std::abs(y - pi) + h);
  // Cells away from the centre and from the support circle are smooth.
  const bool smooth = (far < R || near > R) && near > 2.0 * h;
  if (smooth) {
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        sum += kGauss6Weights[i] * kGauss6Weights[j] * rho(x + h * kGauss6Nodes[i], y + h * kGauss6Nodes[j]);
      }
    }
    return 0.25 * sum;
  }
  auto inner = [&](double xx) {
    std::vector<double> bp{y - h, y + h};
    if (pi > y - h && pi < y + h) bp.push_back(pi);
    const double dx = std::remainder(xx - pi, 2.0 * pi);
    if (std::abs(dx) < R) {
      const double c = std::sqrt(R * R - dx * dx);
      for (double yc : {pi - c, pi + c, pi - c - 2.0 * pi, pi + c - 2.0 * pi}) {
        if (yc > y - h && yc < y + h) bp.push_back(yc);
      }
    }
    std::sort(bp.begin(), bp.end());
    return integrate([&](double yy) { return rho(xx, yy); }, bp, {1e-11, 0.0, 2000}).value;
  };
  std::vector<double> bp{x - h, x + h};
  for (double xc : {pi - R, pi, pi + R}) {
    if (xc > x - h && xc < x + h) bp.push_back(xc);
  }
  std::sort(bp.begin(), bp.end());
  return integrate(inner, bp, {1e-10, 0.0, 2000}).value / (4.0 * h * h);
}

}  // namespace detail

/// Cell averages of a radial density on the grid; the mean of the result is
/// exactly the mass of the continuous density divided by (2pi)^2, up to
/// quadrature error.
inline SpectralScalar sample_radial_density(Grid grid, const RadialDensity& rho) {
  rho.profile.validate();
  if (!(rho.torus_radius > 0.0 && rho.torus_radius <= std::numbers::pi)) {
    throw InvalidArgument("torus_radius must lie in (0, pi]");
  }
  if (!(rho.base >= 0.0 && rho.amplitude >= 0.0)) throw InvalidArgument("radial density must be nonnegative");
  const int n = grid.n();
  const double h = 0.5 * grid.spacing();
  std::vector<double> values(grid.size());
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      values[static_cast<std::size_t>(i2) * n + i1] =
          detail::cell_average(rho, grid.coordinate(i1), grid.coordinate(i2), h);
    }
  }
  return SpectralScalar::from_physical(grid, values);
}

inline SpectralVector taylor_green_velocity(Grid grid, double amplitude) {
  SpectralVector v(SpectralScalar::from_function(grid, [&](double x, double y) { return amplitude * std::sin(x) * std::cos(y); }),
                   SpectralScalar::from_function(grid, [&](double x, double y) { return -amplitude * std::cos(x) * std::sin(y); }));
  return leray_project(v);
}

/// Density and velocity for one of the supported families. The velocity is
/// always returned Leray-projected.
inline InitialData make_initial_data(const InitialDataParams& prm) {
  const Grid grid(prm.grid_n);
  auto velocity = [&](VelocityKind kind) {
    switch (kind) {
      case VelocityKind::zero: return SpectralVector(grid);
      case VelocityKind::taylor_green: return taylor_green_velocity(grid, prm.amplitude);
      case VelocityKind::random_solenoidal: return leray_project(random_solenoidal(grid, prm.seed, prm.k_max, prm.rms_speed));
    }
    return SpectralVector(grid);
  };
  InitialData out{SpectralScalar(grid), SpectralVector(grid)};
  switch (prm.kind) {
    case InitialKind::taylor_green:
      out.rho = SpectralScalar::constant(grid, prm.density_base);
      out.v = velocity(VelocityKind::taylor_green);
      break;
    case InitialKind::random_solenoidal:
      if (std::abs(prm.density_variation) > prm.density_base) {
        throw InvalidArgument("density variation exceeds the base density");
      }
      out.rho = SpectralScalar::from_function(grid, [&](double x, double y) {
        return prm.density_base + prm.density_variation * std::sin(x) * std::sin(y);
      });
      out.v = velocity(VelocityKind::random_solenoidal);
      break;
    case InitialKind::radial_density_sample:
      out.rho = sample_radial_density(grid, {prm.profile, prm.density_base, prm.profile_amplitude, prm.torus_radius});
      out.v = velocity(prm.velocity);
      break;
    case InitialKind::custom: {
      if (!prm.custom_rho || !prm.custom_v) throw InvalidArgument("custom data needs density and velocity callbacks");
      out.rho = SpectralScalar::from_function(grid, prm.custom_rho);
      std::vector<double> v1(grid.size()), v2(grid.size());
      const int n = grid.n();
      for (int i2 = 0; i2 < n; ++i2) {
        for (int i1 = 0; i1 < n; ++i1) {
          const auto v = prm.custom_v(grid.coordinate(i1), grid.coordinate(i2));
          v1[static_cast<std::size_t>(i2) * n + i1] = v[0];
          v2[static_cast<std::size_t>(i2) * n + i1] = v[1];
        }
      }
      out.v = leray_project(SpectralVector(SpectralScalar::from_physical(grid, v1), SpectralScalar::from_physical(grid, v2)));
      break;
    }
  }
  if (!(out.rho.mean() > 0.0)) throw InvalidArgument("initial density must have positive mass");
  return out;
}

}  // namespace roughflow
