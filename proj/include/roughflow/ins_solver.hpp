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

// Pseudo-spectral solver for the inhomogeneous incompressible Navier-Stokes
// system on the torus,
//
//   rho_t + div(rho v) = 0,
//   (rho v)_t + div(rho v (x) v) - mu Lap v + grad P = 0,   div v = 0,
//
// in conservative variables (rho, m = rho v). Each SSP-RK3 stage is a forward
// Euler substep followed by a variable-density projection: the stage
// momentum m* is corrected to m* - grad Q with div((m* - grad Q) / rho~) = 0,
// rho~ = max(rho, vacuum_floor). Every increment of rho and m is a divergence
// or a gradient, so total mass and momentum are conserved to rounding.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "roughflow/errors.hpp"
#include "roughflow/norms_and_classes.hpp"
#include "roughflow/spectral_field.hpp"

namespace roughflow {

struct SolverConfig {
  int grid_n = 64;
  double mu = 0.01;
  double cfl = 0.4;
  double t_end = 1.0;
  double vacuum_floor = 0.0;
  double pressure_tol = 1e-10;
  int pressure_max_iter = 500;
  std::vector<double> diag_p_list{2.0, 4.0, 8.0};
  double output_interval = 0.0;  // 0: one record per step
  double dt_max = std::numeric_limits<double>::infinity();
  double hess_r = 1.5;
  long max_steps = 10'000'000;

  void validate() const {
    Grid check(grid_n);
    (void)check;
    if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
    if (!(cfl > 0.0 && cfl < 1.0)) throw InvalidArgument("cfl must lie in (0, 1)");
    if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be nonnegative");
    if (!(vacuum_floor >= 0.0)) throw InvalidArgument("vacuum_floor must be nonnegative");
    if (!(pressure_tol > 0.0)) throw InvalidArgument("pressure_tol must be positive");
    if (pressure_max_iter < 1) throw InvalidArgument("pressure_max_iter must be >= 1");
    if (!(output_interval >= 0.0)) throw InvalidArgument("output_interval must be nonnegative");
    if (!(dt_max > 0.0)) throw InvalidArgument("dt_max must be positive");
    if (!(hess_r >= 1.0 && hess_r < 2.0)) throw InvalidArgument("hess_r must lie in [1, 2)");
    for (double p : diag_p_list) {
      if (!(p >= 1.0)) throw InvalidArgument("diag_p_list entries must be >= 1");
    }
  }
};

/// Running time integrals behind the monitored quantities.
struct TimeIntegrals {
  double ke0 = 0.0;
  double dissipation = 0.0;  // mu int ||grad v||_2^2
  double half_accel = 0.0;   // (1/2) int ||sqrt(rho) v_t||_2^2
  double hess_lr = 0.0;      // int ||grad^2 v||_r^2
  double clipped_mass = 0.0;
};

struct SimulationState {
  explicit SimulationState(Grid g) : rho(g), v(g), p_field(g), momentum(g), v_t(g) {}

  double t = 0.0;
  SpectralScalar rho;
  SpectralVector v;
  SpectralScalar p_field;
  SpectralVector momentum;  // evolved m; equals rho v wherever rho >= vacuum_floor
  SpectralVector v_t;       // last-stage time derivative of v
  TimeIntegrals history;
  double last_dt = 0.0;
  int last_pressure_iterations = 0;
  double last_clipped_mass = 0.0;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  std::array<double, 2> momentum{};
  double kinetic_energy = 0.0;
  double dissipation_integral = 0.0;
  double energy_residual = 0.0;
  std::vector<std::pair<double, double>> rho_lp;
  double grad_v_l2 = 0.0;
  double X_t = std::numbers::e;
  double weighted_accel = 0.0;
  double hess_lr_integral = 0.0;
  double grad_v_linf = 0.0;
  double clipped_mass = 0.0;
};

struct PressureStats {
  int iterations = 0;
  std::vector<double> residual_history;
};

namespace detail {

inline double l2_coeffs(std::span<const Complex> c) {
  double s = 0.0;
  for (auto z : c) s += std::norm(z);
  return kTwoPi * std::sqrt(s);
}

inline double dot_coeffs(std::span<const Complex> a, std::span<const Complex> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

// 1 / max(rho, floor) on the grid.
inline std::vector<double> inverse_density(std::span<const double> rho, double floor) {
  std::vector<double> w(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = std::max(rho[i], floor);
    if (!(r > 0.0)) throw SolverFailure("vacuum reached with vacuum_floor = 0", {});
    w[i] = 1.0 / r;
  }
  return w;
}

// div(w grad P).
inline SpectralScalar weighted_laplacian(const SpectralScalar& P, std::span<const double> w) {
  std::vector<double> g1, g2;
  to_physical_pair(partial(P, 0), partial(P, 1), g1, g2);
  for (std::size_t i = 0; i < w.size(); ++i) {
    g1[i] *= w[i];
    g2[i] *= w[i];
  }
  SpectralVector flux(P.grid());
  from_physical_pair(g1, g2, flux[0], flux[1]);
  return divergence(flux);
}

// div(w u).
inline SpectralScalar weighted_divergence(const SpectralVector& u, std::span<const double> w) {
  std::vector<double> a, b;
  to_physical_pair(u[0], u[1], a, b);
  for (std::size_t i = 0; i < w.size(); ++i) {
    a[i] *= w[i];
    b[i] *= w[i];
  }
  SpectralVector flux(u.grid());
  from_physical_pair(a, b, flux[0], flux[1]);
  return divergence(flux);
}

// Preconditioned CG for -div(w grad P) = -div(w rhs) on zero-mean P.
inline SpectralScalar pressure_solve_weights(std::span<const double> w, const SpectralVector& rhs, double tol,
                                             int max_iter, PressureStats* stats) {
  const Grid& g = rhs.grid();
  SpectralScalar x(g);
  const double target = tol * rhs.l2_norm();
  std::vector<double> history;
  if (target == 0.0) {
    if (stats) *stats = {0, {}};
    return x;
  }
  double w_mean = 0.0;
  for (double v : w) w_mean += v;
  w_mean /= static_cast<double>(w.size());
  std::vector<double> inv_k2(g.size(), 0.0);
  for_each_derivative_mode(g, [&](std::size_t i, int k1, int k2) {
    const int kk = k1 * k1 + k2 * k2;
    if (kk > 0) inv_k2[i] = 1.0 / (w_mean * kk);
  });
  auto precondition = [&](const SpectralScalar& r) {
    SpectralScalar z(g);
    auto src = r.coeffs();
    auto dst = z.coeffs();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * inv_k2[i];
    return z;
  };
  const SpectralScalar c = -1.0 * weighted_divergence(rhs, w);
  SpectralScalar r = c;
  double r_norm = l2_coeffs(r.coeffs());
  history.push_back(r_norm);
  int it = 0;
  while (r_norm > target && it < max_iter) {
    SpectralScalar z = precondition(r);
    SpectralScalar p = z;
    double rz = dot_coeffs(r.coeffs(), z.coeffs());
    while (it < max_iter) {
      ++it;
      const SpectralScalar Ap = -1.0 * weighted_laplacian(p, w);
      const double pAp = dot_coeffs(p.coeffs(), Ap.coeffs());
      if (!(pAp > 0.0)) break;
      const double alpha = rz / pAp;
      auto xc = x.coeffs();
      auto rc = r.coeffs();
      auto pc = p.coeffs();
      auto ac = Ap.coeffs();
      for (std::size_t i = 0; i < xc.size(); ++i) {
        xc[i] += alpha * pc[i];
        rc[i] -= alpha * ac[i];
      }
      r_norm = l2_coeffs(r.coeffs());
      history.push_back(r_norm);
      if (r_norm <= target) break;
      z = precondition(r);
      const double rz_new = dot_coeffs(r.coeffs(), z.coeffs());
      const double beta = rz_new / rz;
      rz = rz_new;
      auto zc = z.coeffs();
      for (std::size_t i = 0; i < pc.size(); ++i) pc[i] = zc[i] + beta * pc[i];
    }
    // Confirm on the true residual; restart from it if recursion drifted.
    r = c + weighted_laplacian(x, w);
    r_norm = l2_coeffs(r.coeffs());
    history.back() = r_norm;
    if (!std::isfinite(r_norm)) break;
  }
  if (stats) *stats = {it, history};
  if (!(r_norm <= target)) {
    throw SolverFailure("pressure solve did not reach tolerance in " + std::to_string(it) + " iterations", history);
  }
  return x;
}

}  // namespace detail

/// Zero-mean P with ||div((1/max(rho, eps))(rhs - grad P))||_2 <= tol ||rhs||_2,
/// by conjugate gradients preconditioned with the constant-coefficient
/// inverse (mean weight times |k|^2).
inline SpectralScalar pressure_solve(const SpectralScalar& rho, const SpectralVector& rhs, const SolverConfig& cfg,
                                     PressureStats* stats = nullptr) {
  if (!(rho.grid() == rhs.grid())) throw InvalidArgument("density and rhs live on different grids");
  const auto w = detail::inverse_density(rho.to_physical(), cfg.vacuum_floor);
  return detail::pressure_solve_weights(w, rhs, cfg.pressure_tol, cfg.pressure_max_iter, stats);
}

/// Physical-space min(rho0, k).
inline SpectralScalar truncate_density(const SpectralScalar& rho0, double k) {
  if (!(k > 0.0)) throw InvalidArgument("truncation level must be positive");
  auto values = rho0.to_physical();
  bool clipped = false;
  for (double& v : values) {
    if (v > k) {
      v = k;
      clipped = true;
    }
  }
  if (!clipped) return rho0;
  return SpectralScalar::from_physical(rho0.grid(), values);
}

namespace detail {

struct StageRates {
  SpectralScalar rho_t;  // -div(rho v)
  SpectralVector m_t;    // -div(rho v (x) v) + mu Lap v, before projection
};

inline StageRates stage_rates(const SpectralScalar& rho, const SpectralVector& v, double mu) {
  const Grid& g = rho.grid();
  const auto rho_p = dealias(rho).to_physical();
  std::vector<double> v1, v2;
  to_physical_pair(dealias(v[0]), dealias(v[1]), v1, v2);
  std::vector<double> a(rho_p.size()), b(rho_p.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rho_p[i] * v1[i];
    b[i] = rho_p[i] * v2[i];
  }
  SpectralVector mass_flux(g);
  from_physical_pair(a, b, mass_flux[0], mass_flux[1]);
  mass_flux = dealias(mass_flux);
  StageRates out{-1.0 * divergence(mass_flux), SpectralVector(g)};
  std::vector<double> m1, m2;
  to_physical_pair(mass_flux[0], mass_flux[1], m1, m2);
  // Row i of the flux tensor m_i v_j.
  for (int comp = 0; comp < 2; ++comp) {
    const auto& mi = comp == 0 ? m1 : m2;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = mi[i] * v1[i];
      b[i] = mi[i] * v2[i];
    }
    SpectralVector row(g);
    from_physical_pair(a, b, row[0], row[1]);
    out.m_t[comp] = -1.0 * divergence(dealias(row)) + mu * laplacian(v[comp]);
  }
  return out;
}

// Leray(m / rho~) and the grid values of rho.
inline SpectralVector velocity_from_momentum(const SpectralVector& m, std::span<const double> w) {
  std::vector<double> a, b;
  to_physical_pair(m[0], m[1], a, b);
  for (std::size_t i = 0; i < w.size(); ++i) {
    a[i] *= w[i];
    b[i] *= w[i];
  }
  SpectralVector v(m.grid());
  from_physical_pair(a, b, v[0], v[1]);
  return leray_project(v);
}

inline double grad_l2_squared(const SpectralVector& v) {
  double s = 0.0;
  for (int c = 0; c < 2; ++c) {
    auto src = v[c].coeffs();
    for_each_derivative_mode(v.grid(), [&](std::size_t i, int k1, int k2) {
      s += static_cast<double>(k1 * k1 + k2 * k2) * std::norm(src[i]);
    });
  }
  return kTwoPi * kTwoPi * s;
}

// ||grad^2 v||_r^2 with the pointwise Frobenius norm of the Hessian.
inline double hessian_lr_squared(const SpectralVector& v, double r) {
  const Grid& g = v.grid();
  std::vector<double> sum(g.size(), 0.0), a, b;
  for (int c = 0; c < 2; ++c) {
    const auto d1 = partial(v[c], 0);
    const auto d2 = partial(v[c], 1);
    to_physical_pair(partial(d1, 0), partial(d2, 1), a, b);
    for (std::size_t i = 0; i < a.size(); ++i) sum[i] += a[i] * a[i] + b[i] * b[i];
    const auto d12 = partial(d1, 1);
    to_physical_pair(d12, SpectralScalar(g), a, b);
    for (std::size_t i = 0; i < a.size(); ++i) sum[i] += 2.0 * a[i] * a[i];
  }
  double acc = 0.0;
  for (double s : sum) acc += std::pow(s, 0.5 * r);
  return std::pow(acc * g.cell_area(), 2.0 / r);
}

// ||sqrt(rho) v_t||_2^2 with v_t = (a - rho_t v) / rho~.
inline double weighted_accel_squared(const SpectralVector& accel, const SpectralScalar& rho_t, const SpectralVector& v,
                                     std::span<const double> rho_p, std::span<const double> w,
                                     SpectralVector* v_t_out = nullptr) {
  std::vector<double> a1, a2, v1, v2;
  to_physical_pair(accel[0], accel[1], a1, a2);
  to_physical_pair(v[0], v[1], v1, v2);
  const auto rt = rho_t.to_physical();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    a1[i] = (a1[i] - rt[i] * v1[i]) * w[i];
    a2[i] = (a2[i] - rt[i] * v2[i]) * w[i];
    s += std::max(rho_p[i], 0.0) * (a1[i] * a1[i] + a2[i] * a2[i]);
  }
  if (v_t_out) {
    *v_t_out = SpectralVector(v.grid());
    from_physical_pair(a1, a2, (*v_t_out)[0], (*v_t_out)[1]);
  }
  return s * v.grid().cell_area();
}

inline bool all_finite(const SpectralScalar& f) {
  for (auto c : f.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

inline double max_speed(const SpectralVector& v) {
  std::vector<double> a, b;
  to_physical_pair(v[0], v[1], a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::hypot(a[i], b[i]));
  return m;
}

inline SpectralVector momentum_of(const SpectralScalar& rho, const SpectralVector& v) {
  const auto r = rho.to_physical();
  std::vector<double> a, b;
  to_physical_pair(v[0], v[1], a, b);
  for (std::size_t i = 0; i < r.size(); ++i) {
    a[i] *= r[i];
    b[i] *= r[i];
  }
  SpectralVector m(v.grid());
  from_physical_pair(a, b, m[0], m[1]);
  return m;
}

inline double kinetic_energy(const SpectralScalar& rho, const SpectralVector& v) {
  const auto r = rho.to_physical();
  std::vector<double> a, b;
  to_physical_pair(v[0], v[1], a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r[i] * (a[i] * a[i] + b[i] * b[i]);
  return 0.5 * s * rho.grid().cell_area();
}

}  // namespace detail

/// State at time 0: the density is dealiased and the velocity is dealiased
/// and projected, so that products stay inside the resolved band.
inline SimulationState initial_state(const SpectralScalar& rho0, const SpectralVector& v0, const SolverConfig& cfg) {
  cfg.validate();
  if (rho0.grid().n() != cfg.grid_n || v0.grid().n() != cfg.grid_n) {
    throw InvalidArgument("initial data grid does not match grid_n");
  }
  if (!(rho0.mean() > 0.0)) throw InvalidArgument("initial density must have positive mass");
  SimulationState s(rho0.grid());
  s.rho = dealias(rho0);
  s.v = leray_project(dealias(v0));
  s.p_field = SpectralScalar(rho0.grid());
  s.momentum = detail::momentum_of(s.rho, s.v);
  s.v_t = SpectralVector(rho0.grid());
  s.history.ke0 = detail::kinetic_energy(s.rho, s.v);
  return s;
}

/// Stable step size: cfl * min(dx / |v|_inf, dx^2 rho_min / (4 mu)).
inline double stable_dt(const SimulationState& s, const SolverConfig& cfg) {
  const double dx = s.rho.grid().spacing();
  const auto r = s.rho.to_physical();
  double rmin = std::numeric_limits<double>::infinity();
  for (double v : r) rmin = std::min(rmin, v);
  const double floor = std::max(rmin, cfg.vacuum_floor);
  if (!(floor > 0.0)) throw SolverFailure("vacuum reached with vacuum_floor = 0", {});
  const double speed = detail::max_speed(s.v);
  const double adv = speed > 0.0 ? dx / speed : std::numeric_limits<double>::infinity();
  return std::min(cfg.dt_max, cfg.cfl * std::min(adv, dx * dx * floor / (4.0 * cfg.mu)));
}

/// One SSP-RK3 step of size min(stable_dt, dt_cap).
inline SimulationState step(const SimulationState& s0, const SolverConfig& cfg,
                            double dt_cap = std::numeric_limits<double>::infinity()) {
  const double dt = std::min(stable_dt(s0, cfg), dt_cap);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericalBlowup("time step is not positive and finite");
  const Grid& g = s0.rho.grid();
  const double eps = cfg.vacuum_floor;
  int iterations = 0;

  auto project = [&](const SpectralScalar& rho, const SpectralVector& m_star, std::vector<double>& rho_p,
                     std::vector<double>& w, SpectralScalar& Q) {
    rho_p = rho.to_physical();
    w = detail::inverse_density(rho_p, eps);
    PressureStats st;
    Q = detail::pressure_solve_weights(w, m_star, cfg.pressure_tol, cfg.pressure_max_iter, &st);
    iterations += st.iterations;
    return m_star - gradient(Q);
  };

  // Stage 0
  const auto& rho0 = s0.rho;
  const auto& m0 = s0.momentum;
  auto rho0_p = rho0.to_physical();
  auto w0 = detail::inverse_density(rho0_p, eps);
  const auto L0 = detail::stage_rates(rho0, s0.v, cfg.mu);

  std::vector<double> rho1_p, w1, rho2_p, w2, rho3_p, w3;
  SpectralScalar Q(g);
  const SpectralScalar rho1 = rho0 + dt * L0.rho_t;
  const SpectralVector m1 = project(rho1, m0 + dt * L0.m_t, rho1_p, w1, Q);
  const SpectralVector v1 = detail::velocity_from_momentum(m1, w1);
  const auto L1 = detail::stage_rates(rho1, v1, cfg.mu);

  const SpectralScalar rho2 = 0.75 * rho0 + 0.25 * (rho1 + dt * L1.rho_t);
  const SpectralVector m2 = project(rho2, 0.75 * m0 + 0.25 * (m1 + dt * L1.m_t), rho2_p, w2, Q);
  const SpectralVector v2 = detail::velocity_from_momentum(m2, w2);
  const auto L2 = detail::stage_rates(rho2, v2, cfg.mu);

  SpectralScalar rho3 = (1.0 / 3.0) * rho0 + (2.0 / 3.0) * (rho2 + dt * L2.rho_t);
  const SpectralVector m3 = project(rho3, (1.0 / 3.0) * m0 + (2.0 / 3.0) * (m2 + dt * L2.m_t), rho3_p, w3, Q);

  if (!detail::all_finite(rho3) || !detail::all_finite(m3[0]) || !detail::all_finite(m3[1])) {
    throw NumericalBlowup("non-finite field at t = " + std::to_string(s0.t + dt));
  }

  SimulationState s1(g);
  s1.t = s0.t + dt;
  s1.last_dt = dt;
  s1.last_pressure_iterations = iterations;
  s1.history = s0.history;

  // Undershoots below zero are clipped; the added mass is reported.
  double clipped = 0.0;
  for (double& v : rho3_p) {
    if (v < 0.0) {
      clipped -= v;
      v = 0.0;
    }
  }
  if (clipped > 0.0) {
    rho3 = SpectralScalar::from_physical(g, rho3_p);
    w3 = detail::inverse_density(rho3_p, eps);
  }
  s1.last_clipped_mass = clipped * g.cell_area();
  s1.history.clipped_mass += s1.last_clipped_mass;
  s1.rho = rho3;
  s1.momentum = m3;
  s1.v = detail::velocity_from_momentum(m3, w3);
  s1.p_field = (1.5 / dt) * Q;
  s1.p_field.set_coeff(0, 0, 0.0);

  // Stage accelerations d(rho v)/dt after projection.
  const SpectralVector a0 = (1.0 / dt) * (m1 - m0);
  const SpectralVector a1 = (4.0 / dt) * (m2 - 0.75 * m0 - 0.25 * m1);
  const SpectralVector a2 = (1.5 / dt) * (m3 - (1.0 / 3.0) * m0 - (2.0 / 3.0) * m2);
  const double acc0 = detail::weighted_accel_squared(a0, L0.rho_t, s0.v, rho0_p, w0);
  const double acc1 = detail::weighted_accel_squared(a1, L1.rho_t, v1, rho1_p, w1);
  SpectralVector v_t(g);
  const double acc2 = detail::weighted_accel_squared(a2, L2.rho_t, v2, rho2_p, w2, &v_t);
  s1.v_t = v_t;

  // Stage times t, t + dt, t + dt/2 carry the weights 1/6, 1/6, 2/3.
  auto simpson = [dt](double g0, double g1, double g2) { return dt * (g0 / 6.0 + g1 / 6.0 + 2.0 * g2 / 3.0); };
  s1.history.dissipation += cfg.mu * simpson(detail::grad_l2_squared(s0.v), detail::grad_l2_squared(v1),
                                             detail::grad_l2_squared(v2));
  s1.history.half_accel += 0.5 * simpson(acc0, acc1, acc2);
  s1.history.hess_lr += simpson(detail::hessian_lr_squared(s0.v, cfg.hess_r), detail::hessian_lr_squared(v1, cfg.hess_r),
                                detail::hessian_lr_squared(v2, cfg.hess_r));
  return s1;
}

/// Monitored quantities of a state; time integrals come from its history.
inline DiagnosticsRecord diagnostics(const SimulationState& s, const SolverConfig& cfg) {
  const Grid& g = s.rho.grid();
  DiagnosticsRecord d;
  d.t = s.t;
  d.mass = s.rho.mean() * kTwoPi * kTwoPi;
  const auto r = s.rho.to_physical();
  std::vector<double> v1, v2;
  detail::to_physical_pair(s.v[0], s.v[1], v1, v2);
  double mx = 0.0, my = 0.0, ke = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    mx += r[i] * v1[i];
    my += r[i] * v2[i];
    ke += r[i] * (v1[i] * v1[i] + v2[i] * v2[i]);
  }
  d.momentum = {mx * g.cell_area(), my * g.cell_area()};
  d.kinetic_energy = 0.5 * ke * g.cell_area();
  d.dissipation_integral = s.history.dissipation;
  d.energy_residual = std::abs(d.kinetic_energy + d.dissipation_integral - s.history.ke0);
  for (double p : cfg.diag_p_list) d.rho_lp.emplace_back(p, lp_norm_values(r, g.cell_area(), p));
  const double g2 = detail::grad_l2_squared(s.v);
  d.grad_v_l2 = std::sqrt(g2);
  d.X_t = std::numbers::e + g2 + s.history.half_accel;
  double accel = 0.0;
  {
    std::vector<double> a, b;
    detail::to_physical_pair(s.v_t[0], s.v_t[1], a, b);
    for (std::size_t i = 0; i < r.size(); ++i) accel += std::max(r[i], 0.0) * (a[i] * a[i] + b[i] * b[i]);
    accel *= g.cell_area();
  }
  d.weighted_accel = s.t * accel;
  d.hess_lr_integral = s.history.hess_lr;
  std::vector<double> a, b, c, e;
  detail::to_physical_pair(partial(s.v[0], 0), partial(s.v[0], 1), a, b);
  detail::to_physical_pair(partial(s.v[1], 0), partial(s.v[1], 1), c, e);
  for (std::size_t i = 0; i < a.size(); ++i) {
    d.grad_v_linf = std::max(d.grad_v_linf, std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i] + e[i] * e[i]));
  }
  d.clipped_mass = s.history.clipped_mass;
  return d;
}

enum class FailureKind { none, blowup, solver_failure };

struct RunResult {
  explicit RunResult(SimulationState s) : final_state(std::move(s)) {}

  std::vector<DiagnosticsRecord> records;
  SimulationState final_state;
  FailureKind failure = FailureKind::none;
  std::string failure_message;
  long steps = 0;
  long pressure_iterations = 0;

  bool ok() const { return failure == FailureKind::none; }
};

/// Steps from t = 0 to cfg.t_end, recording diagnostics at t = 0 and at every
/// output time (every step when output_interval is 0). Step sizes are
/// shortened to land on output times and on t_end. Blow-up and pressure
/// failures stop the run and are reported with the records gathered so far.
inline RunResult run(const SolverConfig& cfg, const SpectralScalar& rho0, const SpectralVector& v0,
                     const std::function<void(const DiagnosticsRecord&)>& on_record = {}) {
  RunResult out(initial_state(rho0, v0, cfg));
  auto emit = [&](const SimulationState& s) {
    out.records.push_back(diagnostics(s, cfg));
    if (on_record) on_record(out.records.back());
  };
  emit(out.final_state);
  const double T = cfg.t_end;
  long k_out = 1;
  try {
    while (out.final_state.t < T) {
      if (out.steps >= cfg.max_steps) throw NumericalBlowup("step budget exhausted before t_end");
      const double t = out.final_state.t;
      double next = T;
      if (cfg.output_interval > 0.0) next = std::min(T, k_out * cfg.output_interval);
      double cap = next - t;
      auto s1 = step(out.final_state, cfg, cap);
      ++out.steps;
      out.pressure_iterations += s1.last_pressure_iterations;
      const bool landed = s1.last_dt >= cap * (1.0 - 1e-12);
      if (landed) s1.t = next;
      out.final_state = std::move(s1);
      if (cfg.output_interval == 0.0 || landed) {
        emit(out.final_state);
        if (landed && cfg.output_interval > 0.0) ++k_out;
      }
    }
  } catch (const NumericalBlowup& e) {
    out.failure = FailureKind::blowup;
    out.failure_message = e.what();
  } catch (const SolverFailure& e) {
    out.failure = FailureKind::solver_failure;
    out.failure_message = e.what();
  }
  return out;
}

struct TruncationRun {
  double k;
  RunResult result;
};

struct TruncationStudy {
  std::vector<TruncationRun> runs;
  std::vector<double> distances;  // ||v^{k_{i+1}} - v^{k_i}||_2 at t_end (NaN if either run failed)
};

/// Runs with min(rho0, k) for each k and compares final velocities of
/// consecutive levels. Runs are independent and use up to `threads` workers.
inline TruncationStudy truncation_study(const SolverConfig& cfg, const SpectralScalar& rho0, const SpectralVector& v0,
                                        const std::vector<double>& k_list, int threads = 1) {
  if (k_list.empty()) throw InvalidArgument("k_list must not be empty");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (!(k_list[i] > 0.0)) throw InvalidArgument("truncation levels must be positive");
    if (i > 0 && !(k_list[i] > k_list[i - 1])) throw InvalidArgument("k_list must be increasing");
  }
  cfg.validate();
  std::vector<std::optional<RunResult>> results(k_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < k_list.size(); i = next++) {
      results[i].emplace(run(cfg, truncate_density(rho0, k_list[i]), v0));
    }
  };
  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(k_list.size())));
  std::vector<std::future<void>> pool;
  for (int i = 1; i < n_workers; ++i) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();
  TruncationStudy study;
  for (std::size_t i = 0; i < k_list.size(); ++i) study.runs.push_back({k_list[i], std::move(*results[i])});
  for (std::size_t i = 0; i + 1 < study.runs.size(); ++i) {
    const auto& a = study.runs[i].result;
    const auto& b = study.runs[i + 1].result;
    study.distances.push_back(a.ok() && b.ok() ? (b.final_state.v - a.final_state.v).l2_norm()
                                               : std::numeric_limits<double>::quiet_NaN());
  }
  return study;
}

}  // namespace roughflow
