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

// Globally adaptive Gauss-Kronrod (7/15) quadrature, plus a log-domain driver
// for sharply peaked unimodal integrands exp(phi(t)) whose magnitude does not
// fit in a double.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "roughflow/errors.hpp"

namespace roughflow {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  int evaluations = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_subdivisions = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * s;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * s;
  }
  kronrod *= h;
  gauss *= h;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive integral of f over the union of consecutive panels given by the
/// sorted breakpoints (at least two). Non-finite integrand values are an
/// error. The result is flagged unconverged when the subdivision budget runs
/// out before max(abs_tol, rel_tol |I|) is met.
template <class F>
QuadratureResult integrate(F&& f, const std::vector<double>& breakpoints, QuadratureOptions opt = {}) {
  if (breakpoints.size() < 2) throw InvalidArgument("integrate needs at least two breakpoints");
  int evaluations = 0;
  auto counted = [&](double x) {
    ++evaluations;
    return f(x);
  };
  std::priority_queue<detail::Panel> panels;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    auto p = detail::gauss_kronrod_15(counted, breakpoints[i], breakpoints[i + 1]);
    value += p.value;
    error += p.error;
    panels.push(p);
  }
  int splits = 0;
  while (!panels.empty() && error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (splits >= opt.max_subdivisions) break;
    auto worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    panels.pop();
    auto left = detail::gauss_kronrod_15(counted, worst.a, mid);
    auto right = detail::gauss_kronrod_15(counted, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++splits;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  if (!std::isfinite(value)) throw NumericalError("integrand produced a non-finite value", error);
  const bool ok = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value)) ||
                  error <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(value);
  return {value, error, ok, evaluations};
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, QuadratureOptions opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

/// Uniform partition of [a, b] into `pieces` panels.
inline std::vector<double> uniform_breakpoints(double a, double b, int pieces) {
  std::vector<double> out(static_cast<std::size_t>(pieces) + 1);
  for (int i = 0; i <= pieces; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / pieces;
  out.back() = b;
  return out;
}

struct LogIntegralResult {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_error = 0.0;
  double peak_location = 0.0;
};

/// log of integral over [t0, inf) of exp(phi(t)) for concave (hence unimodal)
/// phi that tends to -inf as t grows. phi may be -inf at isolated points.
/// `kinks` lists interior points where phi is not smooth.
inline LogIntegralResult log_integral_unimodal(const std::function<double(double)>& phi, double t0,
                                               std::vector<double> kinks = {}, double rel_tol = 1e-13) {
  constexpr double kDrop = 745.0;  // exp(-745) underflows
  // March outward until phi turns down, then golden-section the bracket.
  double step = 1.0;
  double lo = t0;
  double mid = t0 + step;
  double f_mid = phi(mid);
  double hi = mid + 2.0 * step;
  double f_hi = phi(hi);
  double f_lo = phi(lo);
  int guard = 0;
  while (f_hi >= f_mid || (std::isinf(f_mid) && f_mid < 0)) {
    lo = mid;
    f_lo = f_mid;
    mid = hi;
    f_mid = f_hi;
    step *= 2.0;
    hi = mid + step;
    f_hi = phi(hi);
    if (++guard > 200) throw NumericalError("peak search did not terminate", 0.0);
  }
  // If phi is already decreasing at t0 the peak sits in [t0, mid].
  if (f_lo >= f_mid) {
    hi = mid;
    mid = 0.5 * (lo + hi);
  }
  double a = lo, b = hi;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = phi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = phi(x1);
    }
  }
  double t_peak = 0.5 * (a + b);
  double phi_max = phi(t_peak);
  if (f_lo > phi_max) {  // boundary maximum
    t_peak = t0;
    phi_max = f_lo;
  }
  if (!std::isfinite(phi_max)) throw NumericalError("integrand has no finite maximum", 0.0);

  // Right end: where phi has dropped by kDrop below its maximum.
  double width = std::max(1e-3, 1e-6 * std::abs(t_peak));
  double t_end = t_peak + width;
  guard = 0;
  while (phi(t_end) > phi_max - kDrop) {
    width *= 2.0;
    t_end = t_peak + width;
    if (++guard > 200) throw NumericalError("integrand tail does not decay", 0.0);
  }
  // Left end: trim where the integrand is negligible.
  double t_start = t0;
  if (t_peak > t0) {
    double w = std::max(1e-3, 1e-6 * std::abs(t_peak));
    while (t_peak - w > t0 && phi(t_peak - w) > phi_max - kDrop) w *= 2.0;
    t_start = std::max(t0, t_peak - w);
  }

  std::vector<double> bp = uniform_breakpoints(t_start, t_end, 32);
  if (t_peak > t_start && t_peak < t_end) bp.push_back(t_peak);
  for (double k : kinks) {
    if (k > t_start && k < t_end) bp.push_back(k);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  auto shifted = [&](double t) {
    const double v = phi(t);
    return std::isfinite(v) ? std::exp(v - phi_max) : 0.0;
  };
  // phi - phi_max carries an absolute rounding error of order eps |phi_max|,
  // which caps the attainable relative accuracy of the shifted integrand.
  const double tol = std::max(rel_tol, 32.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(phi_max)));
  const auto r = integrate(shifted, bp, {tol, 0.0, 20000});
  if (!r.converged || !(r.value > 0.0)) {
    throw NumericalError("log-domain quadrature did not converge", r.value > 0 ? r.error / r.value : 1.0);
  }
  return {phi_max + std::log(r.value), r.error / r.value, t_peak};
}

}  // namespace roughflow
