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

// L^p norms along p, and numerical evidence for membership of a density in
// the classes
//
//   L   : (1 / log p) ||f||_p^2 log(1 + ||f||_p) -> 0,
//   Y_0 : ||f||_p / p -> 0,
//   L^exp: int (exp(|f| / beta) - 1) < inf for some beta > 0.
//
// Limits p -> inf are replaced by trends on a finite p grid. Verdicts are
// reporting conventions, never proofs of membership.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughflow/errors.hpp"
#include "roughflow/quadrature.hpp"
#include "roughflow/spectral_field.hpp"

namespace roughflow {

enum class CurveSource { grid_field, radial_profile };

/// Sampled p -> ||f||_p.
struct LpNormCurve {
  std::vector<double> p_values;
  std::vector<double> norms;
  CurveSource source = CurveSource::grid_field;

  /// Largest relative excess of ||f||_{p2} over the Hoelder interpolation
  /// bound ||f||_{p1}^theta ||f||_{p3}^(1-theta), over all triples.
  double log_convexity_defect() const {
    double worst = 0.0;
    const std::size_t m = p_values.size();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) {
          const double a = 1.0 / p_values[i], b = 1.0 / p_values[j], c = 1.0 / p_values[k];
          const double theta = (b - c) / (a - c);
          if (norms[j] == 0.0) continue;
          const double log_bound = theta * std::log(norms[i]) + (1.0 - theta) * std::log(norms[k]);
          worst = std::max(worst, std::log(norms[j]) - log_bound);
        }
      }
    }
    return std::expm1(worst);
  }
};

/// Geometric grid of `count` exponents from p_min to p_max.
inline std::vector<double> geometric_grid(double p_min, double p_max, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double r = std::log(p_max / p_min) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = p_min * std::exp(r * i);
  out.front() = p_min;
  out.back() = p_max;
  return out;
}

/// 40 points from 1.25 to 1e4.
inline std::vector<double> default_p_grid() { return geometric_grid(1.25, 1e4, 40); }

/// (sum |f_i|^p cell_area)^(1/p), max-factored so that large p cannot
/// overflow. p = inf gives the grid maximum.
inline double lp_norm_values(std::span<const double> values, double cell_area, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p norm needs p >= 1");
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  if (std::isinf(p)) return peak;
  double sum = 0.0;
  for (double v : values) {
    const double r = std::abs(v) / peak;
    if (r > 0.0) sum += std::exp(p * std::log(r));
  }
  return peak * std::exp((std::log(sum) + std::log(cell_area)) / p);
}

inline double lp_norm_grid(const SpectralScalar& f, double p) {
  const auto values = f.to_physical();
  return lp_norm_values(values, f.grid().cell_area(), p);
}

inline LpNormCurve lp_curve_grid(const SpectralScalar& f, std::vector<double> p_values) {
  const auto values = f.to_physical();
  LpNormCurve curve{std::move(p_values), {}, CurveSource::grid_field};
  curve.norms.reserve(curve.p_values.size());
  for (double p : curve.p_values) curve.norms.push_back(lp_norm_values(values, f.grid().cell_area(), p));
  return curve;
}

/// Surface area of the unit sphere in R^d.
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

enum class ProfileKind { neg_log, log_abs_log, log_log_abs_log, custom_tabulated };

inline std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::neg_log: return "neg_log";
    case ProfileKind::log_abs_log: return "log_abs_log";
    case ProfileKind::log_log_abs_log: return "log_log_abs_log";
    case ProfileKind::custom_tabulated: return "custom_tabulated";
  }
  return "unknown";
}

inline ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "neg_log") return ProfileKind::neg_log;
  if (s == "log_abs_log") return ProfileKind::log_abs_log;
  if (s == "log_log_abs_log") return ProfileKind::log_log_abs_log;
  if (s == "custom_tabulated") return ProfileKind::custom_tabulated;
  throw InvalidArgument("unknown profile kind '" + s + "'");
}

/// Radially symmetric function on the ball B(0, support_radius) in R^d,
/// optionally capped from above:
///   neg_log          -log r              (support up to 1)
///   log_abs_log      log |log r|         (support up to e^-e by default)
///   log_log_abs_log  log log |log r|     (support up to e^-e)
///   custom_tabulated piecewise linear through (radius, value) nodes
struct RadialProfile {
  ProfileKind kind = ProfileKind::neg_log;
  int dim = 2;
  double support_radius = 1.0;
  double cap = std::numeric_limits<double>::infinity();
  std::vector<double> table_radius;  // custom_tabulated only, increasing from 0
  std::vector<double> table_value;

  static RadialProfile make(ProfileKind kind, int dim) {
    RadialProfile p;
    p.kind = kind;
    p.dim = dim;
    p.support_radius = natural_support(kind);
    p.validate();
    return p;
  }

  static RadialProfile tabulated(int dim, std::vector<double> radius, std::vector<double> value) {
    RadialProfile p;
    p.kind = ProfileKind::custom_tabulated;
    p.dim = dim;
    p.table_radius = std::move(radius);
    p.table_value = std::move(value);
    p.support_radius = p.table_radius.empty() ? 0.0 : p.table_radius.back();
    p.validate();
    return p;
  }

  /// Largest radius on which the closed-form kinds stay nonnegative.
  static double natural_support(ProfileKind kind) {
    switch (kind) {
      case ProfileKind::neg_log: return 1.0;
      case ProfileKind::log_abs_log:
      case ProfileKind::log_log_abs_log: return std::exp(-std::numbers::e);
      case ProfileKind::custom_tabulated: return 0.0;
    }
    return 0.0;
  }

  void validate() const {
    if (dim < 1) throw InvalidArgument("profile dimension must be >= 1");
    if (!(cap > 0.0)) throw InvalidArgument("profile cap must be positive");
    if (kind == ProfileKind::custom_tabulated) {
      if (table_radius.size() < 2 || table_radius.size() != table_value.size()) {
        throw InvalidArgument("tabulated profile needs >= 2 matching (radius, value) nodes");
      }
      if (table_radius.front() != 0.0) throw InvalidArgument("tabulated profile must start at radius 0");
      for (std::size_t i = 1; i < table_radius.size(); ++i) {
        if (!(table_radius[i] > table_radius[i - 1])) throw InvalidArgument("tabulated radii must increase");
      }
      for (double v : table_value) {
        if (!(v >= 0.0)) throw InvalidArgument("profile must be nonnegative");
      }
      return;
    }
    if (!(support_radius > 0.0) || support_radius > natural_support(kind) * (1.0 + 1e-15)) {
      throw InvalidArgument("support radius outside the range where the profile is nonnegative");
    }
  }

  /// Uncapped value at radius r (zero outside the support).
  double raw(double r) const {
    if (!(r < support_radius)) return 0.0;
    switch (kind) {
      case ProfileKind::neg_log: return -std::log(r);
      case ProfileKind::log_abs_log: return std::log(-std::log(r));
      case ProfileKind::log_log_abs_log: return std::log(std::log(-std::log(r)));
      case ProfileKind::custom_tabulated: {
        auto it = std::upper_bound(table_radius.begin(), table_radius.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - table_radius.begin());
        if (i == 0) return table_value.front();
        if (i >= table_radius.size()) return table_value.back();
        const double w = (r - table_radius[i - 1]) / (table_radius[i] - table_radius[i - 1]);
        return (1.0 - w) * table_value[i - 1] + w * table_value[i];
      }
    }
    return 0.0;
  }

  double operator()(double r) const { return std::min(raw(r), cap); }
};

namespace detail {

// Parametrization of the singular kinds by t, with s = -log r:
//   neg_log: s = t, f = t;  log_abs_log: s = e^t, f = t;
//   log_log_abs_log: s = e^t, f = log t.
struct ProfileChart {
  double t0;           // t at r = support_radius
  bool exponential;    // s = e^t (else s = t)
  double cap_t;        // t where f reaches the cap (inf if never)
  double (*value)(double t);
};

inline ProfileChart chart_of(const RadialProfile& pr) {
  const double s0 = -std::log(pr.support_radius);
  switch (pr.kind) {
    case ProfileKind::neg_log:
      return {s0, false, pr.cap, [](double t) { return t; }};
    case ProfileKind::log_abs_log:
      return {std::log(s0), true, pr.cap, [](double t) { return t; }};
    case ProfileKind::log_log_abs_log:
      return {std::log(s0), true, std::isinf(pr.cap) ? pr.cap : std::exp(pr.cap),
              [](double t) { return t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity(); }};
    default: break;
  }
  throw InvalidArgument("profile has no closed-form chart");
}

// log of int_B |f|^p over the ball.
inline LogIntegralResult log_power_integral(const RadialProfile& pr, double p) {
  const double d = pr.dim;
  const double log_cd = std::log(unit_sphere_area(pr.dim));
  if (pr.kind == ProfileKind::custom_tabulated) {
    double peak = 0.0;
    for (double v : pr.table_value) peak = std::max(peak, std::min(v, pr.cap));
    if (peak == 0.0) return {};
    auto g = [&](double r) {
      const double v = pr(r) / peak;
      return v > 0.0 ? std::pow(r, d - 1.0) * std::exp(p * std::log(v)) : 0.0;
    };
    const auto res = integrate(g, pr.table_radius, {1e-13, 0.0, 20000});
    if (!res.converged) throw NumericalError("tabulated profile quadrature did not converge", res.error);
    return {log_cd + p * std::log(peak) + std::log(res.value), res.error / res.value, 0.0};
  }
  const ProfileChart ch = chart_of(pr);
  auto phi = [&, ch](double t) {
    const double s = ch.exponential ? std::exp(t) : t;
    const double f = std::min(ch.value(t), pr.cap);
    if (!(f > 0.0)) return -std::numeric_limits<double>::infinity();
    return log_cd - d * s + (ch.exponential ? t : 0.0) + p * std::log(f);
  };
  std::vector<double> kinks;
  if (std::isfinite(ch.cap_t)) kinks.push_back(ch.cap_t);
  return log_integral_unimodal(phi, ch.t0, kinks);
}

}  // namespace detail

/// ||profile||_p on the ball, by adaptive quadrature after r = exp(-s)
/// (and s = exp(u) for the iterated-log kinds). Relative target 1e-9.
inline double lp_norm_radial(const RadialProfile& profile, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p norm needs p >= 1");
  profile.validate();
  const auto r = detail::log_power_integral(profile, p);
  // A relative error e in the integral moves the norm by e / p.
  if (r.rel_error / p > 1e-9) throw NumericalError("radial L^p quadrature above target", r.rel_error / p);
  return std::exp(r.log_value / p);
}

inline LpNormCurve lp_curve_radial(const RadialProfile& profile, std::vector<double> p_values) {
  LpNormCurve curve{std::move(p_values), {}, CurveSource::radial_profile};
  curve.norms.reserve(curve.p_values.size());
  for (double p : curve.p_values) curve.norms.push_back(lp_norm_radial(profile, p));
  return curve;
}

/// ||-log|x| 1_{B(0,1)}||_p in R^d from the closed form (c_d / d^(p+1)) Gamma(p+1).
inline double exact_neg_log_norm(double p, int d) {
  if (!(p >= 1.0) || d < 1) throw InvalidArgument("exact_neg_log_norm needs p >= 1 and d >= 1");
  const double log_norm_p = std::log(unit_sphere_area(d)) - (p + 1.0) * std::log(static_cast<double>(d)) +
                            std::lgamma(p + 1.0);
  return std::exp(log_norm_p / p);
}

enum class Trend { tends_to_zero, bounded_away, inconclusive };

inline std::string to_string(Trend t) {
  switch (t) {
    case Trend::tends_to_zero: return "tends-to-zero";
    case Trend::bounded_away: return "bounded-away";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct ClassVerdicts {
  Trend in_L = Trend::inconclusive;
  Trend in_Y0 = Trend::inconclusive;
  bool in_Lexp = false;
};

struct ClassReport {
  LpNormCurve curve;
  std::vector<std::optional<double>> L_functional;  // empty where log p <= 0
  std::vector<double> Y0_functional;
  std::optional<double> lexp_beta_star;
  ClassVerdicts verdicts;
  double L_slope = 0.0;   // top-decade log-log slopes backing the verdicts
  double Y0_slope = 0.0;
};

/// Pointwise L and Y_0 functionals along the curve; no verdicts.
inline ClassReport class_functionals(const LpNormCurve& curve) {
  if (curve.p_values.size() != curve.norms.size() || curve.p_values.empty()) {
    throw InvalidArgument("malformed L^p curve");
  }
  ClassReport rep;
  rep.curve = curve;
  for (std::size_t i = 0; i < curve.p_values.size(); ++i) {
    const double p = curve.p_values[i];
    const double nrm = curve.norms[i];
    if (p > 1.0) {
      rep.L_functional.emplace_back(nrm * nrm * std::log1p(nrm) / std::log(p));
    } else {
      rep.L_functional.emplace_back(std::nullopt);
    }
    rep.Y0_functional.push_back(nrm / p);
  }
  return rep;
}

struct LexpResult {
  std::optional<double> beta_star;
  std::vector<double> betas;
  std::vector<double> integrals;  // inf where judged divergent
};

inline constexpr double kLexpCap = 1e12;

/// Smallest beta with int over the ball of (exp(profile / beta) - 1) finite.
/// The integral is truncated at t = T for T = 16, 32, ..., 2^22 in the
/// profile chart; it counts as convergent once consecutive truncations
/// agree to 1e-9 before exceeding the cap.
inline LexpResult lexp_test(const RadialProfile& profile, const std::vector<double>& betas) {
  profile.validate();
  LexpResult out;
  out.betas = betas;
  const double d = profile.dim;
  const double cd = unit_sphere_area(profile.dim);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double beta = betas[i];
    if (!(beta > 0.0) || (i > 0 && !(beta > betas[i - 1]))) {
      throw InvalidArgument("beta list must be positive and increasing");
    }
    double value = std::numeric_limits<double>::infinity();
    if (profile.kind == ProfileKind::custom_tabulated) {
      auto g = [&](double r) { return cd * std::pow(r, d - 1.0) * std::expm1(profile(r) / beta); };
      const auto res = integrate(g, profile.table_radius);
      if (res.value < kLexpCap) value = res.value;
    } else {
      const auto ch = detail::chart_of(profile);
      auto g = [&, ch](double t) {
        const double s = ch.exponential ? std::exp(t) : t;
        const double f = std::min(ch.value(t), profile.cap);
        if (!(f > 0.0)) return 0.0;
        const double log_w = std::log(cd) - d * s + (ch.exponential ? t : 0.0);
        const double e = f / beta;
        // exp(log_w) * expm1(e), in the log domain when e is large
        return e > 30.0 ? std::exp(log_w + e) : std::exp(log_w) * std::expm1(e);
      };
      double prev = 0.0;
      double upper = ch.t0 + 16.0;
      std::vector<double> bp{ch.t0};
      if (std::isfinite(ch.cap_t) && ch.cap_t > ch.t0) bp.push_back(ch.cap_t);
      for (int j = 0; j < 19; ++j) {
        std::vector<double> pts;
        for (double b : bp) {
          if (b < upper) pts.push_back(b);
        }
        const double lo = pts.back();
        const int pieces = 16;
        for (int k = 1; k <= pieces; ++k) pts.push_back(lo + (upper - lo) * k / pieces);
        QuadratureResult res;
        try {
          res = integrate(g, pts, {1e-12, 0.0, 8000});
        } catch (const NumericalError&) {
          break;  // overflow: divergent
        }
        if (!(res.value < kLexpCap)) break;
        if (j > 0 && std::abs(res.value - prev) <= 1e-9 * std::abs(res.value)) {
          value = res.value;
          break;
        }
        prev = res.value;
        upper = ch.t0 + 2.0 * (upper - ch.t0);
      }
    }
    out.integrals.push_back(value);
    if (std::isfinite(value) && !out.beta_star) out.beta_star = beta;
  }
  return out;
}

/// Grid version: sum over cells of (exp(|f| / beta) - 1) * cell_area.
inline LexpResult lexp_test(const SpectralScalar& field, const std::vector<double>& betas) {
  LexpResult out;
  out.betas = betas;
  const auto values = field.to_physical();
  const double cell = field.grid().cell_area();
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double beta = betas[i];
    if (!(beta > 0.0) || (i > 0 && !(beta > betas[i - 1]))) {
      throw InvalidArgument("beta list must be positive and increasing");
    }
    double sum = 0.0;
    for (double v : values) sum += std::expm1(std::abs(v) / beta) * cell;
    const double value = (std::isfinite(sum) && sum < kLexpCap) ? sum : std::numeric_limits<double>::infinity();
    out.integrals.push_back(value);
    if (std::isfinite(value) && !out.beta_star) out.beta_star = beta;
  }
  return out;
}

/// 41 geometric values from 0.05 to 20.
inline std::vector<double> default_beta_grid() { return geometric_grid(0.05, 20.0, 41); }

struct TrendThresholds {
  double slope = -0.05;        // slope below this: tends to zero
  double plateau_floor = 1e-12;
};

namespace detail {

// Least-squares slope of log y against log p over p in [p_max / 10, p_max].
inline double top_decade_slope(const std::vector<double>& p, const std::vector<double>& y) {
  const double p_max = p.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < p_max / 10.0 * (1.0 - 1e-12) || !(y[i] > 0.0)) continue;
    const double x = std::log(p[i]);
    const double v = std::log(y[i]);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline Trend judge(double slope, double last_value, const TrendThresholds& th) {
  if (last_value == 0.0) return Trend::tends_to_zero;
  if (std::isnan(slope)) return Trend::inconclusive;
  if (slope < th.slope) return Trend::tends_to_zero;
  if (last_value > th.plateau_floor) return Trend::bounded_away;
  return Trend::inconclusive;
}

}  // namespace detail

/// Attaches trend verdicts. Needs a p grid reaching at least 1e3.
inline ClassReport classify(ClassReport rep, const LexpResult& lexp, TrendThresholds th = {}) {
  const auto& p = rep.curve.p_values;
  if (p.empty() || p.back() < 1e3) throw InvalidArgument("classification needs a p grid reaching 1e3");
  std::vector<double> lvals;
  std::vector<double> lp;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (rep.L_functional[i]) {
      lp.push_back(p[i]);
      lvals.push_back(*rep.L_functional[i]);
    }
  }
  rep.L_slope = detail::top_decade_slope(lp, lvals);
  rep.Y0_slope = detail::top_decade_slope(p, rep.Y0_functional);
  rep.verdicts.in_L = detail::judge(rep.L_slope, lvals.back(), th);
  rep.verdicts.in_Y0 = detail::judge(rep.Y0_slope, rep.Y0_functional.back(), th);
  rep.lexp_beta_star = lexp.beta_star;
  rep.verdicts.in_Lexp = lexp.beta_star.has_value();
  return rep;
}

}  // namespace roughflow
