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

// Numerical probes of the functional inequalities behind the existence
// argument: the weighted Poincare inequality and its (alpha, beta, p, q)
// form, the logarithmic Desjardins estimate, the low/high frequency bounds
// used to prove them, and monotonicity of z log(e + A/z).
//
// Unknown constants are set to 1 on the right-hand side; each sample then
// reports the constant it would need, lhs / rhs_constant_free. An inequality
// passes numerically when the supremum over a sweep is finite and stable
// under grid refinement.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "roughflow/errors.hpp"
#include "roughflow/initial_data.hpp"
#include "roughflow/norms_and_classes.hpp"
#include "roughflow/random_fields.hpp"
#include "roughflow/spectral_field.hpp"

namespace roughflow {

struct InequalitySample {
  std::string inequality_id;
  std::vector<std::pair<std::string, double>> parameters;
  double lhs = 0.0;
  double rhs_constant_free = 0.0;
  double required_constant = 0.0;
  std::string descriptor;  // how (rho, b) were generated

  std::string parameter_string() const {
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < parameters.size(); ++i) {
      if (i) os << ';';
      os << parameters[i].first << '=' << parameters[i].second;
    }
    return os.str();
  }
};

struct ConstantFitReport {
  std::string inequality_id;
  std::size_t samples_count = 0;
  double sup_required_constant = 0.0;
  std::size_t argmax_index = 0;
  std::string argmax_descriptor;
};

namespace detail {

inline double required_constant(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

struct DensityStats {
  std::vector<double> values;
  double mass = 0.0;
  double l2 = 0.0;
  double cell = 0.0;
};

inline DensityStats density_stats(const SpectralScalar& rho, std::span<const double> values) {
  DensityStats s;
  s.values.assign(values.begin(), values.end());
  s.cell = rho.grid().cell_area();
  double top = 0.0;
  for (double v : values) top = std::max(top, std::abs(v));
  // Transform round-off leaves vacuum cells at about -1e-17.
  const double slack = 1e-12 * top;
  double sum = 0.0;
  for (double& v : s.values) {
    if (v < -slack) throw InvalidArgument("density must be nonnegative");
    v = std::max(v, 0.0);
    sum += v;
  }
  s.mass = sum * s.cell;
  if (!(s.mass > 0.0)) throw InvalidArgument("density must have positive mass");
  s.l2 = lp_norm_values(values, s.cell, 2.0);
  return s;
}

inline double weighted_integral(std::span<const double> rho, std::span<const double> b, double cell) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * b[i];
  return s * cell;
}

inline double gradient_l2(const SpectralScalar& b) {
  double s = 0.0;
  auto c = b.coeffs();
  for_each_derivative_mode(b.grid(), [&](std::size_t i, int k1, int k2) {
    s += static_cast<double>(k1 * k1 + k2 * k2) * std::norm(c[i]);
  });
  return kTwoPi * std::sqrt(s);
}

}  // namespace detail

/// ||b||_m against (1/M)|int rho b| + log^{1/2}(e + ||rho||_2 / M) ||grad b||_2.
inline InequalitySample weighted_poincare_check(const SpectralScalar& rho, const SpectralScalar& b, double m) {
  if (!(m >= 1.0) || std::isinf(m)) throw InvalidArgument("m must satisfy 1 <= m < inf");
  if (!(rho.grid() == b.grid())) throw InvalidArgument("rho and b live on different grids");
  const auto st = detail::density_stats(rho, rho.to_physical());
  const auto& r = st.values;
  const auto bv = b.to_physical();
  InequalitySample s;
  s.inequality_id = "weighted_poincare";
  s.parameters = {{"m", m}};
  s.lhs = lp_norm_values(bv, st.cell, m);
  const double avg = std::abs(detail::weighted_integral(r, bv, st.cell)) / st.mass;
  s.rhs_constant_free = avg + std::sqrt(std::log(std::numbers::e + st.l2 / st.mass)) * detail::gradient_l2(b);
  s.required_constant = detail::required_constant(s.lhs, s.rhs_constant_free);
  return s;
}

/// ||rho^alpha |b|^beta||_q against
/// ||rho||_p^alpha [ M^-beta |int rho b|^beta + log^{beta/2}(e + ||rho||_2 / M) ||grad b||_2^beta ].
inline InequalitySample poincare_alpha_beta_check(const SpectralScalar& rho, const SpectralScalar& b, double p, double q,
                                                  double alpha, double beta) {
  if (!(p >= 1.0)) throw InvalidArgument("parameters violate 1 <= p");
  if (!(alpha >= 0.0)) throw InvalidArgument("parameters violate 0 <= alpha");
  if (!(alpha < p)) throw InvalidArgument("parameters violate alpha < p");
  if (!(q >= 1.0)) throw InvalidArgument("parameters violate 1 <= q");
  if (!(alpha == 0.0 || q < p / alpha)) throw InvalidArgument("parameters violate q < p/alpha");
  const double alpha_over_p = std::isinf(p) ? 0.0 : alpha / p;
  if (!(beta >= 1.0 / q - alpha_over_p)) throw InvalidArgument("parameters violate beta >= 1/q - alpha/p");
  if (!(rho.grid() == b.grid())) throw InvalidArgument("rho and b live on different grids");
  const auto st = detail::density_stats(rho, rho.to_physical());
  const auto& r = st.values;
  const auto bv = b.to_physical();
  std::vector<double> w(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::pow(r[i], alpha) * std::pow(std::abs(bv[i]), beta);
  InequalitySample s;
  s.inequality_id = "poincare_alpha_beta";
  s.parameters = {{"p", p}, {"q", q}, {"alpha", alpha}, {"beta", beta}};
  s.lhs = lp_norm_values(w, st.cell, q);
  const double rho_p_alpha = alpha == 0.0 ? 1.0 : std::pow(lp_norm_values(r, st.cell, p), alpha);
  const double avg = std::abs(detail::weighted_integral(r, bv, st.cell)) / st.mass;
  const double grad = std::sqrt(std::log(std::numbers::e + st.l2 / st.mass)) * detail::gradient_l2(b);
  s.rhs_constant_free = rho_p_alpha * (std::pow(avg, beta) + std::pow(grad, beta));
  s.required_constant = detail::required_constant(s.lhs, s.rhs_constant_free);
  return s;
}

/// (int rho b^4)^{1/2} against
/// 2 ||sqrt(rho) b||_2 |int rho b|
///   + p/(p-1) ||sqrt(rho) b||_2 ||grad b||_2
///     log^{1/2}(e + ||rho||_2^2 / M^2 + ||rho||_p ||grad b||_2^2 / ||sqrt(rho) b||_2^2).
/// The first term keeps its explicit factor 2; the constant of the second is 1.
inline InequalitySample desjardins_check(const SpectralScalar& rho, const SpectralScalar& b, double p) {
  if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
  if (!(rho.grid() == b.grid())) throw InvalidArgument("rho and b live on different grids");
  const auto st = detail::density_stats(rho, rho.to_physical());
  const auto& r = st.values;
  const auto bv = b.to_physical();
  double b2 = 0.0, b4 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double rb2 = r[i] * bv[i] * bv[i];
    b2 += rb2;
    b4 += rb2 * bv[i] * bv[i];
  }
  b2 *= st.cell;
  b4 *= st.cell;
  InequalitySample s;
  s.inequality_id = "desjardins";
  s.parameters = {{"p", p}};
  s.lhs = std::sqrt(b4);
  if (!(b2 > 0.0)) {
    if (s.lhs > 0.0) throw NumericalError("int rho b^4 > 0 while int rho b^2 = 0", s.lhs);
    throw InvalidArgument("||sqrt(rho) b||_2 must be positive");
  }
  const double wb = std::sqrt(b2);
  const double grad = detail::gradient_l2(b);
  const double rho_p = lp_norm_values(r, st.cell, p);
  const double arg = std::numbers::e + (st.l2 * st.l2) / (st.mass * st.mass) + rho_p * grad * grad / b2;
  s.rhs_constant_free = 2.0 * wb * std::abs(detail::weighted_integral(r, bv, st.cell)) +
                        p / (p - 1.0) * wb * grad * std::sqrt(std::log(arg));
  s.required_constant = detail::required_constant(s.lhs, s.rhs_constant_free);
  return s;
}

struct FreqSplitReport {
  int n_split = 2;
  double low_ratio = 0.0;                            // ||b_n||_inf / (sqrt(log n) ||grad b||_2)
  std::vector<std::pair<double, double>> high_ratio;  // (q, ||b~_n||_q / (n^{-2/q} ||grad b||_2))
};

/// Ratios behind the low band sup bound and the high band L^q bound.
inline FreqSplitReport freq_split_bounds_check(const SpectralScalar& b, int n_split, const std::vector<double>& q_list) {
  if (n_split < 2) throw InvalidArgument("n_split must be >= 2");
  for (double q : q_list) {
    if (!(q >= 2.0) || std::isinf(q)) throw InvalidArgument("q must satisfy 2 <= q < inf");
  }
  FreqSplitReport out;
  out.n_split = n_split;
  const double grad = detail::gradient_l2(b);
  if (grad == 0.0) {
    for (double q : q_list) out.high_ratio.emplace_back(q, 0.0);
    return out;
  }
  const auto split = low_high_split(b, n_split);
  double sup = 0.0;
  for (double v : split.low.to_physical()) sup = std::max(sup, std::abs(v));
  out.low_ratio = sup / (std::sqrt(std::log(static_cast<double>(n_split))) * grad);
  const auto high = split.high.to_physical();
  for (double q : q_list) {
    const double norm = lp_norm_values(high, b.grid().cell_area(), q);
    out.high_ratio.emplace_back(q, norm / (std::pow(static_cast<double>(n_split), -2.0 / q) * grad));
  }
  return out;
}

struct MonotoneReport {
  bool monotone = true;
  std::optional<std::size_t> first_violation;  // index i with value[i] < value[i-1]
  double min_derivative = std::numeric_limits<double>::infinity();
};

/// z log(e + A/z) along an increasing grid, and its derivative
/// log(e + A/z) - (A/z) / (e + A/z) at each node.
inline MonotoneReport monotone_helper_check(double A, const std::vector<double>& z_grid) {
  if (!(A > 0.0)) throw InvalidArgument("A must be positive");
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (!(z_grid[i] > 0.0)) throw InvalidArgument("z grid must be positive");
    if (i > 0 && !(z_grid[i] > z_grid[i - 1])) throw InvalidArgument("z grid must be increasing");
  }
  MonotoneReport out;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    const double z = z_grid[i];
    const double u = A / z;
    const double value = z * std::log(std::numbers::e + u);
    if (value < prev && !out.first_violation) {
      out.monotone = false;
      out.first_violation = i;
    }
    prev = value;
    out.min_derivative = std::min(out.min_derivative, std::log(std::numbers::e + u) - u / (std::numbers::e + u));
  }
  return out;
}

inline ConstantFitReport fit_constant(const std::vector<InequalitySample>& samples) {
  if (samples.empty()) throw InvalidArgument("fit_constant needs at least one sample");
  ConstantFitReport out;
  out.inequality_id = samples.front().inequality_id;
  out.samples_count = samples.size();
  out.sup_required_constant = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].inequality_id != out.inequality_id) throw InvalidArgument("samples mix several inequalities");
    // NaN never wins; +inf does.
    if (samples[i].required_constant > out.sup_required_constant) {
      out.sup_required_constant = samples[i].required_constant;
      out.argmax_index = i;
    }
  }
  out.argmax_descriptor = samples[out.argmax_index].descriptor;
  return out;
}

// ---------------------------------------------------------------------------
// Random sweeps

struct SweepOptions {
  int grid_n = 64;
  int count = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  int b_k_max = 20;    // band of the random b; clipped to the grid
  int rho_k_max = 6;   // band of the random log-density
};

struct SweepCase {
  SpectralScalar rho;
  SpectralScalar b;
  std::string descriptor;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index * 0xBF58476D1CE4E5B9ULL + salt;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Grid-independent random field normalized to sup |g| = 1 on a fine grid.
inline SpectralScalar unit_random_field(Grid g, std::uint64_t seed, int k_max) {
  auto f = random_trig_field(g, seed, k_max, 2.0);
  // The sup is taken on a fixed reference grid so that the scaling does not
  // depend on the grid the sweep runs on.
  int n_ref = 128;
  while (2 * k_max >= n_ref) n_ref *= 2;
  const Grid ref(n_ref);
  const auto fr = random_trig_field(ref, seed, k_max, 2.0).to_physical();
  double m = 0.0;
  for (double v : fr) m = std::max(m, std::abs(v));
  f *= 1.0 / m;
  return f;
}

}  // namespace detail

/// Cell-averaged unbounded density -log(r / R) on the disc of radius R = pi/2
/// about the centre of the torus, vacuum outside. Shared by all sweeps on a
/// grid.
inline SpectralScalar singular_sweep_density(Grid g) {
  RadialDensity rho{RadialProfile::make(ProfileKind::neg_log, 2), 0.0, 1.0, 0.5 * std::numbers::pi};
  return sample_radial_density(g, rho);
}

/// The index-th random (rho, b) pair. Densities rotate through five families:
/// constant, 1 + sin(x1)/2, exp(a g), max(0, g + c) (with vacuum) and the
/// singular radial density. b = mean + amplitude * random field with
/// |c_k| ~ |k|^-2.
inline SweepCase sweep_case(Grid g, const SweepOptions& opt, std::size_t index, const SpectralScalar& singular) {
  UniformSource rng(detail::mix_seed(opt.seed, index, 1));
  const int family = static_cast<int>(index % 5);
  const int b_k = std::min(opt.b_k_max, g.n() / 2 - 1);
  const int r_k = std::min(opt.rho_k_max, g.n() / 2 - 1);
  const std::uint64_t rho_seed = detail::mix_seed(opt.seed, index, 2);
  const std::uint64_t b_seed = detail::mix_seed(opt.seed, index, 3);
  std::ostringstream d;
  SpectralScalar rho(g);
  switch (family) {
    case 0: {
      const double c = std::exp(std::log(10.0) * (2.0 * rng.next() - 1.0));
      rho = SpectralScalar::constant(g, c);
      d << "rho=const(" << detail::fmt(c) << ")";
      break;
    }
    case 1:
      rho = SpectralScalar::from_function(g, [](double x, double) { return 1.0 + 0.5 * std::sin(x); });
      d << "rho=1+sin(x1)/2";
      break;
    case 2: {
      const double a = 4.0 * rng.next();
      const auto gv = detail::unit_random_field(g, rho_seed, r_k).to_physical();
      std::vector<double> v(gv.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(a * gv[i]);
      // Kept in physical space: the sample is the grid function itself.
      rho = SpectralScalar::from_physical(g, v);
      d << "rho=exp(" << detail::fmt(a) << "*g[" << rho_seed << "])";
      break;
    }
    case 3: {
      const double c = rng.next() - 0.5;
      const auto gv = detail::unit_random_field(g, rho_seed, r_k).to_physical();
      std::vector<double> v(gv.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, gv[i] + c);
      rho = SpectralScalar::from_physical(g, v);
      d << "rho=max(0,g[" << rho_seed << "]+" << detail::fmt(c) << ")";
      break;
    }
    default: {
      const double c = std::exp(std::log(10.0) * (2.0 * rng.next() - 1.0));
      rho = c * singular;
      d << "rho=" << detail::fmt(c) << "*neglog_disc";
      break;
    }
  }
  const double amp = std::exp(std::log(10.0) * (2.0 * rng.next() - 1.0));
  const double mean = 2.0 * rng.next() - 1.0;
  SpectralScalar b = amp * detail::unit_random_field(g, b_seed, b_k);
  b.set_coeff(0, 0, mean);
  d << ";b=" << detail::fmt(mean) << "+" << detail::fmt(amp) << "*g[" << b_seed << "]";
  return {std::move(rho), std::move(b), d.str()};
}

enum class InequalityKind { weighted_poincare, poincare_alpha_beta, desjardins, freq_split_low, freq_split_high };

inline std::string to_string(InequalityKind k) {
  switch (k) {
    case InequalityKind::weighted_poincare: return "weighted_poincare";
    case InequalityKind::poincare_alpha_beta: return "poincare_alpha_beta";
    case InequalityKind::desjardins: return "desjardins";
    case InequalityKind::freq_split_low: return "freq_split_low";
    case InequalityKind::freq_split_high: return "freq_split_high";
  }
  return "?";
}

namespace detail {

inline std::vector<InequalitySample> samples_for(InequalityKind kind, const SweepCase& c, std::size_t index) {
  std::vector<InequalitySample> out;
  switch (kind) {
    case InequalityKind::weighted_poincare: {
      static constexpr double ms[] = {1.0, 2.0, 4.0, 8.0};
      out.push_back(weighted_poincare_check(c.rho, c.b, ms[index % 4]));
      break;
    }
    case InequalityKind::poincare_alpha_beta: {
      struct P { double p, q, a, b; };
      static constexpr P ps[] = {{4, 2, 1, 1}, {4, 2, 1, 1}, {8, 2, 2, 1}, {6, 1.5, 1, 2}};
      const auto& pr = ps[index % 4];
      out.push_back(poincare_alpha_beta_check(c.rho, c.b, pr.p, pr.q, pr.a, pr.b));
      break;
    }
    case InequalityKind::desjardins: {
      static constexpr double ps[] = {4.0, 8.0, 16.0};
      out.push_back(desjardins_check(c.rho, c.b, ps[index % 3]));
      break;
    }
    case InequalityKind::freq_split_low:
    case InequalityKind::freq_split_high: {
      static constexpr int ns[] = {2, 4, 8, 16};
      const int n_split = ns[index % 4];
      const auto rep = freq_split_bounds_check(c.b, n_split, {2.0, 4.0, 8.0});
      const double grad = gradient_l2(c.b);
      if (kind == InequalityKind::freq_split_low) {
        InequalitySample s;
        s.inequality_id = to_string(kind);
        s.parameters = {{"n_split", static_cast<double>(n_split)}};
        s.lhs = rep.low_ratio * std::sqrt(std::log(static_cast<double>(n_split))) * grad;
        s.rhs_constant_free = std::sqrt(std::log(static_cast<double>(n_split))) * grad;
        s.required_constant = rep.low_ratio;
        out.push_back(std::move(s));
      } else {
        for (const auto& [q, ratio] : rep.high_ratio) {
          InequalitySample s;
          s.inequality_id = to_string(kind);
          s.parameters = {{"n_split", static_cast<double>(n_split)}, {"q", q}};
          s.rhs_constant_free = std::pow(static_cast<double>(n_split), -2.0 / q) * grad;
          s.lhs = ratio * s.rhs_constant_free;
          s.required_constant = ratio;
          out.push_back(std::move(s));
        }
      }
      break;
    }
  }
  for (auto& s : out) s.descriptor = c.descriptor;
  return out;
}

}  // namespace detail

/// Samples of one inequality over opt.count random cases, in index order.
/// Cases are independent and spread over opt.threads workers; the output
/// does not depend on the thread count.
inline std::vector<InequalitySample> inequality_sweep(InequalityKind kind, const SweepOptions& opt,
                                                      const SpectralScalar* singular = nullptr) {
  if (opt.count < 1) throw InvalidArgument("sweep count must be positive");
  const Grid g(opt.grid_n);
  std::optional<SpectralScalar> own;
  if (!singular) singular = &own.emplace(singular_sweep_density(g));
  if (!(singular->grid() == g)) throw InvalidArgument("singular density lives on another grid");
  std::vector<std::vector<InequalitySample>> parts(static_cast<std::size_t>(opt.count));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < parts.size(); i = next++) {
      parts[i] = detail::samples_for(kind, sweep_case(g, opt, i, *singular), i);
    }
  };
  const int n_workers = std::max(1, std::min(opt.threads, opt.count));
  std::vector<std::future<void>> pool;
  for (int i = 1; i < n_workers; ++i) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();
  std::vector<InequalitySample> out;
  for (auto& p : parts) {
    for (auto& s : p) out.push_back(std::move(s));
  }
  return out;
}

struct SweepReport {
  std::vector<InequalitySample> samples;
  std::vector<ConstantFitReport> fits;
};

/// Every inequality over the same random cases.
inline SweepReport run_all_sweeps(const SweepOptions& opt) {
  const Grid g(opt.grid_n);
  const auto singular = singular_sweep_density(g);
  SweepReport rep;
  for (auto kind : {InequalityKind::weighted_poincare, InequalityKind::poincare_alpha_beta, InequalityKind::desjardins,
                    InequalityKind::freq_split_low, InequalityKind::freq_split_high}) {
    auto s = inequality_sweep(kind, opt, &singular);
    rep.fits.push_back(fit_constant(s));
    for (auto& x : s) rep.samples.push_back(std::move(x));
  }
  return rep;
}

}  // namespace roughflow
