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

// Periodic fields on the torus [0, 2pi)^2 stored as Fourier coefficients.
//
// Convention: f(x) = sum_k c_k exp(i k.x) with integer wavevectors k, so that
// c_k = n^-2 sum_j f(x_j) exp(-i k.x_j). The analytic literature usually works
// on the unit torus with phases exp(2 i pi k.x); the two differ by a rescaling
// of lengths, which moves constants but never exponents.
//
// Storage is row-major with x1 along the fast index: idx = i2 * n + i1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "roughflow/errors.hpp"
#include "roughflow/fft.hpp"

namespace roughflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Complex = std::complex<double>;

/// Uniform n x n grid on [0, 2pi)^2.
class Grid {
 public:
  explicit Grid(int n) : n_(n) {
    if (n < 8 || (n & (n - 1)) != 0) {
      throw InvalidArgument("grid size must be a power of two >= 8, got " + std::to_string(n));
    }
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  double side_length() const noexcept { return kTwoPi; }
  double spacing() const noexcept { return kTwoPi / n_; }
  double cell_area() const noexcept { return spacing() * spacing(); }
  double coordinate(int j) const noexcept { return spacing() * j; }

  /// Signed wavenumber of FFT index i, in (-n/2, n/2].
  int wavenumber(int i) const noexcept { return i <= n_ / 2 ? i : i - n_; }

  /// Wavenumber used by first derivatives: the Nyquist mode has no
  /// well-defined odd derivative and is mapped to zero.
  int derivative_wavenumber(int i) const noexcept {
    const int k = wavenumber(i);
    return k == n_ / 2 ? 0 : k;
  }

  /// FFT index of signed wavenumber k (taken modulo n).
  int index_of(int k) const noexcept { return ((k % n_) + n_) % n_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
};

/// Real-valued periodic scalar field held by its Fourier coefficients.
class SpectralScalar {
 public:
  explicit SpectralScalar(Grid grid) : grid_(grid), coeffs_(grid.size()) {}

  SpectralScalar(Grid grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) throw InvalidArgument("coefficient array does not match grid");
  }

  static SpectralScalar from_physical(Grid grid, std::span<const double> values) {
    if (values.size() != grid.size()) throw InvalidArgument("physical array does not match grid");
    std::vector<Complex> in(values.begin(), values.end());
    SpectralScalar out(grid);
    detail::fft_plan(grid.n()).forward(in, out.coeffs_);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& c : out.coeffs_) c *= scale;
    return out;
  }

  /// Samples f(x1, x2) at the grid nodes.
  template <class F>
  static SpectralScalar from_function(Grid grid, F&& f) {
    std::vector<double> values(grid.size());
    const int n = grid.n();
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        values[static_cast<std::size_t>(i2) * n + i1] = f(grid.coordinate(i1), grid.coordinate(i2));
      }
    }
    return from_physical(grid, values);
  }

  static SpectralScalar constant(Grid grid, double value) {
    SpectralScalar out(grid);
    out.coeffs_[0] = value;
    return out;
  }

  std::vector<Complex> to_physical_complex() const {
    std::vector<Complex> out(grid_.size());
    detail::fft_plan(grid_.n()).backward(coeffs_, out);
    return out;
  }

  std::vector<double> to_physical() const {
    const auto z = to_physical_complex();
    std::vector<double> out(z.size());
    std::transform(z.begin(), z.end(), out.begin(), [](Complex c) { return c.real(); });
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }

  Complex coeff(int k1, int k2) const { return coeffs_[flat(k1, k2)]; }
  void set_coeff(int k1, int k2, Complex value) { coeffs_[flat(k1, k2)] = value; }

  /// Spatial average.
  double mean() const noexcept { return coeffs_[0].real(); }

  /// L2 norm on the torus via Parseval: (2pi)^2 sum |c_k|^2.
  double l2_norm() const noexcept {
    double sum = 0.0;
    for (const auto& c : coeffs_) sum += std::norm(c);
    return kTwoPi * std::sqrt(sum);
  }

  double max_abs_coeff() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  SpectralScalar& operator+=(const SpectralScalar& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralScalar& operator-=(const SpectralScalar& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralScalar& operator*=(double s) noexcept {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  friend SpectralScalar operator+(SpectralScalar a, const SpectralScalar& b) { return a += b; }
  friend SpectralScalar operator-(SpectralScalar a, const SpectralScalar& b) { return a -= b; }
  friend SpectralScalar operator*(double s, SpectralScalar a) { return a *= s; }
  friend SpectralScalar operator*(SpectralScalar a, double s) { return a *= s; }

 private:
  std::size_t flat(int k1, int k2) const {
    return static_cast<std::size_t>(grid_.index_of(k2)) * grid_.n() + grid_.index_of(k1);
  }
  void check_same_grid(const SpectralScalar& o) const {
    if (!(grid_ == o.grid_)) throw InvalidArgument("fields live on different grids");
  }

  Grid grid_;
  std::vector<Complex> coeffs_;
};

namespace detail {

// Two real fields through one complex transform: the inverse transform of
// A + iB is a + ib when A and B are Hermitian.
inline void to_physical_pair(const SpectralScalar& a, const SpectralScalar& b, std::vector<double>& pa,
                             std::vector<double>& pb) {
  const std::size_t size = a.grid().size();
  std::vector<Complex> z(size), out(size);
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  for (std::size_t i = 0; i < size; ++i) z[i] = ca[i] + Complex(0.0, 1.0) * cb[i];
  fft_plan(a.grid().n()).backward(z, out);
  pa.resize(size);
  pb.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    pa[i] = out[i].real();
    pb[i] = out[i].imag();
  }
}

// Forward transform of a + ib, split with A(k) = (Z(k) + conj Z(-k)) / 2 and
// B(k) = (Z(k) - conj Z(-k)) / 2i.
inline void from_physical_pair(std::span<const double> pa, std::span<const double> pb, SpectralScalar& a,
                               SpectralScalar& b) {
  const Grid& g = a.grid();
  const int n = g.n();
  const std::size_t size = g.size();
  std::vector<Complex> z(size), out(size);
  for (std::size_t i = 0; i < size; ++i) z[i] = Complex(pa[i], pb[i]);
  fft_plan(n).forward(z, out);
  const double scale = 0.5 / static_cast<double>(size);
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  for (int i2 = 0; i2 < n; ++i2) {
    const int j2 = (n - i2) % n;
    for (int i1 = 0; i1 < n; ++i1) {
      const std::size_t i = static_cast<std::size_t>(i2) * n + i1;
      const Complex zk = out[i];
      const Complex zm = std::conj(out[static_cast<std::size_t>(j2) * n + (n - i1) % n]);
      ca[i] = (zk + zm) * scale;
      cb[i] = (zk - zm) * Complex(0.0, -scale);
    }
  }
}

}  // namespace detail

/// Pair of scalar components sharing one grid.
class SpectralVector {
 public:
  explicit SpectralVector(Grid grid) : components_{SpectralScalar(grid), SpectralScalar(grid)} {}

  SpectralVector(SpectralScalar c1, SpectralScalar c2, bool solenoidal = false)
      : components_{std::move(c1), std::move(c2)}, solenoidal_(solenoidal) {
    if (!(components_[0].grid() == components_[1].grid())) {
      throw InvalidArgument("vector components live on different grids");
    }
  }

  const Grid& grid() const noexcept { return components_[0].grid(); }
  const SpectralScalar& operator[](int j) const { return components_[j]; }
  SpectralScalar& operator[](int j) {
    solenoidal_ = false;
    return components_[j];
  }

  /// Set by leray_project; cleared by any mutable component access.
  bool flagged_solenoidal() const noexcept { return solenoidal_; }
  void flag_solenoidal(bool value) noexcept { solenoidal_ = value; }

  double l2_norm() const noexcept {
    return std::hypot(components_[0].l2_norm(), components_[1].l2_norm());
  }

  SpectralVector& operator+=(const SpectralVector& o) {
    components_[0] += o.components_[0];
    components_[1] += o.components_[1];
    solenoidal_ = solenoidal_ && o.solenoidal_;
    return *this;
  }
  SpectralVector& operator-=(const SpectralVector& o) {
    components_[0] -= o.components_[0];
    components_[1] -= o.components_[1];
    solenoidal_ = solenoidal_ && o.solenoidal_;
    return *this;
  }
  SpectralVector& operator*=(double s) noexcept {
    components_[0] *= s;
    components_[1] *= s;
    return *this;
  }
  friend SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
  friend SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
  friend SpectralVector operator*(double s, SpectralVector a) { return a *= s; }

 private:
  std::array<SpectralScalar, 2> components_;
  bool solenoidal_ = false;
};

/// Mean, low band (1 <= |k| <= n_split) and high band (|k| > n_split).
struct FrequencySplit {
  double mean = 0.0;
  SpectralScalar low;
  SpectralScalar high;
  int n_split = 1;
};

namespace detail {

// Visits every mode with (flat index, k1, k2).
template <class F>
void for_each_mode(const Grid& grid, F&& f) {
  const int n = grid.n();
  for (int i2 = 0; i2 < n; ++i2) {
    const int k2 = grid.wavenumber(i2);
    for (int i1 = 0; i1 < n; ++i1) {
      f(static_cast<std::size_t>(i2) * n + i1, grid.wavenumber(i1), k2);
    }
  }
}

// Same, with the derivative wavenumbers (Nyquist zeroed).
template <class F>
void for_each_derivative_mode(const Grid& grid, F&& f) {
  const int n = grid.n();
  for (int i2 = 0; i2 < n; ++i2) {
    const int k2 = grid.derivative_wavenumber(i2);
    for (int i1 = 0; i1 < n; ++i1) {
      f(static_cast<std::size_t>(i2) * n + i1, grid.derivative_wavenumber(i1), k2);
    }
  }
}

}  // namespace detail

/// Spectral derivative along axis (0 for x1, 1 for x2).
inline SpectralScalar partial(const SpectralScalar& f, int axis) {
  SpectralScalar out(f.grid());
  auto src = f.coeffs();
  auto dst = out.coeffs();
  detail::for_each_derivative_mode(f.grid(), [&](std::size_t i, int k1, int k2) {
    dst[i] = Complex(0.0, axis == 0 ? k1 : k2) * src[i];
  });
  return out;
}

inline SpectralVector gradient(const SpectralScalar& f) {
  return SpectralVector(partial(f, 0), partial(f, 1));
}

inline SpectralScalar divergence(const SpectralVector& u) {
  SpectralScalar out(u.grid());
  auto a = u[0].coeffs();
  auto b = u[1].coeffs();
  auto dst = out.coeffs();
  detail::for_each_derivative_mode(u.grid(), [&](std::size_t i, int k1, int k2) {
    dst[i] = Complex(0.0, 1.0) * (static_cast<double>(k1) * a[i] + static_cast<double>(k2) * b[i]);
  });
  return out;
}

/// -|k|^2 multiplier, Nyquist included (second derivatives are even).
inline SpectralScalar laplacian(const SpectralScalar& f) {
  SpectralScalar out(f.grid());
  auto src = f.coeffs();
  auto dst = out.coeffs();
  detail::for_each_mode(f.grid(), [&](std::size_t i, int k1, int k2) {
    dst[i] = -static_cast<double>(k1 * k1 + k2 * k2) * src[i];
  });
  return out;
}

inline SpectralVector laplacian(const SpectralVector& u) {
  return SpectralVector(laplacian(u[0]), laplacian(u[1]), u.flagged_solenoidal());
}

/// Solves -Delta g = f for the zero-mean g (mean of f ignored).
inline SpectralScalar inverse_negative_laplacian(const SpectralScalar& f) {
  SpectralScalar out(f.grid());
  auto src = f.coeffs();
  auto dst = out.coeffs();
  detail::for_each_mode(f.grid(), [&](std::size_t i, int k1, int k2) {
    const int k2sum = k1 * k1 + k2 * k2;
    dst[i] = k2sum == 0 ? Complex{} : src[i] / static_cast<double>(k2sum);
  });
  return out;
}

/// Projection onto divergence-free fields, (I - k k^T / |k|^2) per mode with
/// the derivative wavevector, so that divergence(leray_project(u)) vanishes
/// identically. The mean mode is untouched.
inline SpectralVector leray_project(const SpectralVector& u) {
  SpectralVector out(u.grid());
  auto a = u[0].coeffs();
  auto b = u[1].coeffs();
  auto oa = out[0].coeffs();
  auto ob = out[1].coeffs();
  detail::for_each_derivative_mode(u.grid(), [&](std::size_t i, int k1, int k2) {
    const double kk = static_cast<double>(k1 * k1 + k2 * k2);
    if (kk == 0.0) {
      oa[i] = a[i];
      ob[i] = b[i];
      return;
    }
    const Complex kdotu = static_cast<double>(k1) * a[i] + static_cast<double>(k2) * b[i];
    oa[i] = a[i] - static_cast<double>(k1) * kdotu / kk;
    ob[i] = b[i] - static_cast<double>(k2) * kdotu / kk;
  });
  out.flag_solenoidal(true);
  return out;
}

/// 2/3-rule truncation: zero every mode with max(|k1|, |k2|) > n/3.
inline SpectralScalar dealias(const SpectralScalar& f) {
  SpectralScalar out = f;
  auto dst = out.coeffs();
  const int n = f.grid().n();
  detail::for_each_mode(f.grid(), [&](std::size_t i, int k1, int k2) {
    if (3 * std::max(std::abs(k1), std::abs(k2)) > n) dst[i] = Complex{};
  });
  return out;
}

inline SpectralVector dealias(const SpectralVector& u) {
  return SpectralVector(dealias(u[0]), dealias(u[1]), u.flagged_solenoidal());
}

/// Pointwise product evaluated on the grid (aliased).
inline SpectralScalar multiply(const SpectralScalar& a, const SpectralScalar& b) {
  const auto pa = a.to_physical();
  auto pb = b.to_physical();
  for (std::size_t i = 0; i < pa.size(); ++i) pb[i] *= pa[i];
  return SpectralScalar::from_physical(a.grid(), pb);
}

/// Product with both factors and the result truncated by the 2/3 rule.
inline SpectralScalar dealiased_product(const SpectralScalar& a, const SpectralScalar& b) {
  return dealias(multiply(dealias(a), dealias(b)));
}

/// max_k |k.u(k)| / max_k |u(k)|, zero for the zero field.
inline double divergence_ratio(const SpectralVector& u) {
  double num = 0.0;
  auto a = u[0].coeffs();
  auto b = u[1].coeffs();
  detail::for_each_derivative_mode(u.grid(), [&](std::size_t i, int k1, int k2) {
    num = std::max(num, std::abs(static_cast<double>(k1) * a[i] + static_cast<double>(k2) * b[i]));
  });
  const double den = std::max(u[0].max_abs_coeff(), u[1].max_abs_coeff());
  return den == 0.0 ? 0.0 : num / den;
}

/// max |c(-k) - conj(c(k))| over all modes.
inline double hermitian_defect(const SpectralScalar& f) {
  double worst = 0.0;
  const Grid& g = f.grid();
  detail::for_each_mode(g, [&](std::size_t, int k1, int k2) {
    worst = std::max(worst, std::abs(f.coeff(-k1, -k2) - std::conj(f.coeff(k1, k2))));
  });
  return worst;
}

/// Fourier decomposition b = mean + low + high with Euclidean |k| cut at
/// n_split.
inline FrequencySplit low_high_split(const SpectralScalar& b, int n_split) {
  if (n_split < 1) throw InvalidArgument("n_split must be >= 1");
  FrequencySplit out{b.mean(), SpectralScalar(b.grid()), SpectralScalar(b.grid()), n_split};
  auto src = b.coeffs();
  auto low = out.low.coeffs();
  auto high = out.high.coeffs();
  const long cut = static_cast<long>(n_split) * n_split;
  detail::for_each_mode(b.grid(), [&](std::size_t i, int k1, int k2) {
    const long kk = static_cast<long>(k1) * k1 + static_cast<long>(k2) * k2;
    if (kk == 0) return;
    (kk <= cut ? low : high)[i] = src[i];
  });
  return out;
}

/// L2 norm by grid quadrature.
inline double l2_norm_physical(const SpectralScalar& f) {
  double sum = 0.0;
  for (double v : f.to_physical()) sum += v * v;
  return std::sqrt(sum * f.grid().cell_area());
}

/// L2 inner product of two vector fields, from coefficients.
inline double inner_product(const SpectralVector& u, const SpectralVector& w) {
  double sum = 0.0;
  for (int j = 0; j < 2; ++j) {
    auto a = u[j].coeffs();
    auto b = w[j].coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) sum += (std::conj(a[i]) * b[i]).real();
  }
  return sum * kTwoPi * kTwoPi;
}

}  // namespace roughflow
