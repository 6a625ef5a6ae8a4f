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
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "roughflow/inequality_lab.hpp"

namespace rf = roughflow;
using std::numbers::e;
using std::numbers::pi;

namespace {

rf::SpectralScalar wavy_density(rf::Grid g) {
  return rf::SpectralScalar::from_function(g, [](double x, double) { return 1.0 + 0.5 * std::sin(x); });
}

rf::SpectralScalar sin_x(rf::Grid g) {
  return rf::SpectralScalar::from_function(g, [](double x, double) { return std::sin(x); });
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(WeightedPoincare, ConstantFunctionNeedsTorusVolumeFactor) {
  rf::Grid g(32);
  const auto b = rf::SpectralScalar::constant(g, -1.7);
  for (double m : {1.0, 2.0, 3.5, 8.0}) {
    const auto s = rf::weighted_poincare_check(wavy_density(g), b, m);
    EXPECT_NEAR(s.lhs, 1.7 * std::pow(2.0 * pi, 2.0 / m), 1e-12);
    EXPECT_NEAR(s.rhs_constant_free, 1.7, 1e-12);
    EXPECT_NEAR(s.required_constant, std::pow(2.0 * pi, 2.0 / m), 1e-12);
  }
}

TEST(WeightedPoincare, UniformDensitySineClosedForm) {
  rf::Grid g(32);
  const auto s = rf::weighted_poincare_check(rf::SpectralScalar::constant(g, 1.0), sin_x(g), 2.0);
  EXPECT_NEAR(s.lhs, pi * std::sqrt(2.0), 1e-12);
  // ||1||_2 / M = 2 pi / (4 pi^2).
  EXPECT_NEAR(s.rhs_constant_free, std::sqrt(std::log(e + 1.0 / (2.0 * pi))) * pi * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.required_constant, 1.0 / std::sqrt(std::log(e + 1.0 / (2.0 * pi))), 1e-12);
}

TEST(WeightedPoincare, RejectsBadInput) {
  rf::Grid g(16);
  const auto b = sin_x(g);
  EXPECT_THROW(rf::weighted_poincare_check(rf::SpectralScalar(g), b, 2.0), rf::InvalidArgument);
  EXPECT_THROW(rf::weighted_poincare_check(wavy_density(g), b, 0.5), rf::InvalidArgument);
  EXPECT_THROW(rf::weighted_poincare_check(-1.0 * wavy_density(g), b, 2.0), rf::InvalidArgument);
}

TEST(PoincareAlphaBeta, DegeneratesToWeightedPoincare) {
  rf::Grid g(32);
  const auto rho = wavy_density(g);
  const auto b = rf::random_trig_field(g, 4, 10) + rf::SpectralScalar::constant(g, 0.3);
  for (double m : {1.0, 2.0, 5.0}) {
    const auto a = rf::weighted_poincare_check(rho, b, m);
    const auto c = rf::poincare_alpha_beta_check(rho, b, 7.0, m, 0.0, 1.0);
    EXPECT_NEAR(a.lhs, c.lhs, 1e-13 * a.lhs);
    EXPECT_NEAR(a.rhs_constant_free, c.rhs_constant_free, 1e-13 * a.rhs_constant_free);
  }
}

TEST(PoincareAlphaBeta, ConstantFunctionIsHolderRatio) {
  rf::Grid g(32);
  const auto rho = wavy_density(g);
  const auto b = rf::SpectralScalar::constant(g, 2.0);
  const auto r = rho.to_physical();
  struct P { double p, q, a, beta; };
  for (const P& pr : {P{4, 2, 1, 1}, P{8, 2, 2, 1}, P{6, 1.5, 1, 2}, P{3, 1, 0.5, 0.9}}) {
    const auto s = rf::poincare_alpha_beta_check(rho, b, pr.p, pr.q, pr.a, pr.beta);
    std::vector<double> ra(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) ra[i] = std::pow(r[i], pr.a);
    const double expect = rf::lp_norm_values(ra, g.cell_area(), pr.q) /
                          std::pow(rf::lp_norm_values(r, g.cell_area(), pr.p), pr.a);
    EXPECT_NEAR(s.required_constant, expect, 1e-12 * expect);
    // Holder: ||rho^a||_q <= ||rho||_p^a |T|^{1/q - a/p}.
    EXPECT_LE(s.required_constant, std::pow(4.0 * pi * pi, 1.0 / pr.q - pr.a / pr.p) * (1 + 1e-12));
  }
}

TEST(PoincareAlphaBeta, NamesTheViolatedRelation) {
  rf::Grid g(16);
  const auto rho = wavy_density(g);
  const auto b = sin_x(g);
  auto message = [&](double p, double q, double a, double beta) -> std::string {
    try {
      (void)rf::poincare_alpha_beta_check(rho, b, p, q, a, beta);
    } catch (const rf::InvalidArgument& err) {
      return err.what();
    }
    return "";
  };
  EXPECT_NE(message(4, 2, 5, 1).find("alpha < p"), std::string::npos);
  EXPECT_NE(message(4, 5, 1, 1).find("q < p/alpha"), std::string::npos);
  EXPECT_NE(message(4, 2, 1, 0.1).find("beta >= 1/q - alpha/p"), std::string::npos);
  EXPECT_NE(message(4, 0.5, 1, 1).find("1 <= q"), std::string::npos);
  EXPECT_NE(message(4, 2, -1, 1).find("0 <= alpha"), std::string::npos);
  EXPECT_EQ(message(std::numeric_limits<double>::infinity(), 3, 1, 1.0 / 3.0), "");
}

TEST(Desjardins, ConstantFunction) {
  rf::Grid g(32);
  const auto rho = wavy_density(g);
  const double M = 4.0 * pi * pi;
  const auto s = rf::desjardins_check(rho, rf::SpectralScalar::constant(g, 1.3), 4.0);
  EXPECT_NEAR(s.lhs, 1.69 * std::sqrt(M), 1e-11);
  EXPECT_NEAR(s.rhs_constant_free, 2.0 * 1.69 * std::pow(M, 1.5), 1e-9);
  EXPECT_NEAR(s.required_constant, 1.0 / (2.0 * M), 1e-14);
}

TEST(Desjardins, UniformDensitySineClosedForm) {
  rf::Grid g(32);
  for (double p : {2.0, 4.0, 16.0}) {
    const auto s = rf::desjardins_check(rf::SpectralScalar::constant(g, 1.0), sin_x(g), p);
    const double lhs = std::sqrt(1.5) * pi;
    const double rhs = p / (p - 1.0) * 2.0 * pi * pi *
                       std::sqrt(std::log(e + 1.0 / (4.0 * pi * pi) + std::pow(4.0 * pi * pi, 1.0 / p)));
    EXPECT_NEAR(s.lhs, lhs, 1e-12);
    EXPECT_NEAR(s.rhs_constant_free, rhs, 1e-11);
    EXPECT_NEAR(s.required_constant, lhs / rhs, 1e-13);
  }
  // Regression baseline at p = 4.
  EXPECT_NEAR(rf::desjardins_check(rf::SpectralScalar::constant(g, 1.0), sin_x(g), 4.0).required_constant,
              0.11352693067, 1e-10);
}

TEST(Desjardins, ScaleCovariance) {
  rf::Grid g(32);
  const auto rho = wavy_density(g);
  const auto b = rf::random_trig_field(g, 9, 10) + rf::SpectralScalar::constant(g, 0.4);
  const auto base = rf::desjardins_check(rho, b, 8.0);
  const auto r = rho.to_physical();
  const auto bv = b.to_physical();
  double wb = 0.0, rb = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    wb += r[i] * bv[i] * bv[i];
    rb += r[i] * bv[i];
  }
  const double first = 2.0 * std::sqrt(wb * g.cell_area()) * std::abs(rb * g.cell_area());
  for (double lambda : {0.1, 1.0, 10.0}) {
    const auto s = rf::desjardins_check(rho, lambda * b, 8.0);
    EXPECT_NEAR(s.lhs, lambda * lambda * base.lhs, 1e-12 * s.lhs);
    EXPECT_NEAR(s.rhs_constant_free, lambda * lambda * base.rhs_constant_free, 1e-12 * s.rhs_constant_free);
    // Gradient-free part: lhs over the first term does not see lambda.
    const double first_l = first * lambda * lambda;
    EXPECT_NEAR(s.lhs / first_l, base.lhs / first, 1e-12 * base.lhs / first);
  }
}

TEST(Desjardins, RejectsZeroWeightedNorm) {
  rf::Grid g(16);
  EXPECT_THROW(rf::desjardins_check(wavy_density(g), rf::SpectralScalar(g), 4.0), rf::InvalidArgument);
  EXPECT_THROW(rf::desjardins_check(wavy_density(g), sin_x(g), 1.0), rf::InvalidArgument);
}

TEST(FreqSplit, SingleModeClosedForm) {
  rf::Grid g(32);
  for (int n : {2, 3, 8}) {
    const auto r = rf::freq_split_bounds_check(sin_x(g), n, {2.0, 4.0});
    EXPECT_NEAR(r.low_ratio, 1.0 / (pi * std::sqrt(2.0 * std::log(n))), 1e-12);
    for (const auto& [q, ratio] : r.high_ratio) EXPECT_LT(ratio, 1e-14);
  }
}

TEST(FreqSplit, HighOnlyAndConstantFields) {
  rf::Grid g(32);
  const auto b = rf::SpectralScalar::from_function(g, [](double x, double y) { return std::cos(5 * x) + std::sin(4 * x + 3 * y); });
  const auto r = rf::freq_split_bounds_check(b, 4, {2.0});
  EXPECT_LT(r.low_ratio, 1e-15);
  EXPECT_GT(r.high_ratio[0].second, 0.0);
  const auto c = rf::freq_split_bounds_check(rf::SpectralScalar::constant(g, 3.0), 4, {2.0, 8.0});
  EXPECT_EQ(c.low_ratio, 0.0);
  EXPECT_EQ(c.high_ratio[1].second, 0.0);
  EXPECT_THROW(rf::freq_split_bounds_check(b, 1, {2.0}), rf::InvalidArgument);
}

TEST(FreqSplit, HighBandDecaysAtLeastAtTheSobolevRate) {
  rf::Grid g(128);
  const std::vector<double> ns{2, 4, 8, 16};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto b = rf::random_trig_field(g, seed, 40);
    for (double q : {2.0, 4.0, 8.0}) {
      std::vector<double> norms;
      for (double n : ns) {
        const auto high = rf::low_high_split(b, static_cast<int>(n)).high.to_physical();
        norms.push_back(rf::lp_norm_values(high, g.cell_area(), q));
      }
      EXPECT_LE(slope(ns, norms), -2.0 / q + 0.2) << "seed " << seed << " q " << q;
    }
  }
}

TEST(Monotone, HelperIsIncreasing) {
  const auto z = rf::geometric_grid(1e-6, 1e6, 100);
  for (double A : {1.0, 1e3, 1e-3}) {
    const auto r = rf::monotone_helper_check(A, z);
    EXPECT_TRUE(r.monotone);
    EXPECT_FALSE(r.first_violation.has_value());
    EXPECT_GE(r.min_derivative, 0.0);
  }
  EXPECT_THROW(rf::monotone_helper_check(0.0, z), rf::InvalidArgument);
  EXPECT_THROW(rf::monotone_helper_check(1.0, {2.0, 1.0}), rf::InvalidArgument);
}

TEST(FitConstant, SupAndArgmax) {
  rf::InequalitySample a{"x", {}, 1, 1, 0.5, "a"};
  rf::InequalitySample b{"x", {}, 3, 1, 3.0, "b"};
  EXPECT_EQ(rf::fit_constant({a}).sup_required_constant, 0.5);
  EXPECT_EQ(rf::fit_constant({a, a}).sup_required_constant, 0.5);
  const auto r = rf::fit_constant({a, b, a});
  EXPECT_EQ(r.sup_required_constant, 3.0);
  EXPECT_EQ(r.argmax_descriptor, "b");
  EXPECT_EQ(r.samples_count, 3u);
  EXPECT_THROW(rf::fit_constant({}), rf::InvalidArgument);
  rf::InequalitySample c{"y", {}, 1, 1, 1, "c"};
  EXPECT_THROW(rf::fit_constant({a, c}), rf::InvalidArgument);
}

TEST(Sweep, DesjardinsFitMatchesRecomputedMax) {
  rf::SweepOptions opt;
  opt.grid_n = 32;
  opt.count = 25;
  const auto samples = rf::inequality_sweep(rf::InequalityKind::desjardins, opt);
  ASSERT_EQ(samples.size(), 25u);
  double mx = 0.0;
  for (const auto& s : samples) mx = std::max(mx, s.lhs / s.rhs_constant_free);
  EXPECT_DOUBLE_EQ(rf::fit_constant(samples).sup_required_constant, mx);
}

TEST(Sweep, IndependentOfThreadCount) {
  rf::SweepOptions opt;
  opt.grid_n = 32;
  opt.count = 12;
  const auto one = rf::inequality_sweep(rf::InequalityKind::poincare_alpha_beta, opt);
  opt.threads = 3;
  const auto three = rf::inequality_sweep(rf::InequalityKind::poincare_alpha_beta, opt);
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].required_constant, three[i].required_constant);
    EXPECT_EQ(one[i].descriptor, three[i].descriptor);
  }
}

TEST(Sweep, ConstantsFiniteAndStableUnderRefinement) {
  rf::SweepOptions opt;
  opt.count = 200;
  opt.grid_n = 64;
  const auto coarse = rf::run_all_sweeps(opt);
  opt.grid_n = 128;
  const auto fine = rf::run_all_sweeps(opt);
  ASSERT_EQ(coarse.fits.size(), fine.fits.size());
  for (const auto& s : coarse.samples) EXPECT_TRUE(std::isfinite(s.required_constant)) << s.inequality_id;
  for (const auto& s : fine.samples) EXPECT_TRUE(std::isfinite(s.required_constant)) << s.inequality_id;
  for (std::size_t i = 0; i < coarse.fits.size(); ++i) {
    const double a = coarse.fits[i].sup_required_constant;
    const double b = fine.fits[i].sup_required_constant;
    EXPECT_NEAR(b / a, 1.0, 0.10) << coarse.fits[i].inequality_id << ": " << a << " -> " << b << " ("
                                  << coarse.fits[i].argmax_descriptor << " | " << fine.fits[i].argmax_descriptor << ")";
  }
}
