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

// Command driver behind the roughflow executable: turns a manifest (command,
// flags, config file, output directory) into CSV reports and a run summary.
// Exit status 0 on success, 2 on invalid input, 3 on numerical failure; in
// the last case everything computed before the failure is still written.

#include <fftw3.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "roughflow/blowup_criterion.hpp"
#include "roughflow/config.hpp"
#include "roughflow/csv.hpp"
#include "roughflow/inequality_lab.hpp"
#include "roughflow/initial_data.hpp"
#include "roughflow/ins_solver.hpp"
#include "roughflow/norms_and_classes.hpp"
#include "roughflow/version.hpp"

namespace roughflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

enum class Command { simulate, classify, verify_inequalities, criterion, truncation_study };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::classify: return "classify";
    case Command::verify_inequalities: return "verify-inequalities";
    case Command::criterion: return "criterion";
    case Command::truncation_study: return "truncation-study";
  }
  return "?";
}

struct RunManifest {
  Command command = Command::simulate;
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 1;
  int threads = 1;
  // classify
  std::string profile;
  int dim = 2;
  // verify-inequalities
  int sweep = 200;
  int grid = 64;
  // criterion
  std::string mode = "vacuum";
  // truncation-study
  std::vector<double> k_list;
};

/// Worker count from ROUGHFLOW_THREADS (default 1).
inline int threads_from_environment() {
  const char* s = std::getenv("ROUGHFLOW_THREADS");
  if (!s || !*s) return 1;
  try {
    const int n = std::stoi(s);
    return n >= 1 ? n : 1;
  } catch (...) {
    return 1;
  }
}

namespace detail {

inline const std::set<std::string>& solver_keys() {
  static const std::set<std::string> keys{"grid_n",          "mu",       "cfl",        "t_end",       "vacuum_floor",
                                          "pressure_tol",    "pressure_max_iter",      "diag_p_list", "output_interval",
                                          "dt_max",          "hess_r",   "max_steps",  "initial_kind", "velocity",
                                          "amplitude",       "seed",     "k_max",      "rms_speed",   "density_base",
                                          "density_variation", "profile", "profile_cap", "profile_amplitude",
                                          "torus_radius",    "comparison_p", "comparison_C"};
  return keys;
}

inline const std::set<std::string>& criterion_keys() {
  static const std::set<std::string> keys = [] {
    auto k = solver_keys();
    for (const char* extra : {"p_list", "p_min", "p_max", "p_count", "C"}) k.insert(extra);
    return k;
  }();
  return keys;
}

inline SolverConfig solver_config(const Config& c) {
  SolverConfig s;
  s.grid_n = c.get_int("grid_n", s.grid_n);
  s.mu = c.get_double("mu", s.mu);
  s.cfl = c.get_double("cfl", s.cfl);
  s.t_end = c.get_double("t_end", s.t_end);
  s.vacuum_floor = c.get_double("vacuum_floor", s.vacuum_floor);
  s.pressure_tol = c.get_double("pressure_tol", s.pressure_tol);
  s.pressure_max_iter = c.get_int("pressure_max_iter", s.pressure_max_iter);
  s.diag_p_list = c.get_list("diag_p_list", s.diag_p_list);
  s.output_interval = c.get_double("output_interval", s.output_interval);
  s.dt_max = c.get_double("dt_max", s.dt_max);
  s.hess_r = c.get_double("hess_r", s.hess_r);
  s.max_steps = c.get_long("max_steps", s.max_steps);
  s.validate();
  return s;
}

inline InitialDataParams initial_params(const Config& c, std::uint64_t seed) {
  InitialDataParams p;
  p.grid_n = c.get_int("grid_n", 64);
  const auto kind = c.get_string("initial_kind", "taylor_green");
  try {
    p.kind = initial_kind_from_string(kind);
  } catch (const InvalidArgument& e) {
    throw ConfigError("initial_kind", e.what());
  }
  if (p.kind == InitialKind::custom) throw ConfigError("initial_kind", "custom data is only available from the library");
  try {
    p.velocity = velocity_kind_from_string(c.get_string("velocity", "taylor_green"));
  } catch (const InvalidArgument& e) {
    throw ConfigError("velocity", e.what());
  }
  p.amplitude = c.get_double("amplitude", p.amplitude);
  p.seed = static_cast<std::uint64_t>(c.get_long("seed", static_cast<long>(seed)));
  p.k_max = c.get_int("k_max", p.k_max);
  p.rms_speed = c.get_double("rms_speed", p.rms_speed);
  p.density_base = c.get_double("density_base", p.density_base);
  p.density_variation = c.get_double("density_variation", p.density_variation);
  try {
    p.profile = RadialProfile::make(profile_kind_from_string(c.get_string("profile", "log_log_abs_log")), 2);
  } catch (const InvalidArgument& e) {
    throw ConfigError("profile", e.what());
  }
  p.profile.cap = c.get_double("profile_cap", p.profile.cap);
  p.profile_amplitude = c.get_double("profile_amplitude", p.profile_amplitude);
  p.torus_radius = c.get_double("torus_radius", p.torus_radius);
  return p;
}

inline std::vector<std::string> diagnostics_header(const SolverConfig& cfg) {
  std::vector<std::string> h{"t",  "mass",      "mom_x", "mom_y", "ke", "dissip", "energy_res", "grad_v_l2", "X_t",
                             "weighted_accel", "hess_lr_int", "grad_v_linf"};
  for (double p : cfg.diag_p_list) h.push_back("rho_lp_" + format_number(p));
  return h;
}

inline void write_record(CsvWriter& w, const DiagnosticsRecord& r) {
  auto row = w.row();
  row << r.t << r.mass << r.momentum[0] << r.momentum[1] << r.kinetic_energy << r.dissipation_integral
      << r.energy_residual << r.grad_v_l2 << r.X_t << r.weighted_accel << r.hess_lr_integral << r.grad_v_linf;
  for (const auto& [p, v] : r.rho_lp) row << v;
}

inline std::vector<std::string> verdict_header() {
  return {"p", "s", "K0", "lhs", "rhs", "lower_bound", "satisfied", "critical_constant"};
}

inline void write_verdict(CsvWriter& w, const CriterionVerdict& v) {
  w.row() << v.p << v.s << v.K0 << v.lhs << v.rhs << v.lower_bound << v.satisfied << v.critical_constant;
}

inline std::vector<double> criterion_p_grid(const Config& c) {
  if (c.has("p_list")) {
    auto ps = c.get_list("p_list", {});
    for (double p : ps) {
      if (!(p > 3.0)) throw ConfigError("p_list", "every p must exceed 3");
    }
    return ps;
  }
  const double lo = c.get_double("p_min", 4.0);
  const double hi = c.get_double("p_max", 1e4);
  const int count = c.get_int("p_count", 40);
  if (!(lo > 3.0)) throw ConfigError("p_min", "must exceed 3");
  if (!(hi >= lo)) throw ConfigError("p_max", "must not be below p_min");
  if (count < 1) throw ConfigError("p_count", "must be positive");
  return count == 1 ? std::vector<double>{lo} : geometric_grid(lo, hi, count);
}

// Simulated X_t against the comparison ODE driven by K0 ||grad v||^2.
inline std::size_t write_comparison(const std::string& path, const std::vector<DiagnosticsRecord>& records,
                                    const DataFunctionals& data, double p, double C) {
  CsvWriter w(path, {"t", "X_sim", "X_ode", "flagged"});
  if (records.size() < 2) {
    for (const auto& r : records) w.row() << r.t << r.X_t << data.X0 << false;
    return 0;
  }
  const double K0 = compute_K0(data, p, C);
  std::vector<double> times, f, X;
  for (const auto& r : records) {
    times.push_back(r.t);
    f.push_back(K0 * r.grad_v_l2 * r.grad_v_l2);
    X.push_back(r.X_t);
  }
  const auto trace = ode_comparison_solve(times, f, data.X0, exponent_s(p));
  const auto flagged = comparison_violations(X, trace);
  std::set<std::size_t> bad(flagged.begin(), flagged.end());
  for (std::size_t i = 0; i < records.size(); ++i) {
    w.row() << times[i] << X[i] << trace.sample_X[i] << (bad.count(i) > 0);
  }
  return flagged.size();
}

inline std::vector<double> read_grid_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read grid file '" + path + "'");
  std::vector<double> values;
  std::string token;
  char ch;
  auto flush = [&] {
    if (!token.empty()) {
      values.push_back(Config::to_double("grid:" + path, token));
      token.clear();
    }
  };
  while (in.get(ch)) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      token += ch;
    }
  }
  flush();
  return values;
}

struct Summary {
  std::ostringstream body;
  std::vector<std::string> outputs;
};

}  // namespace detail

/// Runs one command. Messages go to `log`; the return value is the exit status.
inline int execute(const RunManifest& m, std::ostream& log = std::cerr) {
  const auto start = std::chrono::steady_clock::now();
  detail::Summary summary;
  std::optional<Config> config;
  int status = kExitOk;
  std::string message = "ok";
  const std::filesystem::path out_dir(m.output_dir);

  auto out = [&](const std::string& name) {
    summary.outputs.push_back(name);
    return (out_dir / name).string();
  };

  try {
    if (m.output_dir.empty()) throw InvalidArgument("output directory is required");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) throw InvalidArgument("cannot create output directory '" + m.output_dir + "'");

    switch (m.command) {
      case Command::simulate: {
        config = Config::load(m.config_path);
        config->require_known(detail::solver_keys());
        const auto cfg = detail::solver_config(*config);
        const auto data0 = make_initial_data(detail::initial_params(*config, m.seed));
        const auto s0 = initial_state(data0.rho, data0.v, cfg);
        const auto functionals = compute_functionals(s0.rho, s0.v);
        CsvWriter diag(out("diagnostics.csv"), detail::diagnostics_header(cfg));
        const auto res = run(cfg, data0.rho, data0.v, [&](const DiagnosticsRecord& r) { detail::write_record(diag, r); });
        const double cp = config->get_double("comparison_p", 20.0);
        const double cc = config->get_double("comparison_C", 1.0);
        const auto flagged = detail::write_comparison(out("comparison.csv"), res.records, functionals, cp, cc);
        summary.body << "steps: " << res.steps << "\n"
                     << "pressure_iterations: " << res.pressure_iterations << "\n"
                     << "records: " << res.records.size() << "\n"
                     << "final_t: " << format_number(res.final_state.t) << "\n"
                     << "clipped_mass: " << format_number(res.final_state.history.clipped_mass) << "\n"
                     << "comparison_flagged: " << flagged << " (p = " << format_number(cp)
                     << ", C = " << format_number(cc) << ", band 5%)\n";
        if (!res.ok()) {
          status = kExitNumerical;
          message = res.failure_message;
        }
        break;
      }
      case Command::classify: {
        LpNormCurve curve;
        LexpResult lexp;
        auto ps = default_p_grid();
        for (double extra : {1.0, 2.0, 4.0}) ps.push_back(extra);
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        if (m.profile.rfind("grid:", 0) == 0) {
          const auto values = detail::read_grid_values(m.profile.substr(5));
          const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(values.size()))));
          if (static_cast<std::size_t>(n) * n != values.size()) throw InvalidArgument("grid file must hold n*n values");
          const Grid g(n);
          const auto field = SpectralScalar::from_physical(g, values);
          curve = lp_curve_grid(field, ps);
          lexp = lexp_test(field, default_beta_grid());
        } else {
          if (m.dim < 1) throw InvalidArgument("dimension must be >= 1");
          const auto profile = RadialProfile::make(profile_kind_from_string(m.profile), m.dim);
          curve = lp_curve_radial(profile, ps);
          lexp = lexp_test(profile, default_beta_grid());
        }
        const auto rep = classify(class_functionals(curve), lexp);
        {
          CsvWriter w(out("curve.csv"), {"p", "norm", "L_functional", "Y0_functional"});
          for (std::size_t i = 0; i < curve.p_values.size(); ++i) {
            const auto L = rep.L_functional[i];
            w.row() << curve.p_values[i] << curve.norms[i] << (L ? *L : std::numeric_limits<double>::quiet_NaN())
                    << rep.Y0_functional[i];
          }
        }
        {
          CsvWriter w(out("class_verdicts.csv"), {"in_L", "in_Y0", "in_Lexp", "lexp_beta_star", "L_slope", "Y0_slope"});
          w.row() << to_string(rep.verdicts.in_L) << to_string(rep.verdicts.in_Y0) << rep.verdicts.in_Lexp
                  << (rep.lexp_beta_star ? *rep.lexp_beta_star : std::numeric_limits<double>::quiet_NaN()) << rep.L_slope
                  << rep.Y0_slope;
        }
        summary.body << "profile: " << m.profile << "\ndim: " << m.dim << "\n"
                     << "in_L: " << to_string(rep.verdicts.in_L) << "\nin_Y0: " << to_string(rep.verdicts.in_Y0)
                     << "\nin_Lexp: " << (rep.verdicts.in_Lexp ? "yes" : "no")
                     << "\n(trend verdicts are numerical evidence on a finite p grid)\n";
        break;
      }
      case Command::verify_inequalities: {
        SweepOptions opt;
        opt.grid_n = m.grid;
        opt.count = m.sweep;
        opt.seed = m.seed;
        opt.threads = m.threads;
        const auto rep = run_all_sweeps(opt);
        {
          CsvWriter w(out("inequality.csv"), {"parameters", "lhs", "rhs_constant_free", "required_constant"});
          for (const auto& s : rep.samples) {
            w.row() << ("inequality=" + s.inequality_id + ";" + s.parameter_string()) << s.lhs << s.rhs_constant_free
                    << s.required_constant;
          }
        }
        {
          CsvWriter w(out("constants.csv"),
                      {"inequality", "samples", "sup_required_constant", "argmax_index", "argmax_descriptor"});
          for (const auto& f : rep.fits) {
            w.row() << f.inequality_id << f.samples_count << f.sup_required_constant << f.argmax_index
                    << f.argmax_descriptor;
            summary.body << f.inequality_id << ": sup required constant " << format_number(f.sup_required_constant)
                         << "\n";
          }
        }
        {
          CsvWriter w(out("monotone.csv"), {"A", "monotone", "first_violation", "min_derivative"});
          const auto z = geometric_grid(1e-6, 1e6, 100);
          for (double A : {1.0, 1e3}) {
            const auto r = monotone_helper_check(A, z);
            w.row() << A << r.monotone << (r.first_violation ? static_cast<long>(*r.first_violation) : -1L)
                    << r.min_derivative;
          }
        }
        break;
      }
      case Command::criterion: {
        config = Config::load(m.config_path);
        config->require_known(detail::criterion_keys());
        const auto cfg = detail::solver_config(*config);
        const auto data0 = make_initial_data(detail::initial_params(*config, m.seed));
        const auto s0 = initial_state(data0.rho, data0.v, cfg);
        const auto ps = detail::criterion_p_grid(*config);
        const double C = config->get_double("C", 1.0);
        if (!(C > 0.0)) throw ConfigError("C", "must be positive");
        const auto d = compute_functionals(s0.rho, s0.v);
        summary.body << "M: " << format_number(d.M) << "\nE0: " << format_number(d.E0) << "\nG0: " << format_number(d.G0)
                     << "\nX0: " << format_number(d.X0) << "\nrho_star: " << format_number(d.rho_star) << "\n";
        if (m.mode == "vacuum" || m.mode == "vacuum-free") {
          const auto mode = m.mode == "vacuum" ? CriterionMode::global_vacuum : CriterionMode::global_vacuum_free;
          if (mode == CriterionMode::global_vacuum_free && !(d.rho_star > 0.0)) {
            throw InvalidArgument("vacuum-free mode needs a density bounded below (grid minimum is " +
                                  format_number(d.rho_star) + ")");
          }
          const auto scan = scan_p(d, mode, C, ps);
          CsvWriter w(out("verdicts.csv"), detail::verdict_header());
          for (const auto& v : scan.table) detail::write_verdict(w, v);
          summary.body << "mode: " << to_string(mode) << "\n";
          if (scan.first_satisfied) {
            summary.body << "first satisfied at p = " << format_number(scan.table[*scan.first_satisfied].p) << "\n";
          } else {
            summary.body << "criterion not satisfied on grid\n";
          }
          summary.body << "lhs/|log s| top-decade slope: " << format_number(scan.lhs_over_log_s_slope) << "\n";
        } else if (m.mode == "local") {
          const auto res = run(cfg, data0.rho, data0.v);
          if (res.records.size() < 2) throw InvalidArgument("local mode needs a simulated interval (t_end > 0)");
          DissipationCurve curve;
          for (const auto& r : res.records) {
            curve.times.push_back(r.t);
            curve.values.push_back(r.dissipation_integral / cfg.mu);
          }
          CsvWriter w(out("verdicts.csv"), detail::verdict_header());
          CsvWriter h(out("local_horizon.csv"), {"p", "s", "K0", "rhs", "T_star"});
          for (double p : ps) {
            const auto lv = check_local_vacuum(d, p, C, curve);
            CriterionVerdict v;
            v.mode = CriterionMode::local_vacuum;
            v.p = p;
            v.s = lv.s;
            v.K0 = lv.prefactor;
            v.lhs = lv.prefactor * curve.values.back();
            v.rhs = lv.rhs;
            if (v.s < 1.0) v.lower_bound = lower_bound_integral(d.X0, v.s);
            v.satisfied = std::isinf(lv.T_star);
            v.critical_constant = v.lhs > 0.0 ? C * v.rhs / v.lhs : std::numeric_limits<double>::infinity();
            detail::write_verdict(w, v);
            h.row() << p << lv.s << lv.prefactor << lv.rhs << lv.T_star;
          }
          summary.body << "mode: local_vacuum\nsimulated_until: " << format_number(res.final_state.t) << "\n";
          if (!res.ok()) {
            status = kExitNumerical;
            message = res.failure_message;
          }
        } else {
          throw InvalidArgument("unknown criterion mode '" + m.mode + "'");
        }
        break;
      }
      case Command::truncation_study: {
        config = Config::load(m.config_path);
        config->require_known(detail::solver_keys());
        const auto cfg = detail::solver_config(*config);
        const auto data0 = make_initial_data(detail::initial_params(*config, m.seed));
        const auto study = truncation_study(cfg, data0.rho, data0.v, m.k_list, m.threads);
        {
          CsvWriter w(out("truncation.csv"),
                      {"k", "status", "steps", "t_final", "mass", "ke", "dissip", "energy_res", "clipped_mass"});
          for (const auto& r : study.runs) {
            const auto& last = r.result.records.back();
            w.row() << r.k << (r.result.ok() ? std::string("ok") : std::string("failed")) << r.result.steps << last.t
                    << last.mass << last.kinetic_energy << last.dissipation_integral << last.energy_residual
                    << last.clipped_mass;
            if (!r.result.ok()) {
              status = kExitNumerical;
              message = "run with k = " + format_number(r.k) + " failed: " + r.result.failure_message;
            }
          }
        }
        {
          CsvWriter w(out("distances.csv"), {"k_lo", "k_hi", "distance"});
          for (std::size_t i = 0; i < study.distances.size(); ++i) {
            w.row() << study.runs[i].k << study.runs[i + 1].k << study.distances[i];
          }
        }
        summary.body << "threads: " << m.threads << "\n";
        break;
      }
    }
  } catch (const InvalidArgument& e) {
    status = kExitInvalid;
    message = e.what();
  } catch (const SolverFailure& e) {
    status = kExitNumerical;
    message = e.what();
  } catch (const NumericalError& e) {
    status = kExitNumerical;
    message = e.what();
  } catch (const NumericalBlowup& e) {
    status = kExitNumerical;
    message = e.what();
  }

  if (status != kExitOk) log << "roughflow " << to_string(m.command) << ": " << message << "\n";

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!m.output_dir.empty() && std::filesystem::is_directory(out_dir)) {
    std::ofstream s(out_dir / "run_summary.txt", std::ios::trunc);
    s << "command: " << to_string(m.command) << "\n"
      << "status: " << status << "\n"
      << "message: " << message << "\n"
      << "roughflow: " << kVersion << "\n"
      << "fftw: " << fftw_version << "\n"
      << "compiler: " << __VERSION__ << "\n"
      << "wall_time_s: " << wall << "\n"
      << "seed: " << m.seed << "\n";
    if (!m.config_path.empty()) s << "config_path: " << m.config_path << "\n";
    if (config) {
      s << "config:\n";
      for (const auto& [k, v] : config->entries()) s << "  " << k << " = " << v << "\n";
    }
    s << summary.body.str();
    s << "outputs:";
    for (const auto& o : summary.outputs) s << " " << o;
    s << "\n";
  }
  return status;
}

}  // namespace roughflow::cli
