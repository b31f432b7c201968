// Copyright 2026 The blockade-sim Authors
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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "blockade/circuit_model.hpp"
#include "blockade/config.hpp"
#include "blockade/errors.hpp"
#include "blockade/lindblad.hpp"
#include "blockade/phase_space.hpp"

namespace blockade {

// ---------------------------------------------------------------------------
// Result tables

using Cell = std::optional<double>;  // nullopt is written as null

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw InvalidArgument("table row width does not match the header");
    rows.push_back(std::move(row));
  }
  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw InvalidArgument("no column named " + name);
  }
  bool operator==(const Table&) const = default;
};

struct RunResult {
  ExperimentKind experiment = ExperimentKind::steady;
  Table table;
  json summary = json::object();
  std::vector<std::string> warnings;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i] && std::isfinite(*row[i]) ? format_number(*row[i]) : "null";
    }
    out += '\n';
  }
  return out;
}

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    return parts;
  };
  if (!std::getline(in, line)) throw InvalidArgument("empty CSV");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (const auto& f : split(line)) {
      if (f == "null") row.emplace_back(std::nullopt);
      else row.emplace_back(std::stod(f));
    }
    t.add(std::move(row));
  }
  return t;
}

inline json table_to_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& c : r) {
      if (c && std::isfinite(*c)) row.push_back(*c);
      else row.push_back(nullptr);
    }
    rows.push_back(std::move(row));
  }
  return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

inline Cell finite_or_null(double v) { return std::isfinite(v) ? Cell(v) : std::nullopt; }
inline Cell log10_or_null(const Cell& v) {
  if (!v || !(*v > 0.0)) return std::nullopt;
  return std::log10(*v);
}

// ---------------------------------------------------------------------------
// Parallel map with results merged in index order

inline int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

template <class F>
void parallel_for(int count, int jobs, F&& body) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Steady-state observables of one working point

struct SteadyObservables {
  PortValues N;
  std::array<Cell, 3> g2{};
  PhotonProbabilities probabilities;
  double log_negativity = 0.0;
  double residual = 0.0;
};

struct WorkingPoint {
  CircuitParams params;
  SupermodeParams sp;
  HilbertSpace space;
  ModeFrame frame;
  LindbladModel model;
};

inline WorkingPoint effective_working_point(const CircuitParams& p, int levels, bool dissipation = true,
                                            std::optional<double> Delta2_override = std::nullopt) {
  SupermodeParams sp = derive_supermodes(p);
  if (Delta2_override) {
    sp.Delta2 = *Delta2_override;
    sp.Delta_minus = sp.Delta_plus + sp.Delta2;
  }
  HilbertSpace space = HilbertSpace::qubit_two_modes(levels);
  ModeFrame frame = ModeFrame::supermode(space, sp.beta);
  std::vector<CollapseOperator> collapse;
  if (dissipation) collapse = default_collapse_operators(p, frame);
  LindbladModel model(build_effective_hamiltonian(sp, space), std::move(collapse));
  return {p, sp, std::move(space), std::move(frame), std::move(model)};
}

inline SteadyObservables steady_observables(const WorkingPoint& w, DensityMatrix* rho_out = nullptr,
                                            DensityMatrix* bare_out = nullptr) {
  SteadyStateReport rep;
  const DensityMatrix rho = steady_state(w.model, {}, &rep);
  SteadyObservables o;
  o.residual = rep.residual;
  o.N = output_photon_numbers(rho, w.params.gamma1, w.params.gamma2, w.frame);
  for (int port = 1; port <= 3; ++port) {
    try {
      o.g2[static_cast<std::size_t>(port - 1)] = g2_zero_port(rho, port, w.params.gamma1, w.params.gamma2, w.frame);
    } catch (const UndefinedCorrelation&) {
      o.g2[static_cast<std::size_t>(port - 1)] = std::nullopt;
    }
  }
  const DensityMatrix bare = w.frame.to_bare(rho);
  o.probabilities = photon_probabilities(bare, w.sp.beta);
  o.log_negativity = logarithmic_negativity(partial_trace(bare, {1, 2})).log_negativity;
  if (rho_out) *rho_out = rho;
  if (bare_out) *bare_out = bare;
  return o;
}

// Largest relative change of N_i and g2_i(0) between cutoff N and N + 2.
inline double cutoff_convergence_delta(const CircuitParams& p, int levels) {
  const auto a = steady_observables(effective_working_point(p, levels));
  const auto b = steady_observables(effective_working_point(p, levels + 2));
  double worst = 0.0;
  auto rel = [&](double x, double y) { worst = std::max(worst, std::abs(x - y) / std::max(std::abs(y), 1e-300)); };
  rel(a.N.N1, b.N.N1);
  rel(a.N.N2, b.N.N2);
  rel(a.N.N3, b.N.N3);
  for (std::size_t i = 0; i < 3; ++i)
    if (a.g2[i] && b.g2[i]) rel(*a.g2[i], *b.g2[i]);
  return worst;
}

// ---------------------------------------------------------------------------
// Experiments

struct RunOptions {
  int jobs = 1;
  std::ostream* log = nullptr;  // warning lines
};

namespace detail {

inline json solver_settings(const ExperimentConfig& c) {
  const Numerics& n = c.numerics;
  return {{"fock_cutoff", n.fock_cutoff},
          {"levels_per_mode", n.levels()},
          {"integrator", "dopri5 dense output"},
          {"rtol", n.rtol},
          {"atol", n.atol},
          {"steady_state", "inverse iteration on sparse LU of (L - sigma I)"},
          {"shift_rel", SteadyStateOptions{}.shift_rel},
          {"residual_rel", SteadyStateOptions{}.residual_rel},
          {"hamiltonian", to_string(c.hamiltonian)},
          {"dissipation", c.dissipation}};
}

inline json params_json(const CircuitParams& p, const SupermodeParams& sp) {
  return {{"omega1", p.omega1},       {"omega2", p.omega2},   {"g", p.g},
          {"G1", p.G1},               {"G2", p.G2},           {"theta_mix", p.theta_mix},
          {"omega_q", p.omega_q},     {"omega_d", p.omega_d}, {"eps1", {p.eps1.real(), p.eps1.imag()}},
          {"eps2", {p.eps2.real(), p.eps2.imag()}},
          {"beta", sp.beta},          {"Theta", sp.Theta},    {"lambda", sp.lambda},
          {"eps_plus", {sp.eps_plus.real(), sp.eps_plus.imag()}},
          {"eps_minus", {sp.eps_minus.real(), sp.eps_minus.imag()}},
          {"Delta_plus", sp.Delta_plus}, {"Delta2", sp.Delta2}, {"Omega_plus_prime", sp.Omega_plus_prime}};
}

inline void warn(RunResult& r, const RunOptions& o, const std::string& msg) {
  r.warnings.push_back(msg);
  if (o.log) *o.log << "warning: " << msg << '\n';
}

inline RunResult run_evolve(const ExperimentConfig& c, const RunOptions& o) {
  const CircuitParams p = apply_tuning(c.circuit, c.tuning);
  const SupermodeParams sp = derive_supermodes(p);
  const int levels = c.numerics.levels();
  const HilbertSpace space = HilbertSpace::qubit_two_modes(levels);
  const bool lab = c.hamiltonian == HamiltonianKind::lab;
  const ModeFrame frame = lab ? ModeFrame::bare(space) : ModeFrame::supermode(space, sp.beta);

  std::vector<CollapseOperator> collapse;
  if (c.dissipation) collapse = default_collapse_operators(p, frame);
  TimeDependentHamiltonian h(space);
  switch (c.hamiltonian) {
    case HamiltonianKind::effective: h.add(build_effective_hamiltonian(sp, space)); break;
    case HamiltonianKind::rotating: h = build_rotating_frame_full(p, sp, space); break;
    case HamiltonianKind::lab: h = build_lab_hamiltonian(p, space); break;
  }
  const LindbladModel model(std::move(h), std::move(collapse));
  const auto rho0 = DensityMatrix::from_state(StateVector::basis(space, {kGround, 0, 0}));
  const auto traj = evolve(model, rho0, c.numerics.t_grid.values(), {c.numerics.rtol, c.numerics.atol});

  RunResult r;
  r.experiment = c.experiment;
  r.table.columns = {"t", "P00", "P10", "P01", "P_psi1_plus", "P00_plus_psi1_plus", "P_multi", "P_excited",
                     "trace_error"};
  const Operator excited = embed(Operator(HilbertSpace({2}), Matrix{{1.0, 0.0}, {0.0, 0.0}}), space, 0);
  double worst_sum = 1.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const DensityMatrix bare = frame.to_bare(traj.states[k]);
    const auto pp = photon_probabilities(bare, sp.beta);
    double multi = 0.0;
    for (int a = 0; a < pp.joint.rows(); ++a)
      for (int b = 0; b < pp.joint.cols(); ++b)
        if (a + b >= 2) multi += pp.joint(a, b);
    const double sum = pp.joint(0, 0) + pp.psi1_plus;
    worst_sum = std::min(worst_sum, sum);
    r.table.add({traj.times[k], pp.joint(0, 0), pp.joint(1, 0), pp.joint(0, 1), pp.psi1_plus, sum, multi,
                 expectation(bare, excited).real(), std::abs(traj.states[k].op().trace() - 1.0)});
  }
  r.summary = {{"min_P00_plus_psi1_plus", worst_sum}, {"parameters", params_json(p, sp)}};
  return r;
}

inline RunResult run_steady(const ExperimentConfig& c, const RunOptions& o) {
  const CircuitParams p = apply_tuning(c.circuit, c.tuning);
  const WorkingPoint w = effective_working_point(p, c.numerics.levels(), c.dissipation);
  DensityMatrix bare = DensityMatrix::maximally_mixed(w.space);
  const auto obs = steady_observables(w, nullptr, &bare);

  RunResult r;
  r.experiment = c.experiment;
  r.table.columns = {"quantity", "n1", "n2", "value"};
  // quantity codes: 0 P(n1,n2), 1 P^(1)(n), 2 P^(2)(n)
  const auto& pp = obs.probabilities;
  for (int a = 0; a < pp.joint.rows(); ++a)
    for (int b = 0; b < pp.joint.cols(); ++b) r.table.add({0.0, double(a), double(b), pp.joint(a, b)});
  for (int a = 0; a < pp.mode1.size(); ++a) r.table.add({1.0, double(a), std::nullopt, pp.mode1(a)});
  for (int a = 0; a < pp.mode2.size(); ++a) r.table.add({2.0, double(a), std::nullopt, pp.mode2(a)});

  double multi = 0.0;
  for (int a = 0; a < pp.joint.rows(); ++a)
    for (int b = 0; b < pp.joint.cols(); ++b)
      if (a + b >= 2) multi = std::max(multi, pp.joint(a, b));
  json g2 = json::array();
  for (const auto& v : obs.g2) g2.push_back(v ? json(*v) : json(nullptr));
  r.summary = {{"N", {obs.N.N1, obs.N.N2, obs.N.N3}},
               {"g2_zero", g2},
               {"P_psi1_plus", pp.psi1_plus},
               {"max_P_two_or_more", multi},
               {"log_negativity", obs.log_negativity},
               {"residual", obs.residual},
               {"parameters", params_json(p, w.sp)}};
  json depth = json::array();
  for (int k : {1, 2}) {
    try {
      const auto q = nonclassical_depth_qubit(partial_trace(bare, {k}));
      depth.push_back(q.undefined ? json(nullptr) : json(q.tau));
    } catch (const InvalidArgument& e) {
      depth.push_back(nullptr);
      warn(r, o, std::string("qubit-formula depth skipped: ") + e.what());
    }
  }
  r.summary["tau_qubit"] = depth;
  if (c.numerics.cutoff_check) {
    const double d = cutoff_convergence_delta(p, c.numerics.levels());
    r.summary["cutoff_delta"] = d;
    if (d >= 1e-6) warn(r, o, "cutoff check: observables move by " + format_number(d) + " relative at cutoff + 2");
  }
  return r;
}

inline RunResult run_g2tau(const ExperimentConfig& c, const RunOptions& o) {
  const CircuitParams p = apply_tuning(c.circuit, c.tuning);
  const WorkingPoint w = effective_working_point(p, c.numerics.levels(), c.dissipation);
  const DensityMatrix rho = steady_state(w.model);
  const auto taus = c.numerics.tau_grid.values();

  RunResult r;
  r.experiment = c.experiment;
  r.table.columns = {"tau", "g2_1", "g2_2", "g2_3"};
  std::array<std::vector<double>, 3> curves;
  for (int port = 1; port <= 3; ++port) {
    try {
      curves[static_cast<std::size_t>(port - 1)] =
          g2_tau(w.model, rho, port, taus, p.gamma1, p.gamma2, w.frame, {c.numerics.rtol, c.numerics.atol});
    } catch (const UndefinedCorrelation& e) {
      warn(r, o, e.what());
    }
  }
  for (std::size_t k = 0; k < taus.size(); ++k) {
    std::vector<Cell> row{taus[k]};
    for (const auto& cv : curves) row.push_back(cv.empty() ? Cell() : Cell(cv[k]));
    r.table.add(std::move(row));
  }
  r.summary = {{"parameters", params_json(p, w.sp)}};
  return r;
}

inline RunResult run_qpd(const ExperimentConfig& c, const RunOptions& o) {
  const CircuitParams p = apply_tuning(c.circuit, c.tuning);
  const WorkingPoint w = effective_working_point(p, c.numerics.levels(), c.dissipation);
  DensityMatrix bare = DensityMatrix::maximally_mixed(w.space);
  steady_observables(w, nullptr, &bare);

  RunResult r;
  r.experiment = c.experiment;
  r.table.columns = {"resonator", "s", "re_alpha", "im_alpha", "W"};
  const auto& spec = c.numerics.qpd_grid;
  json per = json::object();
  for (int k : c.numerics.resonators) {
    const DensityMatrix single = partial_trace(bare, {k});
    json info = json::object();
    json mins = json::array(), integrals = json::array();
    for (double s : c.numerics.s_values) {
      const QpdGrid g = qpd(single, s, spec);
      mins.push_back(g.min());
      integrals.push_back(g.integral());
      for (int i = 0; i < spec.resolution; ++i)
        for (int j = 0; j < spec.resolution; ++j)
          r.table.add({double(k), s, spec.re_at(i), spec.im_at(j), g.values(i, j)});
    }
    info["s_values"] = c.numerics.s_values;
    info["min"] = mins;
    info["integral"] = integrals;
    try {
      const auto q = nonclassical_depth_qubit(single);
      info["tau_qubit"] = q.undefined ? json(nullptr) : json(q.tau);
      info["s0_qubit"] = q.undefined ? json(nullptr) : json(1.0 - 2.0 * q.tau);
    } catch (const InvalidArgument& e) {
      warn(r, o, e.what());
    }
    if (c.numerics.depth_numeric) {
      try {
        info["tau_numeric"] = nonclassical_depth_numeric(single, {c.numerics.s_tol, spec});
      } catch (const ResolutionError& e) {
        info["tau_numeric"] = nullptr;
        warn(r, o, e.what());
      }
    }
    per[std::to_string(k)] = info;
  }
  r.summary = {{"resonators", per}, {"parameters", params_json(p, w.sp)}};
  return r;
}

inline std::vector<Cell> point_row(const WorkingPoint& w) {
  const auto obs = steady_observables(w);
  return {obs.N.N1,
          obs.N.N2,
          obs.N.N3,
          obs.g2[0],
          obs.g2[1],
          obs.g2[2],
          log10_or_null(obs.g2[0]),
          log10_or_null(obs.g2[1]),
          log10_or_null(obs.g2[2]),
          obs.log_negativity};
}

inline const std::vector<std::string>& point_columns() {
  static const std::vector<std::string> cols{"N1",         "N2",         "N3",         "g2_1", "g2_2",
                                             "g2_3",       "log10_g2_1", "log10_g2_2", "log10_g2_3",
                                             "E_c"};
  return cols;
}

inline RunResult run_sweep2d(const ExperimentConfig& c, const RunOptions& o) {
  const SweepAxis& a1 = *c.numerics.axis1;
  const SweepAxis& a2 = *c.numerics.axis2;
  const auto v1 = a1.range.values(), v2 = a2.range.values();
  const int n1 = static_cast<int>(v1.size()), n2 = static_cast<int>(v2.size());
  const int width = static_cast<int>(point_columns().size());

  std::vector<std::vector<Cell>> cells(static_cast<std::size_t>(n1) * n2);
  std::vector<std::string> failures(cells.size());
  parallel_for(n1 * n2, o.jobs, [&](int idx) {
    const int i = idx / n2, j = idx % n2;
    try {
      Tuning t = with_axis_value(c.tuning, a1.parameter, v1[static_cast<std::size_t>(i)]);
      t = with_axis_value(t, a2.parameter, v2[static_cast<std::size_t>(j)]);
      cells[static_cast<std::size_t>(idx)] = point_row(effective_working_point(apply_tuning(c.circuit, t),
                                                                               c.numerics.levels(), c.dissipation));
    } catch (const Error& e) {
      cells[static_cast<std::size_t>(idx)] = std::vector<Cell>(static_cast<std::size_t>(width));
      failures[static_cast<std::size_t>(idx)] = e.what();
    }
  });

  RunResult r;
  r.experiment = c.experiment;
  r.table.columns = {to_string(a1.parameter), to_string(a2.parameter)};
  for (const auto& col : point_columns()) r.table.columns.push_back(col);
  for (int idx = 0; idx < n1 * n2; ++idx) {
    const int i = idx / n2, j = idx % n2;
    if (!failures[static_cast<std::size_t>(idx)].empty())
      warn(r, o, "point (" + format_number(v1[static_cast<std::size_t>(i)]) + ", " +
                     format_number(v2[static_cast<std::size_t>(j)]) + ") failed: " + failures[static_cast<std::size_t>(idx)]);
    std::vector<Cell> row{v1[static_cast<std::size_t>(i)], v2[static_cast<std::size_t>(j)]};
    for (const auto& cell : cells[static_cast<std::size_t>(idx)]) row.push_back(cell);
    r.table.add(std::move(row));
  }
  r.summary = {{"axis1", {{"parameter", to_string(a1.parameter)}, {"values", v1}}},
               {"axis2", {{"parameter", to_string(a2.parameter)}, {"values", v2}}},
               {"failed_points", r.warnings.size()}};
  return r;
}

inline RunResult run_negativity_vs_beta(const ExperimentConfig& c, const RunOptions& o) {
  const auto& betas = c.numerics.beta_values;
  const int n = static_cast<int>(betas.size());
  std::vector<std::vector<Cell>> cells(static_cast<std::size_t>(n));
  std::vector<std::string> failures(cells.size());
  parallel_for(n, o.jobs, [&](int i) {
    try {
      const Tuning t = with_axis_value(c.tuning, SweepParameter::beta, betas[static_cast<std::size_t>(i)]);
      cells[static_cast<std::size_t>(i)] =
          point_row(effective_working_point(apply_tuning(c.circuit, t), c.numerics.levels(), c.dissipation));
    } catch (const Error& e) {
      cells[static_cast<std::size_t>(i)] = std::vector<Cell>(point_columns().size());
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  });

  RunResult r;
  r.experiment = c.experiment;
  r.table.columns = {"beta"};
  for (const auto& col : point_columns()) r.table.columns.push_back(col);
  int best = -1;
  double best_ec = -1.0;
  const int ec_col = static_cast<int>(point_columns().size()) - 1;
  for (int i = 0; i < n; ++i) {
    if (!failures[static_cast<std::size_t>(i)].empty())
      warn(r, o, "beta = " + format_number(betas[static_cast<std::size_t>(i)]) + " failed: " + failures[static_cast<std::size_t>(i)]);
    const Cell ec = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(ec_col)];
    if (ec && *ec > best_ec) {
      best_ec = *ec;
      best = i;
    }
    std::vector<Cell> row{betas[static_cast<std::size_t>(i)]};
    for (const auto& cell : cells[static_cast<std::size_t>(i)]) row.push_back(cell);
    r.table.add(std::move(row));
  }
  r.summary = {{"argmax_beta", best >= 0 ? json(betas[static_cast<std::size_t>(best)]) : json(nullptr)},
               {"max_E_c", best >= 0 ? json(best_ec) : json(nullptr)}};
  return r;
}

// Dimensionless angular frequencies are read in units of omega_1 / (2 pi x 2500 MHz).
inline constexpr double kResonatorMHz = 2500.0;

inline RunResult run_rates_table(const ExperimentConfig& c, const RunOptions&) {
  const CircuitParams p = apply_tuning(c.circuit, c.tuning);
  const SupermodeParams sp = derive_supermodes(p);
  const double mhz_per_unit = kResonatorMHz / p.omega1;
  RunResult r;
  r.experiment = c.experiment;
  r.table.columns = {"n", "B2_0n", "rate", "rate_over_2pi_MHz"};
  for (int n : c.numerics.orders) {
    const double b2 = multiphoton_coefficient(BKind::B2, 0, n, sp.lambda);
    const double rate = multiphoton_rate(sp, n);
    r.table.add({double(n), b2, rate, rate * mhz_per_unit});
  }
  r.summary = {{"lambda", sp.lambda}, {"Gx", sp.Gx}, {"Omega_plus", sp.Omega_plus}};
  return r;
}

}  // namespace detail

inline RunResult run(const ExperimentConfig& c, const RunOptions& o = {}) {
  switch (c.experiment) {
    case ExperimentKind::evolve: return detail::run_evolve(c, o);
    case ExperimentKind::steady: return detail::run_steady(c, o);
    case ExperimentKind::g2tau: return detail::run_g2tau(c, o);
    case ExperimentKind::qpd: return detail::run_qpd(c, o);
    case ExperimentKind::sweep2d: return detail::run_sweep2d(c, o);
    case ExperimentKind::negativity_vs_beta: return detail::run_negativity_vs_beta(c, o);
    case ExperimentKind::rates_table: return detail::run_rates_table(c, o);
  }
  throw Unsupported("unknown experiment");
}

// ---------------------------------------------------------------------------
// Single-drive control experiment: eps1 = 1, eps2 = 0, g = 0 and the
// supermode splitting left at its natural value 4 Gx^2 / (3 Omega+).

struct SingleDriveReport {
  CircuitParams params;
  SupermodeParams sp;
  PortValues N;
  std::array<Cell, 3> g2{};
  bool all_below_band = false;  // every g2_i(0) < 0.1
};

inline CircuitParams single_drive_parameters(CircuitParams p) {
  p.eps1 = 1.0;
  p.eps2 = 0.0;
  p.g = 0.0;
  p.omega1 = eq6_omega1(p.omega2, 0.0, p.G1 / p.G2);
  p = with_two_photon_resonance(p);
  return with_drive_detuning(p, 0.0);
}

inline SingleDriveReport single_drive_check(const CircuitParams& p, int levels,
                                            std::optional<double> Delta2_override = std::nullopt) {
  const WorkingPoint w = effective_working_point(p, levels, true, Delta2_override);
  const auto obs = steady_observables(w);
  SingleDriveReport r{p, w.sp, obs.N, obs.g2, true};
  for (const auto& g : obs.g2) r.all_below_band = r.all_below_band && g && *g < 0.1;
  return r;
}

// ---------------------------------------------------------------------------
// Output

inline std::string output_file_name(const ExperimentConfig& c) {
  return std::string(to_string(c.experiment)) + (c.format == OutputFormat::csv ? ".csv" : ".json");
}

inline json manifest(const ExperimentConfig& c, const RunResult& r) {
  return {{"spec_version", kSpecVersion},
          {"experiment", to_string(c.experiment)},
          {"config_hash", "fnv1a64:" + hex64(config_hash(c.source))},
          {"config", c.source},
          {"solver", detail::solver_settings(c)},
          {"output", output_file_name(c)},
          {"rows", r.table.rows.size()},
          {"summary", r.summary},
          {"warnings", r.warnings}};
}

// Writes <dir>/<experiment>.{csv,json} and <dir>/manifest.json.
inline std::filesystem::path write_outputs(const ExperimentConfig& c, const RunResult& r,
                                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto data = dir / output_file_name(c);
  {
    std::ofstream out(data, std::ios::binary);
    if (c.format == OutputFormat::csv) {
      out << to_csv(r.table);
    } else {
      json doc = table_to_json(r.table);
      doc["summary"] = r.summary;
      out << doc.dump(1) << '\n';
    }
    if (!out) throw Error("cannot write " + data.string());
  }
  std::ofstream m(dir / "manifest.json", std::ios::binary);
  m << manifest(c, r).dump(2) << '\n';
  if (!m) throw Error("cannot write manifest.json in " + dir.string());
  return data;
}

}  // namespace blockade
