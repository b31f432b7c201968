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

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "blockade/circuit_model.hpp"
#include "blockade/errors.hpp"
#include "blockade/phase_space.hpp"

namespace blockade {

using json = nlohmann::json;

inline constexpr int kSpecVersion = 1;

enum class ExperimentKind { evolve, steady, g2tau, qpd, sweep2d, negativity_vs_beta, rates_table };
enum class HamiltonianKind { effective, rotating, lab };
enum class OutputFormat { csv, json };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::evolve: return "evolve";
    case ExperimentKind::steady: return "steady";
    case ExperimentKind::g2tau: return "g2tau";
    case ExperimentKind::qpd: return "qpd";
    case ExperimentKind::sweep2d: return "sweep2d";
    case ExperimentKind::negativity_vs_beta: return "negativity_vs_beta";
    case ExperimentKind::rates_table: return "rates_table";
  }
  return "?";
}

inline const char* to_string(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::effective: return "effective";
    case HamiltonianKind::rotating: return "rotating";
    case HamiltonianKind::lab: return "lab";
  }
  return "?";
}

struct LinearAxis {
  double start = 0.0;
  double stop = 0.0;
  int count = 2;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      v[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return v;
  }
};

enum class SweepParameter { Delta_plus, theta_drive, Delta2, beta };

inline const char* to_string(SweepParameter k) {
  switch (k) {
    case SweepParameter::Delta_plus: return "Delta_plus";
    case SweepParameter::theta_drive: return "theta_drive";
    case SweepParameter::Delta2: return "Delta2";
    case SweepParameter::beta: return "beta";
  }
  return "?";
}

struct SweepAxis {
  SweepParameter parameter = SweepParameter::Delta_plus;
  LinearAxis range;
};

// Knobs applied on top of the circuit, in this order: beta, Delta2,
// theta_drive, two-photon resonance, Delta_plus.
struct Tuning {
  std::optional<double> beta;
  std::optional<double> Delta2;
  std::optional<double> theta_drive;
  bool two_photon_resonance = true;
  std::optional<double> Delta_plus = 0.0;
};

struct Numerics {
  int fock_cutoff = 8;  // maximum photon number per mode
  double rtol = 1e-8;
  double atol = 1e-10;
  LinearAxis t_grid{0.0, 10.0, 201};
  LinearAxis tau_grid{0.0, 10.0, 201};
  QpdGridSpec qpd_grid;
  std::vector<double> s_values{0.0, 0.5, 0.54};
  double s_tol = 5e-3;
  bool depth_numeric = true;
  std::vector<int> resonators{1, 2};
  std::optional<SweepAxis> axis1, axis2;
  std::vector<double> beta_values{0.5, 0.75, 1.0, 1.5, 2.0};
  std::vector<int> orders{2, 3};
  bool cutoff_check = false;

  int levels() const { return fock_cutoff + 1; }
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::steady;
  CircuitParams circuit;  // before tuning
  Tuning tuning;
  HamiltonianKind hamiltonian = HamiltonianKind::effective;
  bool dissipation = true;
  Numerics numerics;
  std::string output_path = "out";
  OutputFormat format = OutputFormat::csv;
  json source;  // the document as parsed
};

// Circuit with every tuning knob applied.
inline CircuitParams apply_tuning(CircuitParams p, const Tuning& t) {
  if (t.beta) p = with_coupling_ratio(p, *t.beta);
  if (t.Delta2) p = with_supermode_splitting(p, *t.Delta2);
  if (t.theta_drive) p = with_drive_phase(p, *t.theta_drive);
  if (t.two_photon_resonance) p = with_two_photon_resonance(p);
  if (t.Delta_plus) p = with_drive_detuning(p, *t.Delta_plus);
  return p;
}

inline Tuning with_axis_value(Tuning t, SweepParameter which, double v) {
  switch (which) {
    case SweepParameter::Delta_plus: t.Delta_plus = v; break;
    case SweepParameter::theta_drive: t.theta_drive = v; break;
    case SweepParameter::Delta2: t.Delta2 = v; break;
    case SweepParameter::beta: t.beta = v; break;
  }
  return t;
}

// FNV-1a over the canonical (key-sorted, compact) serialization.
inline std::uint64_t config_hash(const json& doc) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

// Collects every schema problem before giving up.
class Reader {
 public:
  std::vector<std::string> errors;

  void only(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!ok.count(it.key())) errors.push_back(where + it.key() + ": unknown field");
  }

  const json* object(const json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) return nullptr;
    const json& v = parent.at(key);
    if (!v.is_object()) {
      errors.push_back(where + key + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  void number(const json& obj, const char* key, const std::string& where, double& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      errors.push_back(where + key + ": expected a finite number");
      return;
    }
    out = v.get<double>();
  }

  void number(const json& obj, const char* key, const std::string& where, std::optional<double>& out) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    const auto before = errors.size();
    number(obj, key, where, v);
    if (errors.size() == before) out = v;
  }

  void integer(const json& obj, const char* key, const std::string& where, int& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      errors.push_back(where + key + ": expected an integer");
      return;
    }
    out = v.get<int>();
  }

  void boolean(const json& obj, const char* key, const std::string& where, bool& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      errors.push_back(where + key + ": expected true or false");
      return;
    }
    out = v.get<bool>();
  }

  // number, or {"re": x, "im": y}
  void complex(const json& obj, const char* key, const std::string& where, cplx& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_number()) {
      out = v.get<double>();
      return;
    }
    if (v.is_object()) {
      const std::string w = where + key + ".";
      only(v, w, {"re", "im"});
      double re = 0.0, im = 0.0;
      number(v, "re", w, re);
      number(v, "im", w, im);
      out = {re, im};
      return;
    }
    errors.push_back(where + key + ": expected a number or {\"re\", \"im\"}");
  }

  void numbers(const json& obj, const char* key, const std::string& where, std::vector<double>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty()) {
      errors.push_back(where + key + ": expected a nonempty array of numbers");
      return;
    }
    std::vector<double> tmp;
    for (const auto& e : v) {
      if (!e.is_number()) {
        errors.push_back(where + key + ": expected a nonempty array of numbers");
        return;
      }
      tmp.push_back(e.get<double>());
    }
    out = std::move(tmp);
  }

  void integers(const json& obj, const char* key, const std::string& where, std::vector<int>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty()) {
      errors.push_back(where + key + ": expected a nonempty array of integers");
      return;
    }
    std::vector<int> tmp;
    for (const auto& e : v) {
      if (!e.is_number_integer()) {
        errors.push_back(where + key + ": expected a nonempty array of integers");
        return;
      }
      tmp.push_back(e.get<int>());
    }
    out = std::move(tmp);
  }

  template <class Enum>
  void choice(const json& obj, const char* key, const std::string& where,
              std::initializer_list<std::pair<const char*, Enum>> options, Enum& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_string()) {
      for (const auto& [name, value] : options)
        if (v.get<std::string>() == name) {
          out = value;
          return;
        }
    }
    std::string msg = where + key + ": expected one of";
    for (const auto& o : options) msg += std::string(" ") + o.first;
    errors.push_back(msg);
  }

  void axis(const json& obj, const char* key, const std::string& where, LinearAxis& out, int min_count) {
    const json* a = object(obj, key, where);
    if (!a) return;
    const std::string w = where + key + ".";
    only(*a, w, {"start", "stop", "count"});
    number(*a, "start", w, out.start);
    number(*a, "stop", w, out.stop);
    integer(*a, "count", w, out.count);
    if (out.count < min_count) errors.push_back(w + "count: must be >= " + std::to_string(min_count));
  }

  void sweep_axis(const json& obj, const char* key, const std::string& where, std::optional<SweepAxis>& out) {
    const json* a = object(obj, key, where);
    if (!a) return;
    const std::string w = where + key + ".";
    only(*a, w, {"parameter", "start", "stop", "count"});
    SweepAxis s;
    s.range.count = 0;
    if (!a->contains("parameter")) errors.push_back(w + "parameter: required");
    choice<SweepParameter>(*a, "parameter", w,
                           {{"Delta_plus", SweepParameter::Delta_plus},
                            {"theta_drive", SweepParameter::theta_drive},
                            {"Delta2", SweepParameter::Delta2},
                            {"beta", SweepParameter::beta}},
                           s.parameter);
    number(*a, "start", w, s.range.start);
    number(*a, "stop", w, s.range.stop);
    integer(*a, "count", w, s.range.count);
    if (s.range.count < 2) errors.push_back(w + "count: sweep axes need count >= 2");
    out = s;
  }
};

}  // namespace detail

// Parses and checks a config document; throws ValidationError listing every
// offending field.
inline ExperimentConfig parse_config(const json& doc) {
  detail::Reader r;
  ExperimentConfig c;
  c.source = doc;
  if (!doc.is_object()) throw ValidationError({"<root>: expected a JSON object"});

  r.only(doc, "", {"spec_version", "experiment", "circuit", "tuning", "model", "numerics", "output"});
  if (!doc.contains("spec_version")) {
    r.errors.emplace_back("spec_version: required");
  } else if (!doc.at("spec_version").is_number_integer() || doc.at("spec_version").get<int>() != kSpecVersion) {
    r.errors.push_back("spec_version: must be " + std::to_string(kSpecVersion));
  }
  if (!doc.contains("experiment")) r.errors.emplace_back("experiment: required");
  r.choice<ExperimentKind>(doc, "experiment", "",
                           {{"evolve", ExperimentKind::evolve},
                            {"steady", ExperimentKind::steady},
                            {"g2tau", ExperimentKind::g2tau},
                            {"qpd", ExperimentKind::qpd},
                            {"sweep2d", ExperimentKind::sweep2d},
                            {"negativity_vs_beta", ExperimentKind::negativity_vs_beta},
                            {"rates_table", ExperimentKind::rates_table}},
                           c.experiment);

  // circuit: every field optional, defaults from the reference working point
  const CircuitParams ref = reference_parameters();
  c.circuit = ref;
  bool explicit_omega_q = false, explicit_omega_d = false;
  if (const json* j = r.object(doc, "circuit", "")) {
    const std::string w = "circuit.";
    r.only(*j, w,
           {"omega1", "omega2", "g", "G1", "G2", "theta_mix", "omega_q", "eps1", "eps2", "omega_d", "gamma1",
            "gamma2", "Gamma", "Gamma_f"});
    r.number(*j, "omega1", w, c.circuit.omega1);
    r.number(*j, "omega2", w, c.circuit.omega2);
    r.number(*j, "g", w, c.circuit.g);
    r.number(*j, "G1", w, c.circuit.G1);
    r.number(*j, "G2", w, c.circuit.G2);
    r.number(*j, "theta_mix", w, c.circuit.theta_mix);
    r.number(*j, "omega_q", w, c.circuit.omega_q);
    r.complex(*j, "eps1", w, c.circuit.eps1);
    r.complex(*j, "eps2", w, c.circuit.eps2);
    r.number(*j, "omega_d", w, c.circuit.omega_d);
    r.number(*j, "gamma1", w, c.circuit.gamma1);
    r.number(*j, "gamma2", w, c.circuit.gamma2);
    r.number(*j, "Gamma", w, c.circuit.Gamma);
    r.number(*j, "Gamma_f", w, c.circuit.Gamma_f);
    explicit_omega_q = j->contains("omega_q");
    explicit_omega_d = j->contains("omega_d");
  }
  for (const auto& e : validate(c.circuit)) r.errors.push_back("circuit." + e);

  if (explicit_omega_q) c.tuning.two_photon_resonance = false;
  if (explicit_omega_d) c.tuning.Delta_plus.reset();
  if (const json* j = r.object(doc, "tuning", "")) {
    const std::string w = "tuning.";
    r.only(*j, w, {"beta", "Delta2", "theta_drive", "two_photon_resonance", "Delta_plus"});
    r.number(*j, "beta", w, c.tuning.beta);
    r.number(*j, "Delta2", w, c.tuning.Delta2);
    r.number(*j, "theta_drive", w, c.tuning.theta_drive);
    r.boolean(*j, "two_photon_resonance", w, c.tuning.two_photon_resonance);
    r.number(*j, "Delta_plus", w, c.tuning.Delta_plus);
    if (explicit_omega_q && c.tuning.two_photon_resonance)
      r.errors.emplace_back("tuning.two_photon_resonance: conflicts with an explicit circuit.omega_q");
    if (explicit_omega_d && c.tuning.Delta_plus)
      r.errors.emplace_back("tuning.Delta_plus: conflicts with an explicit circuit.omega_d");
    if (c.tuning.beta && !(*c.tuning.beta > 0.0)) r.errors.emplace_back("tuning.beta: must be > 0");
  }

  if (const json* j = r.object(doc, "model", "")) {
    const std::string w = "model.";
    r.only(*j, w, {"hamiltonian", "dissipation"});
    r.choice<HamiltonianKind>(*j, "hamiltonian", w,
                              {{"effective", HamiltonianKind::effective},
                               {"rotating", HamiltonianKind::rotating},
                               {"lab", HamiltonianKind::lab}},
                              c.hamiltonian);
    r.boolean(*j, "dissipation", w, c.dissipation);
  }

  Numerics& n = c.numerics;
  if (const json* j = r.object(doc, "numerics", "")) {
    const std::string w = "numerics.";
    r.only(*j, w,
           {"fock_cutoff", "rtol", "atol", "t_grid", "tau_grid", "qpd_grid", "s_values", "s_tol", "depth_numeric",
            "resonators", "axis1", "axis2", "beta_values", "orders", "cutoff_check"});
    r.integer(*j, "fock_cutoff", w, n.fock_cutoff);
    r.number(*j, "rtol", w, n.rtol);
    r.number(*j, "atol", w, n.atol);
    r.axis(*j, "t_grid", w, n.t_grid, 1);
    r.axis(*j, "tau_grid", w, n.tau_grid, 1);
    if (const json* q = r.object(*j, "qpd_grid", w)) {
      const std::string wq = w + "qpd_grid.";
      r.only(*q, wq, {"re_half_width", "im_half_width", "resolution"});
      r.number(*q, "re_half_width", wq, n.qpd_grid.re_half_width);
      r.number(*q, "im_half_width", wq, n.qpd_grid.im_half_width);
      r.integer(*q, "resolution", wq, n.qpd_grid.resolution);
      if (n.qpd_grid.resolution < 2) r.errors.push_back(wq + "resolution: must be >= 2");
      if (!(n.qpd_grid.re_half_width > 0.0) || !(n.qpd_grid.im_half_width > 0.0))
        r.errors.push_back(wq + "half widths must be > 0");
    }
    r.numbers(*j, "s_values", w, n.s_values);
    r.number(*j, "s_tol", w, n.s_tol);
    r.boolean(*j, "depth_numeric", w, n.depth_numeric);
    r.integers(*j, "resonators", w, n.resonators);
    r.sweep_axis(*j, "axis1", w, n.axis1);
    r.sweep_axis(*j, "axis2", w, n.axis2);
    r.numbers(*j, "beta_values", w, n.beta_values);
    r.integers(*j, "orders", w, n.orders);
    r.boolean(*j, "cutoff_check", w, n.cutoff_check);
  }
  if (n.fock_cutoff < 3) r.errors.emplace_back("numerics.fock_cutoff: must be >= 3");
  if (!(n.rtol > 0.0)) r.errors.emplace_back("numerics.rtol: must be > 0");
  if (!(n.atol > 0.0)) r.errors.emplace_back("numerics.atol: must be > 0");
  for (double s : n.s_values)
    if (!(s >= -1.0 && s < 1.0)) r.errors.emplace_back("numerics.s_values: every s must lie in [-1, 1)");
  if (!(n.s_tol > 0.0 && n.s_tol < 1.0)) r.errors.emplace_back("numerics.s_tol: must lie in (0, 1)");
  for (int k : n.resonators)
    if (k != 1 && k != 2) r.errors.emplace_back("numerics.resonators: entries must be 1 or 2");
  for (double b : n.beta_values)
    if (!(b > 0.0)) r.errors.emplace_back("numerics.beta_values: entries must be > 0");
  for (int k : n.orders)
    if (k < 1) r.errors.emplace_back("numerics.orders: entries must be >= 1");
  if (n.t_grid.count >= 2 && !(n.t_grid.stop > n.t_grid.start))
    r.errors.emplace_back("numerics.t_grid: stop must exceed start");
  if (n.tau_grid.start < 0.0) r.errors.emplace_back("numerics.tau_grid.start: must be >= 0");
  if (n.tau_grid.count >= 2 && !(n.tau_grid.stop > n.tau_grid.start))
    r.errors.emplace_back("numerics.tau_grid: stop must exceed start");
  if (c.experiment == ExperimentKind::sweep2d) {
    if (!n.axis1) r.errors.emplace_back("numerics.axis1: required for sweep2d");
    if (!n.axis2) r.errors.emplace_back("numerics.axis2: required for sweep2d");
    if (n.axis1 && n.axis2 && n.axis1->parameter == n.axis2->parameter)
      r.errors.emplace_back("numerics.axis2.parameter: must differ from axis1");
  }
  if (c.hamiltonian != HamiltonianKind::effective && c.experiment != ExperimentKind::evolve)
    r.errors.emplace_back("model.hamiltonian: only evolve supports rotating or lab");

  if (const json* j = r.object(doc, "output", "")) {
    const std::string w = "output.";
    r.only(*j, w, {"path", "format"});
    if (j->contains("path")) {
      if (!j->at("path").is_string() || j->at("path").get<std::string>().empty())
        r.errors.emplace_back("output.path: expected a nonempty string");
      else
        c.output_path = j->at("path").get<std::string>();
    }
    r.choice<OutputFormat>(*j, "format", w, {{"csv", OutputFormat::csv}, {"json", OutputFormat::json}}, c.format);
  }

  // the tuned working point must satisfy the circuit constraints
  if (r.errors.empty() && c.experiment != ExperimentKind::sweep2d &&
      c.experiment != ExperimentKind::negativity_vs_beta) {
    try {
      derive_supermodes(apply_tuning(c.circuit, c.tuning));
    } catch (const Error& e) {
      r.errors.push_back(std::string("circuit: ") + e.what());
    }
  }

  if (!r.errors.empty()) throw ValidationError(r.errors);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({path + ": cannot open"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError({path + ": " + e.what()});
  }
  return parse_config(doc);
}

}  // namespace blockade
