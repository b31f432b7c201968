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

// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "blockade/config.hpp"
#include "blockade/experiment.hpp"

using namespace blockade;
using std::numbers::pi;

namespace {

struct Check {
  bool ok = true;
  void expect(bool cond, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Check::expect(bool cond, const char* fmt, ...) {
  std::printf("    [%s] ", cond ? "ok" : "fail");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  ok = ok && cond;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  return v;
}

CircuitParams tuned(std::optional<double> Delta2, std::optional<double> theta = std::nullopt,
                    std::optional<cplx> unit_drive = std::nullopt) {
  CircuitParams c = reference_parameters();
  if (unit_drive) c.eps1 = c.eps2 = *unit_drive;
  Tuning t;
  t.Delta2 = Delta2;
  t.theta_drive = theta;
  return apply_tuning(c, t);
}

DensityMatrix ground(const HilbertSpace& s) {
  return DensityMatrix::from_state(StateVector::basis(s, {kGround, 0, 0}));
}

// Centered moving average with half-width w samples; ends are left out.
std::vector<double> envelope(const std::vector<double>& x, int w) {
  std::vector<double> out;
  for (int k = w; k + w < static_cast<int>(x.size()); ++k) {
    double s = 0.0;
    for (int j = k - w; j <= k + w; ++j) s += x[static_cast<std::size_t>(j)];
    out.push_back(s / (2 * w + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------

bool criterion1(Check& c) {
  const auto sp = derive_supermodes(reference_parameters());
  const double mhz = 2500.0 / reference_parameters().omega1;
  const double r2 = multiphoton_rate(sp, 2) * mhz, r3 = multiphoton_rate(sp, 3) * mhz;
  c.expect(r2 >= 17.1 && r2 <= 18.9, "two-photon rate/2pi = %.6f MHz in [17.1, 18.9]", r2);
  c.expect(r3 >= 1.0 && r3 <= 1.2, "three-photon rate/2pi = %.6f MHz in [1.0, 1.2]", r3);
  return c.ok;
}

bool criterion2(Check& c) {
  const auto sp = derive_supermodes(reference_parameters());
  c.expect(sp.Theta >= 17.8 && sp.Theta <= 18.2, "Theta = %.6f in [17.8, 18.2]", sp.Theta);
  const double ep = sp.eps_plus.real(), em = sp.eps_minus.real();
  c.expect(ep >= 1.37 && ep <= 1.39 && std::abs(sp.eps_plus.imag()) < 1e-12, "eps+ = %.6f in [1.37, 1.39]", ep);
  c.expect(em >= -0.037 && em <= -0.034 && std::abs(sp.eps_minus.imag()) < 1e-12,
           "eps- = %.6f in [-0.037, -0.034]", em);
  c.expect(std::abs(sp.Delta2) < 0.05, "|Delta2| = %.6f < 0.05 at g = %.1f", std::abs(sp.Delta2),
           reference_parameters().g);
  return c.ok;
}

bool criterion3(Check& c) {
  const CircuitParams p = tuned(0.0);
  const SupermodeParams sp = derive_supermodes(p);
  {
    const auto w = effective_working_point(p, Numerics{}.levels());
    const auto times = linspace(0.0, 10.0, 201);
    const auto traj = evolve(w.model, ground(w.space), times);
    double worst = 1.0;
    for (const auto& r : traj.states) {
      const auto pp = photon_probabilities(w.frame.to_bare(r), sp.beta);
      worst = std::min(worst, pp.joint(0, 0) + pp.psi1_plus);
    }
    c.expect(worst > 0.98, "min_t P(0,0) + P(psi1+) = %.6f > 0.98 (H_eff, t in [0, 10], 201 samples)", worst);
  }
  // lab-frame cross-check on a short horizon
  const int levels = 3, samples = 400;
  const double horizon = 1.0;
  const auto times = linspace(0.0, horizon, samples + 1);
  const HilbertSpace space = HilbertSpace::qubit_two_modes(levels);
  const ModeFrame sf = ModeFrame::supermode(space, sp.beta), bf = ModeFrame::bare(space);
  const IntegratorOptions io{1e-6, 1e-8};
  const auto t0 = std::chrono::steady_clock::now();
  const auto eff = evolve(LindbladModel(build_effective_hamiltonian(sp, space), default_collapse_operators(p, sf)),
                          ground(space), times, io);
  const auto lab = evolve(LindbladModel(build_lab_hamiltonian(p, space), default_collapse_operators(p, bf)),
                          ground(space), times, io);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<double> pe, pl;
  for (std::size_t k = 0; k < times.size(); ++k) {
    pe.push_back(photon_probabilities(sf.to_bare(eff.states[k]), sp.beta).psi1_plus);
    pl.push_back(photon_probabilities(lab.states[k], sp.beta).psi1_plus);
  }
  const double period = 2.0 * pi / (std::sqrt(2.0) * std::abs(sp.Theta));
  const int w = static_cast<int>(std::round(period / (horizon / samples) / 2.0));
  const auto ee = envelope(pe, w), el = envelope(pl, w);
  double diff = 0.0;
  for (std::size_t k = 0; k < ee.size(); ++k) diff = std::max(diff, std::abs(ee[k] - el[k]));
  c.expect(diff < 0.05, "lab vs H_eff P(psi1+) envelope max difference = %.4f < 0.05 (%d levels, t <= %.0f, %.1f s)",
           diff, levels, horizon, secs);
  return c.ok;
}

bool criterion4(Check& c) {
  const auto w = effective_working_point(tuned(0.0), Numerics{}.levels());
  const auto o = steady_observables(w);
  const auto& pp = o.probabilities;
  double multi = 0.0;
  for (int a = 0; a < pp.joint.rows(); ++a)
    for (int b = 0; b < pp.joint.cols(); ++b)
      if (a + b >= 2) multi = std::max(multi, pp.joint(a, b));
  const double m1 = 1.0 - pp.mode1(0) - pp.mode1(1), m2 = 1.0 - pp.mode2(0) - pp.mode2(1);
  c.expect(multi < 5e-3, "max P(n1,n2) with n1+n2 >= 2 = %.3e < 5e-3", multi);
  c.expect(m1 < 5e-3, "P1(n >= 2) = %.3e < 5e-3", m1);
  c.expect(m2 < 5e-3, "P2(n >= 2) = %.3e < 5e-3", m2);
  return c.ok;
}

bool criterion5(Check& c) {
  const auto w = effective_working_point(tuned(0.0), Numerics{}.levels());
  DensityMatrix bare = DensityMatrix::maximally_mixed(w.space);
  steady_observables(w, nullptr, &bare);
  const DensityMatrix r1 = partial_trace(bare, {1}), r2 = partial_trace(bare, {2});
  const QpdGridSpec grid;  // 201 x 201 over [-3, 3]^2

  const auto q = nonclassical_depth_qubit(r1);
  c.expect(!q.undefined && std::abs(q.tau - 0.23) <= 0.01, "qubit-formula tau = %.5f in 0.23 +- 0.01", q.tau);
  const double s0 = 1.0 - 2.0 * q.tau;
  c.expect(std::abs(s0 - 0.537) <= 0.02, "s0 = %.5f in 0.537 +- 0.02", s0);
  const double tn = nonclassical_depth_numeric(r1, {5e-3, grid});
  c.expect(tn >= 0.22 && tn <= 0.26, "numeric tau = %.5f in [0.22, 0.26]", tn);
  const QpdGrid w0 = qpd(r1, 0.0, grid), w54 = qpd(r1, 0.54, grid);
  c.expect(w0.min() >= -1e-12, "min W(s=0) = %.3e >= 0 (floor -1e-12)", w0.min());
  c.expect(w54.min() < 0.0, "min W(s=0.54) = %.3e < 0", w54.min());
  for (double s : {0.0, 0.5, 0.54}) {
    const QpdGrid a = qpd(r1, s, grid), b = qpd(r2, s, grid);
    const double diff = (a.values - b.values).cwiseAbs().maxCoeff();
    c.expect(diff < 0.05, "resonator 1 vs 2 max pointwise QPD difference at s = %.2f: %.4f < 0.05 (peak %.3f)", s,
             diff, a.values.maxCoeff());
  }
  return c.ok;
}

bool criterion6(Check& c) {
  const CircuitParams p = tuned(0.0);
  const auto w = effective_working_point(p, Numerics{}.levels());
  const DensityMatrix rho = steady_state(w.model);
  const auto taus = linspace(0.0, 10.0, 201);
  for (int port = 1; port <= 3; ++port) {
    const auto g = g2_tau(w.model, rho, port, taus, p.gamma1, p.gamma2, w.frame);
    c.expect(g[0] < 0.1, "port %d: g2(0) = %.5f < 0.1", port, g[0]);
    c.expect(g[1] > g[0], "port %d: g2(%.2f) = %.5f > g2(0) (dip at zero delay)", port, taus[1], g[1]);
    c.expect(std::abs(g.back() - 1.0) <= 0.05, "port %d: g2(%.0f) = %.5f in 1 +- 0.05", port, taus.back(), g.back());
  }
  return c.ok;
}

// Widest contiguous run of theta values around theta = 0 with log10 g2_1 < -1 at Delta+ = 0.
double dip_width(const Table& t) {
  const int cd = t.column("Delta_plus"), ct = t.column("theta_drive"), cg = t.column("log10_g2_1");
  std::vector<std::pair<double, bool>> line;
  for (const auto& row : t.rows)
    if (*row[static_cast<std::size_t>(cd)] == 0.0) {
      const Cell& g = row[static_cast<std::size_t>(cg)];
      line.emplace_back(*row[static_cast<std::size_t>(ct)], g && *g < -1.0);
    }
  std::size_t mid = 0;
  for (std::size_t k = 0; k < line.size(); ++k)
    if (std::abs(line[k].first) < std::abs(line[mid].first)) mid = k;
  if (!line[mid].second) return 0.0;
  std::size_t lo = mid, hi = mid;
  while (lo > 0 && line[lo - 1].second) --lo;
  while (hi + 1 < line.size() && line[hi + 1].second) ++hi;
  return line[hi].first - line[lo].first;
}

bool criterion7(Check& c) {
  auto sweep = [](double Delta2) {
    json doc = {{"spec_version", 1},
                {"experiment", "sweep2d"},
                {"circuit", {{"eps1", 1.0}, {"eps2", 1.0}}},
                {"tuning", {{"Delta2", Delta2}}},
                {"numerics",
                 {{"axis1", {{"parameter", "Delta_plus"}, {"start", -20.0}, {"stop", 20.0}, {"count", 21}}},
                  {"axis2", {{"parameter", "theta_drive"}, {"start", -pi}, {"stop", pi}, {"count", 21}}}}}};
    RunOptions o;
    o.jobs = default_jobs();
    return run(parse_config(doc), o);
  };
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult deg = sweep(0.0), nondeg = sweep(10.0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(deg.warnings.empty() && nondeg.warnings.empty(), "21 x 21 sweeps at Delta2 = 0 and 10 (%.1f s, %d jobs)",
           secs, default_jobs());
  const double wd = dip_width(deg.table), wn = dip_width(nondeg.table);
  c.expect(wn > wd, "theta width of log10 g2_1 < -1 at Delta+ = 0: nondegenerate %.4f > degenerate %.4f", wn, wd);

  const Table& t = deg.table;
  const int cd = t.column("Delta_plus"), ct = t.column("theta_drive"), cn = t.column("N3");
  double n_edge = 0.0, n_center = 0.0;
  for (const auto& row : t.rows) {
    if (*row[static_cast<std::size_t>(cd)] != 0.0) continue;
    const double th = *row[static_cast<std::size_t>(ct)], n3 = *row[static_cast<std::size_t>(cn)];
    if (std::abs(std::abs(th) - pi) < 1e-12) n_edge = std::max(n_edge, n3);
    if (th == 0.0) n_center = n3;
  }
  c.expect(n_edge < 1e-6 * n_center, "degenerate N3(theta = +-pi) = %.3e vanishes (N3(0) = %.4f)", n_edge, n_center);
  return c.ok;
}

bool criterion8(Check& c) {
  json doc = {{"spec_version", 1},
              {"experiment", "negativity_vs_beta"},
              {"circuit", {{"eps1", 1.0}, {"eps2", 1.0}}},
              {"tuning", {{"Delta2", 10.0}, {"theta_drive", 0.0}, {"Delta_plus", 0.0}}},
              {"numerics", {{"beta_values", {0.5, 0.75, 1.0, 1.5, 2.0}}}}};
  const RunResult r = run(parse_config(doc));
  const int ce = r.table.column("E_c");
  for (const auto& row : r.table.rows)
    std::printf("    beta = %-5g E_c = %.6f\n", *row[0], row[static_cast<std::size_t>(ce)].value_or(NAN));
  const double best = r.summary.at("argmax_beta").is_null() ? NAN : r.summary.at("argmax_beta").get<double>();
  const double ec = r.summary.at("max_E_c").is_null() ? NAN : r.summary.at("max_E_c").get<double>();
  c.expect(best == 1.0, "argmax_beta E_c = %g", best);
  c.expect(ec > 0.0, "E_c(1) = %.6f > 0", ec);
  return c.ok;
}

bool criterion9(Check& c) {
  std::mt19937_64 rng(9);
  const CircuitParams p = tuned(0.0);

  {  // dynamics invariants
    const auto w = effective_working_point(p, 5);
    const auto traj = evolve(w.model, ground(w.space), linspace(0.0, 10.0, 41));
    double tr = 0.0, herm = 0.0, neg = 0.0;
    for (const auto& r : traj.states) {
      const Matrix& m = r.matrix();
      tr = std::max(tr, std::abs(m.trace() - 1.0));
      herm = std::max(herm, (m - m.adjoint()).cwiseAbs().maxCoeff());
      neg = std::min(neg, r.min_eigenvalue());
    }
    c.expect(tr < 1e-7 && herm < 1e-8 && neg > -1e-6,
             "evolution: trace err %.1e < 1e-7, Hermiticity err %.1e < 1e-8, min eigenvalue %.1e > -1e-6", tr, herm,
             neg);
  }
  {  // trace-zero generator
    const auto w = effective_working_point(p, 3);
    const SuperOperator l = build_liouvillian(w.model);
    std::normal_distribution<double> n(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const int d = w.space.total_dim();
      Matrix g(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
      Matrix r = g * g.adjoint();
      r /= r.trace();
      const DensityMatrix rho(Operator(w.space, r));
      worst = std::max(worst, std::abs(devectorize(l.apply(vectorize(rho)), w.space).trace()) / l.max_abs());
    }
    c.expect(worst < 1e-10, "Liouvillian trace of output / max|L| = %.1e < 1e-10", worst);
  }
  const auto w = effective_working_point(p, Numerics{}.levels());
  SteadyStateReport rep;
  const DensityMatrix rho = steady_state(w.model, {}, &rep);
  c.expect(rep.residual < 1e-10, "steady-state residual = %.1e < 1e-10", rep.residual);
  {
    const auto g0 = g2_zero(rho, p.gamma1, p.gamma2, w.frame);
    double worst = 0.0;
    for (int port = 1; port <= 3; ++port) {
      const auto g = g2_tau(w.model, rho, port, {0.0, 0.5}, p.gamma1, p.gamma2, w.frame);
      worst = std::max(worst, std::abs(g[0] - g0[static_cast<std::size_t>(port - 1)]));
    }
    c.expect(worst < 1e-8, "g2(tau = 0) regression vs direct = %.1e < 1e-8", worst);
  }
  {
    const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
    double worst = 0.0;
    for (double beta : {0.5, 1.0, 2.0}) {
      SupermodeParams sp;
      sp.beta = beta;
      const auto ops = supermode_operators(s, beta);
      const Operator nplus = ops.A_plus.adjoint() * ops.A_plus;
      const Operator pairs = ops.A_plus.adjoint() * ops.A_plus.adjoint() * ops.A_plus * ops.A_plus;
      const auto m1 = supermode_state(sp, s, SupermodeState::psi1_minus);
      const auto m2 = supermode_state(sp, s, SupermodeState::psi2_minus);
      worst = std::max(worst, std::abs(m1.amplitudes().dot(nplus.matrix() * m1.amplitudes())));
      worst = std::max(worst, std::abs(m2.amplitudes().dot(pairs.matrix() * m2.amplitudes())));
    }
    c.expect(worst < 1e-12, "selection rules <psi1-|A+^dag A+|psi1->, <psi2-|A+^dag2 A+^2|psi2-> = %.1e < 1e-12",
             worst);
  }
  {
    Matrix m = Matrix::Zero(6, 6);
    m(0, 0) = 1.0;
    const QpdGridSpec spec{2.0, 2.0, 41};
    const QpdGrid g = qpd(DensityMatrix(Operator(HilbertSpace({6}), m)), 0.0, spec);
    double worst = 0.0;
    for (int i = 0; i < spec.resolution; ++i)
      for (int j = 0; j < spec.resolution; ++j) {
        const cplx a(spec.re_at(i), spec.im_at(j));
        worst = std::max(worst, std::abs(g.values(i, j) - 2.0 / pi * std::exp(-2.0 * std::norm(a))));
      }
    c.expect(worst < 1e-10, "vacuum Wigner closed form max error = %.1e < 1e-10", worst);
  }
  {
    const HilbertSpace two({3, 3});
    Vector v = Vector::Zero(9);
    v(two.index_of({1, 0})) = v(two.index_of({0, 1})) = 1.0 / std::sqrt(2.0);
    const double ec = logarithmic_negativity(DensityMatrix::from_state(StateVector(two, v))).log_negativity;
    c.expect(std::abs(ec - 1.0) < 1e-10, "Bell-state E_c = %.15f (1 within 1e-10)", ec);
  }
  {
    const double d = cutoff_convergence_delta(p, Numerics{}.levels());
    c.expect(d < 1e-6, "cutoff %d vs %d relative change of N, g2(0) = %.2e < 1e-6", Numerics{}.fock_cutoff,
             Numerics{}.fock_cutoff + 2, d);
  }
  return c.ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool(Check&)>>> criteria = {
      {"multiphoton rates", criterion1},         {"effective coupling", criterion2},
      {"truncation fidelity", criterion3},       {"steady-state blockade", criterion4},
      {"nonclassical depth", criterion5},        {"photon statistics", criterion6},
      {"drive detuning/phase sweep", criterion7}, {"entanglement vs coupling ratio", criterion8},
      {"property suites", criterion9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::printf("criterion %zu: %s\n", i + 1, criteria[i].first);
    Check c;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = criteria[i].second(c);
    } catch (const std::exception& e) {
      std::printf("    [fail] exception: %s\n", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s) [%.1f s]\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first, secs);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
