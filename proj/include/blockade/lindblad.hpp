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

// Markovian master equation
//
//   d rho/dt = -i [H, rho] + sum_k rate_k D[B_k] rho,
//   D[B] rho = B rho B^dag - 1/2 {B^dag B, rho},
//
// its steady state, the three-port input-output observables and two-time
// intensity correlations through the quantum regression theorem.

#pragma once

#include <Eigen/UmfPackSupport>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "blockade/circuit_model.hpp"
#include "blockade/errors.hpp"
#include "blockade/fockspace.hpp"

namespace blockade {

struct CollapseOperator {
  Operator op;
  double rate;
};

class LindbladModel {
 public:
  LindbladModel(TimeDependentHamiltonian h, std::vector<CollapseOperator> collapse)
      : h_(std::move(h)), collapse_(std::move(collapse)) {
    for (const auto& c : collapse_) {
      require_same_space(h_.space(), c.op.space(), "LindbladModel");
      if (!(c.rate >= 0.0)) throw InvalidArgument("collapse rates must be nonnegative");
    }
  }

  LindbladModel(const Operator& h, std::vector<CollapseOperator> collapse)
      : LindbladModel(static_hamiltonian(h), std::move(collapse)) {}

  const HilbertSpace& space() const noexcept { return h_.space(); }
  const TimeDependentHamiltonian& hamiltonian() const noexcept { return h_; }
  const std::vector<CollapseOperator>& collapse_ops() const noexcept { return collapse_; }
  bool is_static() const { return h_.is_static(); }

 private:
  static TimeDependentHamiltonian static_hamiltonian(const Operator& h) {
    TimeDependentHamiltonian t(h.space());
    t.add(h);
    return t;
  }

  TimeDependentHamiltonian h_;
  std::vector<CollapseOperator> collapse_;
};

// {(sigma-, Gamma), (sigma_z, Gamma_f / 2), (a1, gamma1), (a2, gamma2)}; zero rates dropped.
// With gamma1 == gamma2 in the supermode frame the two resonator channels are
// rewritten as (A+, gamma), (A-, gamma): the cross terms of D[a1] + D[a2]
// cancel, so the generator is identical and stays tensor-separable.
inline std::vector<CollapseOperator> default_collapse_operators(const CircuitParams& p, const ModeFrame& frame) {
  const HilbertSpace& s = frame.space();
  std::vector<CollapseOperator> out;
  if (p.Gamma > 0.0) out.push_back({embed(pauli(Pauli::minus), s, 0), p.Gamma});
  if (p.Gamma_f > 0.0) out.push_back({embed(pauli(Pauli::z), s, 0), 0.5 * p.Gamma_f});
  if (frame.is_supermode() && p.gamma1 == p.gamma2) {
    if (p.gamma1 > 0.0) {
      const int n = s.size();
      out.push_back({embed(annihilation(s.dim(n - 2)), s, n - 2), p.gamma1});
      out.push_back({embed(annihilation(s.dim(n - 1)), s, n - 1), p.gamma1});
    }
    return out;
  }
  if (p.gamma1 > 0.0) out.push_back({frame.a1(), p.gamma1});
  if (p.gamma2 > 0.0) out.push_back({frame.a2(), p.gamma2});
  return out;
}

// -i (spre(H) - spost(H))
inline SuperOperator hamiltonian_generator(const Operator& h) {
  return cplx(0.0, -1.0) * spre(h) + cplx(0.0, 1.0) * spost(h);
}

inline SuperOperator dissipator(const Operator& b) {
  const Operator bdb = b.adjoint() * b;
  return spre(b) * spost(b.adjoint()) + cplx(-0.5) * spre(bdb) + cplx(-0.5) * spost(bdb);
}

inline SuperOperator build_liouvillian(const LindbladModel& model) {
  if (!model.is_static())
    throw Unsupported("build_liouvillian needs a static Hamiltonian; evolve time-dependent models directly");
  SuperOperator l = hamiltonian_generator(model.hamiltonian().static_part());
  for (const auto& c : model.collapse_ops())
    if (c.rate > 0.0) l += cplx(c.rate) * dissipator(c.op);
  return l;
}

// ---------------------------------------------------------------------------
// Time evolution

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 picks one from the generator norm
};

namespace detail {

using OdeState = std::vector<cplx>;

// L(t) = L0 + sum_k f_k(t) L_k acting on column-stacked states.
struct Generator {
  SparseMatrix constant;
  std::vector<std::pair<SparseMatrix, std::function<cplx(double)>>> driven;

  double scale() const {
    double m = 0.0;
    auto upd = [&](const SparseMatrix& s) {
      for (int k = 0; k < s.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(s, k); it; ++it) m = std::max(m, std::abs(it.value()));
    };
    upd(constant);
    for (const auto& d : driven) upd(d.first);
    return m;
  }
};

inline Generator make_generator(const LindbladModel& model) {
  Generator gen;
  const auto& h = model.hamiltonian();
  SuperOperator l0 = hamiltonian_generator(h.static_part());
  for (const auto& c : model.collapse_ops())
    if (c.rate > 0.0) l0 += cplx(c.rate) * dissipator(c.op);
  gen.constant = l0.matrix();
  for (const auto& t : h.terms())
    if (t.coeff) gen.driven.emplace_back(hamiltonian_generator(t.op).matrix(), t.coeff);
  return gen;
}

class GeneratorRhs {
 public:
  explicit GeneratorRhs(const Generator& g) : g_(&g), tmp_(g.constant.rows()) {}

  void operator()(const OdeState& x, OdeState& dxdt, double t) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const Vector> xm(x.data(), n);
    Eigen::Map<Vector> dm(dxdt.data(), n);
    dm.noalias() = g_->constant * xm;
    for (const auto& [op, f] : g_->driven) {
      tmp_.noalias() = op * xm;
      dm += f(t) * tmp_;
    }
  }

 private:
  const Generator* g_;
  Vector tmp_;
};

// Dormand-Prince 5(4) with dense output, sampled at `times` (times[0] = start).
inline std::vector<Vector> propagate(const Generator& gen, const Vector& x0, const std::vector<double>& times,
                                     const IntegratorOptions& opt) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InvalidArgument("time grid must be strictly increasing");

  std::vector<Vector> out;
  out.reserve(times.size());
  if (times.size() == 1) {
    out.push_back(x0);
    return out;
  }

  namespace odeint = boost::numeric::odeint;
  OdeState x(x0.data(), x0.data() + x0.size());
  GeneratorRhs rhs(gen);
  const double span = times.back() - times.front();
  double dt = opt.initial_step;
  if (dt <= 0.0) dt = std::min(0.01 / std::max(gen.scale(), 1e-300), 0.01 * span);

  auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<OdeState>());
  auto observer = [&](const OdeState& s, double) {
    out.emplace_back(Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size())));
  };
  try {
    odeint::integrate_times(stepper, std::ref(rhs), x, times.begin(), times.end(), dt, observer,
                            odeint::max_step_checker(5'000'000));
  } catch (const odeint::odeint_error& e) {
    throw StiffnessError(std::string("integrator step size collapsed (") + e.what() +
                         "); shorten the time span or use the steady-state / static-Liouvillian path");
  }
  if (out.size() != times.size()) throw NumericalFailure("integrator returned an incomplete trajectory", 0.0);
  return out;
}

}  // namespace detail

inline Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                         IntegratorOptions opt = {}) {
  require_same_space(model.space(), rho0.space(), "evolve");
  const auto gen = detail::make_generator(model);
  const auto raw = detail::propagate(gen, vectorize(rho0), t_grid, opt);

  // integrator drift is tolerated up to these bounds
  const DensityMatrix::Tolerance tol{1e-8, 1e-7, 1e-6};
  Trajectory traj;
  traj.times = t_grid;
  traj.states.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    try {
      traj.states.emplace_back(devectorize(raw[k], model.space()), tol);
    } catch (const InvalidArgument& e) {
      throw NumericalFailure("state at t = " + std::to_string(t_grid[k]) + " left the physical set: " + e.what(), 0.0);
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Steady state

struct SteadyStateOptions {
  double shift_rel = 1e-12;      // sigma = shift_rel * max|L_ij|
  int max_iter = 200;
  double residual_rel = 1e-10;   // max|L vec(rho)| <= residual_rel * max|L_ij|
  bool check_uniqueness = true;
  double uniqueness_rel = 1e-8;
  int uniqueness_iter = 20;
};

struct SteadyStateReport {
  int iterations = 0;
  double residual = 0.0;          // max|L vec(rho)| / max|L_ij|
  double second_eigen_estimate = 0.0;
};

// Shifted inverse iteration on a sparse LU of (L - sigma I), started from the
// maximally mixed state.
inline DensityMatrix steady_state(const SuperOperator& l, SteadyStateOptions opt = {},
                                  SteadyStateReport* report = nullptr) {
  const HilbertSpace& space = l.space();
  const int d = space.total_dim();
  const long n = static_cast<long>(d) * d;
  const double lnorm = l.max_abs();
  if (lnorm == 0.0) throw AmbiguousSteadyState("zero Liouvillian: every state is stationary");
  const double sigma = opt.shift_rel * lnorm;

  SparseMatrix a = l.matrix() - cplx(sigma) * sparse_identity(static_cast<int>(n));
  a.makeCompressed();

  Eigen::UmfPackLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericalFailure("sparse LU of the shifted Liouvillian failed", 0.0);

  auto normalized_state = [&](const Vector& x) {
    cplx tr = 0.0;
    for (int i = 0; i < d; ++i) tr += x(static_cast<long>(i) * d + i);
    Matrix m = Eigen::Map<const Matrix>(x.data(), d, d) / tr;
    return Matrix(0.5 * (m + m.adjoint()));
  };

  Vector x = vectorize(DensityMatrix::maximally_mixed(space));
  Matrix rho;
  double residual = 0.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Vector y = lu.solve(x);
    x = y / y.norm();
    rho = normalized_state(x);
    const Vector r = l.matrix() * Eigen::Map<const Vector>(rho.data(), n);
    residual = r.cwiseAbs().maxCoeff() / lnorm;
    if (residual <= opt.residual_rel) break;
  }
  if (it == opt.max_iter)
    throw NumericalFailure("steady-state inverse iteration did not converge; residual " + std::to_string(residual),
                           residual);

  double second = 0.0;
  if (opt.check_uniqueness) {
    // deflated inverse iteration: growth ~ 1 / |next eigenvalue of L - sigma|
    const Vector null = x / x.norm();
    Vector v(n);
    for (long k = 0; k < n; ++k) v(k) = cplx(std::cos(0.7 * k + 0.3), std::sin(1.3 * k));
    v -= null * null.dot(v);
    v /= v.norm();
    double growth = 0.0;
    for (int k = 0; k < opt.uniqueness_iter; ++k) {
      Vector w = lu.solve(v);
      w -= null * null.dot(w);
      growth = w.norm();
      v = w / growth;
    }
    second = 1.0 / growth;
    if (second < opt.uniqueness_rel * lnorm)
      throw AmbiguousSteadyState("Liouvillian has a degenerate null space (next eigenvalue ~ " +
                                 std::to_string(second) + ")");
  }

  if (report) *report = {it + 1, residual, second};
  return DensityMatrix(Operator(space, rho));
}

namespace detail {

inline std::set<int> index_range(int first, int last) {
  std::set<int> out;
  for (int k = first; k < last; ++k) out.insert(k);
  return out;
}

// Splits a static model on subsystems [0, k) | [k, n) when H = H_A + H_B and
// every collapse operator is local to one side; nullopt otherwise.
inline std::optional<std::pair<LindbladModel, LindbladModel>> split_model(const LindbladModel& m, int k) {
  if (!m.is_static()) return std::nullopt;
  const HilbertSpace& s = m.space();
  const int n = s.size();
  const auto keep_a = index_range(0, k), keep_b = index_range(k, n);
  int da = 1, db = 1;
  for (int i = 0; i < k; ++i) da *= s.dim(i);
  for (int i = k; i < n; ++i) db *= s.dim(i);
  const Matrix ia = Matrix::Identity(da, da), ib = Matrix::Identity(db, db);

  const Operator h = m.hamiltonian().static_part();
  const double tol = 1e-12 * std::max(1.0, h.max_abs());
  const Operator ha = (1.0 / db) * partial_trace(h, keep_a);
  Operator hb = (1.0 / da) * partial_trace(h, keep_b);
  hb = hb - (h.trace() / cplx(da * db)) * Operator::identity(hb.space());
  if ((kron(ha.matrix(), ib) + kron(ia, hb.matrix()) - h.matrix()).cwiseAbs().maxCoeff() > tol)
    return std::nullopt;

  std::vector<CollapseOperator> ca, cb;
  for (const auto& c : m.collapse_ops()) {
    if (!(c.rate > 0.0)) continue;
    const double ctol = 1e-12 * std::max(1.0, c.op.max_abs());
    const Operator oa = (1.0 / db) * partial_trace(c.op, keep_a);
    if ((kron(oa.matrix(), ib) - c.op.matrix()).cwiseAbs().maxCoeff() <= ctol) {
      ca.push_back({oa, c.rate});
      continue;
    }
    const Operator ob = (1.0 / da) * partial_trace(c.op, keep_b);
    if ((kron(ia, ob.matrix()) - c.op.matrix()).cwiseAbs().maxCoeff() <= ctol) {
      cb.push_back({ob, c.rate});
      continue;
    }
    return std::nullopt;
  }
  return std::make_pair(LindbladModel(ha, std::move(ca)), LindbladModel(hb, std::move(cb)));
}

// Report collects the worst factor: most iterations, smallest gap estimate.
inline Matrix factorized_steady_state(const LindbladModel& m, const SteadyStateOptions& opt,
                                      SteadyStateReport& agg) {
  for (int k = 1; k < m.space().size(); ++k) {
    if (auto parts = split_model(m, k)) {
      Matrix a = factorized_steady_state(parts->first, opt, agg);
      return kron(a, factorized_steady_state(parts->second, opt, agg));
    }
  }
  SteadyStateReport r;
  Matrix rho = steady_state(build_liouvillian(m), opt, &r).matrix();
  agg.iterations = std::max(agg.iterations, r.iterations);
  agg.second_eigen_estimate = agg.second_eigen_estimate == 0.0
                                  ? r.second_eigen_estimate
                                  : std::min(agg.second_eigen_estimate, r.second_eigen_estimate);
  return rho;
}

}  // namespace detail

// Steady state of a static model. Tensor-separable generators are solved
// factor by factor; the product is then checked against the full Liouvillian.
inline DensityMatrix steady_state(const LindbladModel& model, SteadyStateOptions opt = {},
                                  SteadyStateReport* report = nullptr) {
  const SuperOperator l = build_liouvillian(model);
  bool separable = false;
  for (int k = 1; k < model.space().size() && !separable; ++k) separable = detail::split_model(model, k).has_value();
  if (!separable) return steady_state(l, opt, report);

  SteadyStateReport agg;
  Matrix rho = detail::factorized_steady_state(model, opt, agg);
  rho = 0.5 * (rho + rho.adjoint().eval());
  rho /= rho.trace();
  const long n = rho.size();
  const double lnorm = l.max_abs();
  const double residual = (l.matrix() * Eigen::Map<const Vector>(rho.data(), n)).cwiseAbs().maxCoeff() / lnorm;
  if (residual > opt.residual_rel) return steady_state(l, opt, report);
  if (report) *report = {agg.iterations, residual, agg.second_eigen_estimate};
  return DensityMatrix(Operator(model.space(), rho));
}

// ---------------------------------------------------------------------------
// Input-output observables. Each resonator leaks equally into its intrinsic
// bath and its two lines (kappa = gamma_i / 3); port 3 collects one line of
// each resonator. Vacuum input noise drops out of normally ordered moments.

struct PortValues {
  double N1 = 0.0, N2 = 0.0, N3 = 0.0;
};

inline Operator port_operator(int port, double gamma1, double gamma2, const ModeFrame& frame) {
  const double k1 = std::sqrt(gamma1 / 3.0), k2 = std::sqrt(gamma2 / 3.0);
  switch (port) {
    case 1: return k1 * frame.a1();
    case 2: return k2 * frame.a2();
    case 3: return k1 * frame.a1() + k2 * frame.a2();
    default: throw InvalidArgument("output port must be 1, 2 or 3");
  }
}

inline PortValues output_photon_numbers(const DensityMatrix& rho, double gamma1, double gamma2,
                                        const ModeFrame& frame) {
  PortValues out;
  double* slot[3] = {&out.N1, &out.N2, &out.N3};
  for (int port = 1; port <= 3; ++port) {
    const Operator c = port_operator(port, gamma1, gamma2, frame);
    *slot[port - 1] = expectation(rho, c.adjoint() * c).real();
  }
  return out;
}

inline PortValues output_photon_numbers(const DensityMatrix& rho, double gamma1, double gamma2) {
  return output_photon_numbers(rho, gamma1, gamma2, ModeFrame::bare(rho.space()));
}

inline constexpr double kMinPortPhotons = 1e-8;

// <c^dag c^dag c c> / <c^dag c>^2 for one port.
inline double g2_zero_port(const DensityMatrix& rho, int port, double gamma1, double gamma2, const ModeFrame& frame) {
  const Operator c = port_operator(port, gamma1, gamma2, frame);
  const Operator cd = c.adjoint();
  const double n = expectation(rho, cd * c).real();
  if (!(n >= kMinPortPhotons))
    throw UndefinedCorrelation("g2 undefined on port " + std::to_string(port) + ": output photon number " +
                                   std::to_string(n),
                               port);
  return expectation(rho, cd * cd * c * c).real() / (n * n);
}

inline std::array<double, 3> g2_zero(const DensityMatrix& rho, double gamma1, double gamma2, const ModeFrame& frame) {
  return {g2_zero_port(rho, 1, gamma1, gamma2, frame), g2_zero_port(rho, 2, gamma1, gamma2, frame),
          g2_zero_port(rho, 3, gamma1, gamma2, frame)};
}

inline std::array<double, 3> g2_zero(const DensityMatrix& rho, double gamma1, double gamma2) {
  return g2_zero(rho, gamma1, gamma2, ModeFrame::bare(rho.space()));
}

// Quantum regression: evolve c rho_ss c^dag under the same generator and
// read Tr[c^dag c rho~(tau)] / <c^dag c>^2.
inline std::vector<double> g2_tau(const LindbladModel& model, const DensityMatrix& rho_ss, int port,
                                  const std::vector<double>& tau_grid, double gamma1, double gamma2,
                                  const ModeFrame& frame, IntegratorOptions opt = {}) {
  if (!model.is_static()) throw Unsupported("g2_tau needs a static Hamiltonian");
  if (tau_grid.empty() || tau_grid.front() < 0.0) throw InvalidArgument("tau grid must start at tau >= 0");
  const Operator c = port_operator(port, gamma1, gamma2, frame);
  const Operator cd = c.adjoint();
  const Operator n_op = cd * c;
  const double n = expectation(rho_ss, n_op).real();
  if (!(n >= kMinPortPhotons))
    throw UndefinedCorrelation("g2 undefined on port " + std::to_string(port), port);

  std::vector<double> times = tau_grid;
  const bool prepend = times.front() > 0.0;
  if (prepend) times.insert(times.begin(), 0.0);

  const Operator dressed = c * rho_ss.op() * cd;
  const auto gen = detail::make_generator(model);
  const auto states = detail::propagate(gen, vectorize(dressed), times, opt);

  std::vector<double> out;
  out.reserve(tau_grid.size());
  for (std::size_t k = prepend ? 1 : 0; k < states.size(); ++k)
    out.push_back(expectation(devectorize(states[k], model.space()), n_op).real() / (n * n));
  return out;
}

inline std::vector<double> g2_tau(const LindbladModel& model, const DensityMatrix& rho_ss, int port,
                                  const std::vector<double>& tau_grid, double gamma1, double gamma2,
                                  IntegratorOptions opt = {}) {
  return g2_tau(model, rho_ss, port, tau_grid, gamma1, gamma2, ModeFrame::bare(model.space()), opt);
}

}  // namespace blockade
