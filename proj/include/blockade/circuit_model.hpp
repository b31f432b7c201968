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

// Two resonators coupled to a gap-tunable qubit through both its transverse
// (sigma_x) and longitudinal (sigma_z) degrees of freedom.
//
// The physical inputs live in CircuitParams. derive_supermodes() turns them
// into the normal-mode description: the bright supermode A+ couples to the
// qubit through an effective two-photon term Theta (sigma+ A+^2 + h.c.), the
// dark supermode A- decouples. All quantities are dimensionless with hbar = 1.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "blockade/errors.hpp"
#include "blockade/fockspace.hpp"

namespace blockade {

struct CircuitParams {
  double omega1 = 0.0;     // resonator 1 frequency
  double omega2 = 0.0;     // resonator 2 frequency
  double g = 0.0;          // capacitive resonator-resonator hopping
  double G1 = 0.0;         // qubit-resonator 1 coupling
  double G2 = 0.0;         // qubit-resonator 2 coupling
  double theta_mix = 0.0;  // qubit mixing angle, tan(theta_mix) = gap / bias
  double omega_q = 0.0;    // qubit transition frequency
  cplx eps1{0.0};          // drive amplitude on resonator 1
  cplx eps2{0.0};          // drive amplitude on resonator 2
  double omega_d = 0.0;    // common drive frequency
  double gamma1 = 0.0;     // total loss rate of resonator 1
  double gamma2 = 0.0;     // total loss rate of resonator 2
  double Gamma = 0.0;      // qubit relaxation rate
  double Gamma_f = 0.0;    // qubit pure dephasing rate
};

// Problems that make the parameter set unusable (empty when valid).
inline std::vector<std::string> validate(const CircuitParams& p) {
  std::vector<std::string> bad;
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) bad.push_back(std::string(name) + " must be a finite value >= 0");
  };
  nonneg(p.omega1, "omega1");
  nonneg(p.omega2, "omega2");
  nonneg(p.omega_q, "omega_q");
  nonneg(p.omega_d, "omega_d");
  nonneg(p.gamma1, "gamma1");
  nonneg(p.gamma2, "gamma2");
  nonneg(p.Gamma, "Gamma");
  nonneg(p.Gamma_f, "Gamma_f");
  if (!(p.G1 > 0.0)) bad.emplace_back("G1 must be > 0");
  if (!(p.G2 > 0.0)) bad.emplace_back("G2 must be > 0");
  if (!std::isfinite(p.g)) bad.emplace_back("g must be finite");
  return bad;
}

struct SupermodeParams {
  double beta = 0.0;              // G1 / G2
  double Gbar = 0.0;              // sqrt(G1^2 + G2^2)
  double Gx = 0.0;                // transverse coupling to A+
  double Gz = 0.0;                // longitudinal coupling to A+
  double Omega_plus = 0.0;
  double Omega_minus = 0.0;
  double dispersive_shift = 0.0;  // 4 Gx^2 / (3 Omega+)
  double Omega_plus_prime = 0.0;  // Omega+ - dispersive_shift
  double lambda = 0.0;            // Lamb-Dicke parameter Gz / Omega+
  double Theta = 0.0;             // two-photon coupling, -2 lambda Gx
  cplx eps_plus{0.0};
  cplx eps_minus{0.0};
  double Delta_plus = 0.0;        // Omega+' - omega_d
  double Delta2 = 0.0;            // supermode splitting
  double Delta_minus = 0.0;       // Delta+ + Delta2
  std::vector<std::string> warnings;

  // Bright-mode weights: A+ = c1 a1 + c2 a2, A- = c2 a1 - c1 a2.
  double c1() const { return beta / std::sqrt(1.0 + beta * beta); }
  double c2() const { return 1.0 / std::sqrt(1.0 + beta * beta); }
};

// omega1 satisfying omega1 - omega2 = g (beta^2 - 1) / beta.
inline double eq6_omega1(double omega2, double g, double beta) {
  return omega2 + g * (beta * beta - 1.0) / beta;
}

struct DeriveOptions {
  // Skip the resonator-detuning constraint; needed when g is varied at fixed
  // resonator frequencies.
  bool check_detuning_constraint = true;
  double constraint_rel_tol = 1e-9;
};

inline SupermodeParams derive_supermodes(const CircuitParams& p, DeriveOptions opt = {}) {
  if (!(p.G1 > 0.0) || !(p.G2 > 0.0)) throw InvalidArgument("G1 and G2 must be positive");
  SupermodeParams sp;
  sp.beta = p.G1 / p.G2;
  const double b = sp.beta;

  if (opt.check_detuning_constraint) {
    const double residual = (p.omega1 - p.omega2) - p.g * (b * b - 1.0) / b;
    const double scale = std::max({std::abs(p.omega1), std::abs(p.omega2), 1.0});
    if (std::abs(residual) > opt.constraint_rel_tol * scale) {
      throw ConstraintViolation(
          "resonator detuning omega1 - omega2 must equal g (beta^2 - 1) / beta; residual " +
              std::to_string(residual),
          residual);
    }
  }

  sp.Gbar = std::hypot(p.G1, p.G2);
  sp.Gz = sp.Gbar * std::cos(p.theta_mix);
  sp.Gx = -sp.Gbar * std::sin(p.theta_mix);
  sp.Omega_plus = p.omega1 + p.g / b;
  sp.Omega_minus = p.omega2 - p.g / b;
  sp.dispersive_shift = 4.0 * sp.Gx * sp.Gx / (3.0 * sp.Omega_plus);
  sp.Omega_plus_prime = sp.Omega_plus - sp.dispersive_shift;
  sp.lambda = sp.Gz / sp.Omega_plus;
  sp.Theta = -2.0 * sp.lambda * sp.Gx;

  const double norm = std::sqrt(1.0 + b * b);
  sp.eps_plus = (b * p.eps1 + p.eps2) / norm;
  sp.eps_minus = (p.eps1 - b * p.eps2) / norm;

  sp.Delta_plus = sp.Omega_plus_prime - p.omega_d;
  sp.Delta2 = sp.dispersive_shift - p.g * (1.0 + b * b) / b;
  sp.Delta_minus = sp.Delta_plus + sp.Delta2;

  if (std::abs(p.g) > 0.1 * std::min(p.G1, p.G2))
    sp.warnings.emplace_back("g is not small compared with G1, G2; the rotating-wave hopping term is questionable");
  if (std::abs(sp.lambda) >= 0.15)
    sp.warnings.emplace_back("Lamb-Dicke parameter >= 0.15; the first-order expansion in lambda is questionable");
  return sp;
}

// ---------------------------------------------------------------------------
// Parameter helpers used by the experiments

// Sets omega_d so that the bright-mode drive detuning equals Delta_plus.
inline CircuitParams with_drive_detuning(CircuitParams p, double Delta_plus, DeriveOptions opt = {}) {
  const auto sp = derive_supermodes(p, opt);
  p.omega_d = sp.Omega_plus_prime - Delta_plus;
  return p;
}

// Tunes the qubit to the two-photon resonance omega_q = 2 Omega+'.
inline CircuitParams with_two_photon_resonance(CircuitParams p, DeriveOptions opt = {}) {
  p.omega_q = 2.0 * derive_supermodes(p, opt).Omega_plus_prime;
  return p;
}

// eps1 = |eps1| e^{-i theta/2}, eps2 = |eps2| e^{+i theta/2}.
inline CircuitParams with_drive_phase(CircuitParams p, double theta_drive) {
  p.eps1 = std::abs(p.eps1) * std::exp(-kI * (0.5 * theta_drive));
  p.eps2 = std::abs(p.eps2) * std::exp(kI * (0.5 * theta_drive));
  return p;
}

// Re-solves the hopping g so that the supermode splitting equals Delta2.
// With keep_detuning_constraint, omega1 follows g through the constraint
// (omega2 fixed); otherwise both resonator frequencies stay put.
inline CircuitParams with_supermode_splitting(CircuitParams p, double Delta2,
                                              bool keep_detuning_constraint = true) {
  if (!(p.G1 > 0.0) || !(p.G2 > 0.0)) throw InvalidArgument("G1 and G2 must be positive");
  const double b = p.G1 / p.G2;
  const double Gx2 = (p.G1 * p.G1 + p.G2 * p.G2) * std::pow(std::sin(p.theta_mix), 2);
  for (int it = 0; it < 200; ++it) {
    if (keep_detuning_constraint) p.omega1 = eq6_omega1(p.omega2, p.g, b);
    const double Omega_plus = p.omega1 + p.g / b;
    const double g_next = b * (4.0 * Gx2 / (3.0 * Omega_plus) - Delta2) / (1.0 + b * b);
    const bool done = std::abs(g_next - p.g) <= 1e-15 * std::max(1.0, std::abs(g_next));
    p.g = g_next;
    if (done) break;
  }
  if (keep_detuning_constraint) p.omega1 = eq6_omega1(p.omega2, p.g, b);
  return p;
}

// Changes beta = G1/G2 keeping Gbar fixed; omega1 follows the detuning constraint.
inline CircuitParams with_coupling_ratio(CircuitParams p, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("coupling ratio must be positive");
  const double Gbar = std::hypot(p.G1, p.G2);
  p.G1 = Gbar * beta / std::sqrt(1.0 + beta * beta);
  p.G2 = Gbar / std::sqrt(1.0 + beta * beta);
  p.omega1 = eq6_omega1(p.omega2, p.g, beta);
  return p;
}

// Reference working point: omega_i = 2500, G_i = 0.06 omega_i, theta_mix = pi/4,
// g = 6, eps1 = 0.95, eps2 = 1, Gamma = Gamma_f/2 = gamma_i = 1, resonant drive
// of A+ and omega_q = 2 Omega+'.
inline CircuitParams reference_parameters() {
  CircuitParams p;
  p.omega1 = 2500.0;
  p.omega2 = 2500.0;
  p.g = 6.0;
  p.G1 = 0.06 * 2500.0;
  p.G2 = 0.06 * 2500.0;
  p.theta_mix = std::numbers::pi / 4.0;
  p.eps1 = 0.95;
  p.eps2 = 1.0;
  p.gamma1 = 1.0;
  p.gamma2 = 1.0;
  p.Gamma = 1.0;
  p.Gamma_f = 2.0;
  p = with_drive_detuning(p, 0.0);
  return with_two_photon_resonance(p);
}

// ---------------------------------------------------------------------------
// Multiphoton coefficients

enum class BKind { B1, B2 };

inline double multiphoton_coefficient(BKind kind, int m, int n, double lambda) {
  if (n < 1) throw InvalidArgument("multiphoton order n must be >= 1");
  const double pref = std::exp(-2.0 * lambda * lambda);
  const double power = std::pow(2.0 * lambda, 2 * m + n - 1);
  if (kind == BKind::B1) {
    if (m < 1) throw InvalidArgument("B1(m, n) needs m >= 1");
    const double sign = (m + n) % 2 == 0 ? 1.0 : -1.0;
    return pref * sign * power / (std::tgamma(m) * std::tgamma(m + n + 1));
  }
  if (m < 0) throw InvalidArgument("B2(m, n) needs m >= 0");
  const double sign = (m + n - 1) % 2 == 0 ? 1.0 : -1.0;
  return pref * sign * power / (std::tgamma(m + 1) * std::tgamma(m + n));
}

// Leading n-photon transition rate |Gx B2(0, n)|.
inline double multiphoton_rate(const SupermodeParams& sp, int n) {
  return std::abs(sp.Gx * multiphoton_coefficient(BKind::B2, 0, n, sp.lambda));
}

// ---------------------------------------------------------------------------
// Time-dependent Hamiltonians

struct HamiltonianTerm {
  Operator op;
  std::function<cplx(double)> coeff;  // empty means the constant 1
};

inline std::function<cplx(double)> oscillating(double frequency) {
  return [frequency](double t) { return std::exp(kI * (frequency * t)); };
}

// H(t) = sum_k coeff_k(t) op_k
class TimeDependentHamiltonian {
 public:
  explicit TimeDependentHamiltonian(HilbertSpace space) : space_(std::move(space)) {}

  void add(Operator op, std::function<cplx(double)> coeff = {}) {
    require_same_space(space_, op.space(), "TimeDependentHamiltonian::add");
    terms_.push_back({std::move(op), std::move(coeff)});
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const std::vector<HamiltonianTerm>& terms() const noexcept { return terms_; }

  bool is_static() const {
    for (const auto& t : terms_)
      if (t.coeff) return false;
    return true;
  }

  Operator static_part() const {
    Operator h = Operator::zero(space_);
    for (const auto& t : terms_)
      if (!t.coeff) h += t.op;
    return h;
  }

  Operator at(double time) const {
    Operator h = Operator::zero(space_);
    for (const auto& t : terms_) h += t.coeff ? t.coeff(time) * t.op : t.op;
    return h;
  }

 private:
  HilbertSpace space_;
  std::vector<HamiltonianTerm> terms_;
};

namespace detail {

inline void require_qubit_two_modes(const HilbertSpace& s, const char* where) {
  if (s.size() != 3 || s.dim(0) != 2 || s.dim(1) != s.dim(2))
    throw InvalidDimension(std::string(where) + ": expected a (2, N, N) space, got " + s.to_string());
}

struct QubitModeOps {
  Operator sz, sx, sp, sm, a1, a2;
};

inline QubitModeOps qubit_mode_ops(const HilbertSpace& s) {
  const int levels = s.dim(1);
  return {embed(pauli(Pauli::z), s, 0),     embed(pauli(Pauli::x), s, 0),
          embed(pauli(Pauli::plus), s, 0),  embed(pauli(Pauli::minus), s, 0),
          embed(annihilation(levels), s, 1), embed(annihilation(levels), s, 2)};
}

}  // namespace detail

// Lab-frame H0 + H_d(t) in the bare (qubit, mode1, mode2) basis.
inline TimeDependentHamiltonian build_lab_hamiltonian(const CircuitParams& p, const HilbertSpace& space) {
  detail::require_qubit_two_modes(space, "build_lab_hamiltonian");
  const auto o = detail::qubit_mode_ops(space);
  const Operator a1d = o.a1.adjoint(), a2d = o.a2.adjoint();
  const double s = std::sin(p.theta_mix), c = std::cos(p.theta_mix);

  Operator h0 = 0.5 * p.omega_q * o.sz + p.omega1 * (a1d * o.a1) + p.omega2 * (a2d * o.a2) +
                p.g * (a1d * o.a2 + a2d * o.a1);
  const double G[2] = {p.G1, p.G2};
  const Operator* a[2] = {&o.a1, &o.a2};
  for (int i = 0; i < 2; ++i) {
    const Operator quad = a[i]->adjoint() + *a[i];
    h0 += (-G[i] * s) * (o.sx * quad) + (G[i] * c) * (o.sz * quad);
  }

  TimeDependentHamiltonian h(space);
  h.add(h0);
  const cplx eps[2] = {p.eps1, p.eps2};
  for (int i = 0; i < 2; ++i) {
    if (eps[i] == cplx(0.0)) continue;
    h.add(eps[i] * a[i]->adjoint(), oscillating(-p.omega_d));
    h.add(std::conj(eps[i]) * *a[i], oscillating(p.omega_d));
  }
  return h;
}

// Effective two-photon Hamiltonian in the (qubit, A+, A-) basis:
// 1/2 Delta+ sz + Delta+ A+^dag A+ + Delta- A-^dag A- + Theta (s+ A+^2 + s- A+^dag^2)
//   + sum_i (eps_i A_i^dag + eps_i^* A_i)
inline Operator build_effective_hamiltonian(const SupermodeParams& sp, const HilbertSpace& space) {
  detail::require_qubit_two_modes(space, "build_effective_hamiltonian");
  const auto o = detail::qubit_mode_ops(space);
  const Operator& Ap = o.a1;
  const Operator& Am = o.a2;
  const Operator Apd = Ap.adjoint(), Amd = Am.adjoint();
  return 0.5 * sp.Delta_plus * o.sz + sp.Delta_plus * (Apd * Ap) + sp.Delta_minus * (Amd * Am) +
         sp.Theta * (o.sp * Ap * Ap + o.sm * Apd * Apd) + sp.eps_plus * Apd +
         std::conj(sp.eps_plus) * Ap + sp.eps_minus * Amd + std::conj(sp.eps_minus) * Am;
}

// First-order-in-lambda supermode Hamiltonian seen from the frame rotating at
// omega_d (modes) and 2 omega_d (qubit). The transverse sigma_x coupling and the
// counter-rotating two-photon terms are kept as explicit oscillations at
// +-omega_d, +-3 omega_d, +-4 omega_d. A+ keeps its bare frequency Omega+: the
// dispersive shift -chi A+^dag A+ is produced by the oscillating terms
// themselves, so its time average is H_eff + chi A+^dag A+ (at Delta+ = 0).
inline TimeDependentHamiltonian build_rotating_frame_full(const CircuitParams& p,
                                                          const SupermodeParams& sp,
                                                          const HilbertSpace& space) {
  detail::require_qubit_two_modes(space, "build_rotating_frame_full");
  const auto o = detail::qubit_mode_ops(space);
  const Operator& Ap = o.a1;
  const Operator& Am = o.a2;
  const Operator Apd = Ap.adjoint(), Amd = Am.adjoint();
  const double wd = p.omega_d;

  TimeDependentHamiltonian h(space);
  h.add(0.5 * (p.omega_q - 2.0 * wd) * o.sz + (sp.Omega_plus - wd) * (Apd * Ap) +
        (sp.Omega_minus - wd) * (Amd * Am) + sp.Theta * (o.sp * Ap * Ap + o.sm * Apd * Apd) +
        sp.eps_plus * Apd + std::conj(sp.eps_plus) * Ap + sp.eps_minus * Amd +
        std::conj(sp.eps_minus) * Am);

  h.add(sp.Gx * (o.sp * Apd), oscillating(3.0 * wd));
  h.add(sp.Gx * (o.sp * Ap), oscillating(wd));
  h.add(sp.Gx * (o.sm * Apd), oscillating(-wd));
  h.add(sp.Gx * (o.sm * Ap), oscillating(-3.0 * wd));

  const double two_photon = 2.0 * sp.lambda * sp.Gx;
  if (two_photon != 0.0) {
    h.add(two_photon * (o.sp * Apd * Apd), oscillating(4.0 * wd));
    h.add(two_photon * (o.sm * Ap * Ap), oscillating(-4.0 * wd));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Supermode basis change

// Maps the two-mode Fock basis of (A+, A-) onto the bare (a1, a2) Fock basis.
// The map conserves total photon number. Manifolds that fit below the
// truncation edge are mapped exactly; above it the truncated block is replaced
// by its closest unitary so the transform stays invertible.
class SupermodeTransform {
 public:
  SupermodeTransform(double beta, int levels) : levels_(levels) {
    if (!(beta > 0.0)) throw InvalidArgument("coupling ratio must be positive");
    if (levels < 2) throw InvalidDimension("Fock truncation needs at least 2 levels");
    c1_ = beta / std::sqrt(1.0 + beta * beta);
    c2_ = 1.0 / std::sqrt(1.0 + beta * beta);
    build();
  }

  int levels() const noexcept { return levels_; }
  // Columns: supermode Fock states; rows: bare Fock states.
  const Matrix& two_mode_unitary() const noexcept { return w_; }

  Matrix on(const HilbertSpace& space) const {
    if (space.size() == 2 && space.dim(0) == levels_ && space.dim(1) == levels_) return w_;
    if (space.size() == 3 && space.dim(0) == 2 && space.dim(1) == levels_ && space.dim(2) == levels_)
      return kron(Matrix::Identity(2, 2), w_);
    throw InvalidDimension("supermode transform does not act on " + space.to_string());
  }

 private:
  void build() {
    const int L = levels_;
    w_ = Matrix::Zero(L * L, L * L);
    auto fact = [](int k) { return std::tgamma(k + 1.0); };
    for (int n = 0; n <= 2 * (L - 1); ++n) {
      std::vector<int> ps;
      for (int pp = std::max(0, n - (L - 1)); pp <= std::min(n, L - 1); ++pp) ps.push_back(pp);
      const int k = static_cast<int>(ps.size());
      Matrix block = Matrix::Zero(k, k);  // rows: bare m, cols: supermode p
      for (int col = 0; col < k; ++col) {
        const int pp = ps[col], q = n - pp;
        // coefficients of a1^dag^i a2^dag^(deg-i)
        std::vector<double> poly{1.0};
        auto multiply = [&](double x, double y) {
          std::vector<double> next(poly.size() + 1, 0.0);
          for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += x * poly[i];
            next[i] += y * poly[i];
          }
          poly.swap(next);
        };
        for (int r = 0; r < pp; ++r) multiply(c1_, c2_);
        for (int r = 0; r < q; ++r) multiply(c2_, -c1_);
        const double norm = std::sqrt(fact(pp) * fact(q));
        for (int row = 0; row < k; ++row) {
          const int m = ps[row];
          block(row, col) = poly[static_cast<std::size_t>(m)] * std::sqrt(fact(m) * fact(n - m)) / norm;
        }
      }
      if (n > L - 1) {
        Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
        block = svd.matrixU() * svd.matrixV().adjoint();
      }
      for (int row = 0; row < k; ++row)
        for (int col = 0; col < k; ++col)
          w_(ps[row] * L + (n - ps[row]), ps[col] * L + (n - ps[col])) = block(row, col);
    }
  }

  int levels_;
  double c1_ = 0.0, c2_ = 0.0;
  Matrix w_;
};

inline int mode_levels(const HilbertSpace& s) { return s.dim(s.size() - 1); }

inline StateVector supermode_to_bare(const StateVector& psi, double beta) {
  const Matrix w = SupermodeTransform(beta, mode_levels(psi.space())).on(psi.space());
  return StateVector::normalized(psi.space(), w * psi.amplitudes());
}
inline StateVector bare_to_supermode(const StateVector& psi, double beta) {
  const Matrix w = SupermodeTransform(beta, mode_levels(psi.space())).on(psi.space());
  return StateVector::normalized(psi.space(), w.adjoint() * psi.amplitudes());
}
inline Operator supermode_to_bare(const Operator& op, double beta) {
  const Matrix w = SupermodeTransform(beta, mode_levels(op.space())).on(op.space());
  return {op.space(), w * op.matrix() * w.adjoint()};
}
inline Operator bare_to_supermode(const Operator& op, double beta) {
  const Matrix w = SupermodeTransform(beta, mode_levels(op.space())).on(op.space());
  return {op.space(), w.adjoint() * op.matrix() * w};
}
inline DensityMatrix supermode_to_bare(const DensityMatrix& rho, double beta) {
  Operator o = supermode_to_bare(rho.op(), beta);
  return DensityMatrix(Operator(o.space(), 0.5 * (o.matrix() + o.matrix().adjoint())));
}
inline DensityMatrix bare_to_supermode(const DensityMatrix& rho, double beta) {
  Operator o = bare_to_supermode(rho.op(), beta);
  return DensityMatrix(Operator(o.space(), 0.5 * (o.matrix() + o.matrix().adjoint())));
}

// A+ = c1 a1 + c2 a2 and A- = c2 a1 - c1 a2 as truncated bare-basis operators.
struct SupermodeOperators {
  Operator A_plus;
  Operator A_minus;
};

inline SupermodeOperators supermode_operators(const HilbertSpace& bare_space, double beta) {
  const int n = bare_space.size();
  const int levels = mode_levels(bare_space);
  const Operator a1 = embed(annihilation(levels), bare_space, n - 2);
  const Operator a2 = embed(annihilation(levels), bare_space, n - 1);
  const double c1 = beta / std::sqrt(1.0 + beta * beta), c2 = 1.0 / std::sqrt(1.0 + beta * beta);
  return {c1 * a1 + c2 * a2, c2 * a1 - c1 * a2};
}

// How the bare resonator modes are represented on a simulation space.
// Dynamics of the effective model run in the supermode basis; observables
// refer to the bare modes a1, a2.
class ModeFrame {
 public:
  static ModeFrame bare(const HilbertSpace& space) {
    const int n = space.size(), levels = mode_levels(space);
    return ModeFrame(space, 1.0, false, embed(annihilation(levels), space, n - 2),
                     embed(annihilation(levels), space, n - 1));
  }

  // Simulation space spanned by (A+, A-) Fock states with ratio beta.
  static ModeFrame supermode(const HilbertSpace& space, double beta) {
    const int n = space.size(), levels = mode_levels(space);
    const Operator Ap = embed(annihilation(levels), space, n - 2);
    const Operator Am = embed(annihilation(levels), space, n - 1);
    const double c1 = beta / std::sqrt(1.0 + beta * beta), c2 = 1.0 / std::sqrt(1.0 + beta * beta);
    // inverse of the (orthogonal, symmetric) mixing matrix is itself
    return ModeFrame(space, beta, true, c1 * Ap + c2 * Am, c2 * Ap - c1 * Am);
  }

  const HilbertSpace& space() const noexcept { return space_; }
  bool is_supermode() const noexcept { return supermode_; }
  double beta() const noexcept { return beta_; }
  const Operator& a1() const noexcept { return a1_; }
  const Operator& a2() const noexcept { return a2_; }

  DensityMatrix to_bare(const DensityMatrix& rho) const {
    return supermode_ ? supermode_to_bare(rho, beta_) : rho;
  }

 private:
  ModeFrame(HilbertSpace space, double beta, bool supermode, Operator a1, Operator a2)
      : space_(std::move(space)), beta_(beta), supermode_(supermode), a1_(std::move(a1)), a2_(std::move(a2)) {}

  HilbertSpace space_;
  double beta_;
  bool supermode_;
  Operator a1_, a2_;
};

// ---------------------------------------------------------------------------
// Supermode eigenstates in the bare (qubit, mode1, mode2) basis

enum class SupermodeState { psi1_plus, psi1_minus, psi2_plus, psi2_minus, dressed_plus, dressed_minus };

inline StateVector supermode_state(const SupermodeParams& sp, const HilbertSpace& space, SupermodeState which) {
  detail::require_qubit_two_modes(space, "supermode_state");
  const bool two_excitations = which != SupermodeState::psi1_plus && which != SupermodeState::psi1_minus;
  if (two_excitations && space.dim(1) < 3)
    throw InvalidDimension("two-excitation supermode states need at least 3 Fock levels per mode");

  const auto ops = supermode_operators(space, sp.beta);
  const Matrix Apd = ops.A_plus.adjoint().matrix(), Amd = ops.A_minus.adjoint().matrix();
  const Vector vac = StateVector::basis(space, {kGround, 0, 0}).amplitudes();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Vector v;
  switch (which) {
    case SupermodeState::psi1_plus: v = Apd * vac; break;
    case SupermodeState::psi1_minus: v = Amd * vac; break;
    case SupermodeState::psi2_plus: v = inv_sqrt2 * (Apd * (Apd * vac)); break;
    case SupermodeState::psi2_minus: v = inv_sqrt2 * (Amd * (Amd * vac)); break;
    case SupermodeState::dressed_plus:
    case SupermodeState::dressed_minus: {
      const Vector psi2 = inv_sqrt2 * (Apd * (Apd * vac));
      const Vector e00 = StateVector::basis(space, {kExcited, 0, 0}).amplitudes();
      const double sign = which == SupermodeState::dressed_plus ? 1.0 : -1.0;
      v = inv_sqrt2 * (psi2 + sign * e00);
      break;
    }
  }
  return StateVector::normalized(space, v);
}

}  // namespace blockade
