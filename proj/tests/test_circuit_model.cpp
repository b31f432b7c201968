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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "blockade/circuit_model.hpp"
#include "blockade/errors.hpp"
#include "test_util.hpp"

using namespace blockade;
using blockade::testing::max_diff;

namespace {

constexpr double kPi = std::numbers::pi;

// Reference circuit with the raw inputs: omega_i = 2500, G_i = 150, g = 6.
CircuitParams reference_inputs() {
  CircuitParams p;
  p.omega1 = p.omega2 = 2500.0;
  p.G1 = p.G2 = 150.0;
  p.g = 6.0;
  p.theta_mix = kPi / 4.0;
  p.eps1 = 0.95;
  p.eps2 = 1.0;
  p.gamma1 = p.gamma2 = p.Gamma = 1.0;
  p.Gamma_f = 2.0;
  return p;
}

CircuitParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CircuitParams p;
  p.omega2 = 5.0 + 10.0 * u(rng);
  p.G1 = 0.2 + u(rng);
  p.G2 = 0.2 + u(rng);
  p.g = 0.1 * u(rng);
  p.omega1 = eq6_omega1(p.omega2, p.g, p.G1 / p.G2);
  p.theta_mix = kPi * u(rng);
  p.omega_q = 10.0 * u(rng);
  p.eps1 = cplx(u(rng), u(rng));
  p.eps2 = cplx(u(rng), u(rng));
  p.omega_d = 5.0 + 10.0 * u(rng);
  return p;
}

double hermiticity(const Operator& h) {
  return (h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(DeriveSupermodes, ReferenceDriveAmplitudesAndCoupling) {
  const auto sp = derive_supermodes(reference_inputs());
  EXPECT_NEAR(sp.eps_plus.real(), 1.38, 0.005);
  EXPECT_NEAR(sp.eps_minus.real(), -0.035, 0.001);
  EXPECT_NEAR(sp.Theta, 18.0, 0.05);
  EXPECT_NEAR(sp.Theta, -2.0 * sp.lambda * sp.Gx, 1e-12);
  EXPECT_LT(std::abs(sp.Delta2), 0.05);
  EXPECT_DOUBLE_EQ(sp.beta, 1.0);
}

TEST(DeriveSupermodes, SplittingVanishesAtSolvedHopping) {
  // 4 Gx^2 / (3 (omega1 + g)) = 2 g with Gx = 150, omega1 = 2500:
  // 2 g^2 + 5000 g - 30000 = 0.
  const double g_root = (-5000.0 + std::sqrt(5000.0 * 5000.0 + 8.0 * 30000.0)) / 4.0;
  EXPECT_NEAR(g_root, 5.986, 1e-3);
  auto p = reference_inputs();
  p.g = g_root;
  EXPECT_NEAR(derive_supermodes(p).Delta2, 0.0, 1e-10);
  const auto solved = with_supermode_splitting(reference_inputs(), 0.0);
  EXPECT_NEAR(solved.g, g_root, 1e-10);
}

TEST(DeriveSupermodes, TableDefinitions) {
  auto p = reference_inputs();
  p.G1 = 90.0;
  p.G2 = 120.0;
  p.eps1 = cplx(0.3, -0.2);
  p.eps2 = cplx(0.7, 0.1);
  p.omega1 = eq6_omega1(p.omega2, p.g, 0.75);
  const auto sp = derive_supermodes(p);
  const double b = 0.75, n = std::sqrt(1.0 + b * b);
  EXPECT_NEAR(sp.beta, b, 1e-15);
  EXPECT_NEAR(sp.Gbar, 150.0, 1e-12);
  EXPECT_NEAR(std::abs(sp.eps_plus - (b * p.eps1 + p.eps2) / n), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(sp.eps_minus - (p.eps1 - b * p.eps2) / n), 0.0, 1e-15);
  EXPECT_NEAR(sp.Omega_plus_prime, sp.Omega_plus - 4.0 * sp.Gx * sp.Gx / (3.0 * sp.Omega_plus), 1e-12);
  EXPECT_NEAR(sp.lambda, sp.Gz / sp.Omega_plus, 1e-15);
  EXPECT_NEAR(std::abs(sp.Theta), 2.0 * sp.lambda * sp.Gbar * std::sin(kPi / 4.0), 1e-12);
}

TEST(DeriveSupermodes, DetuningConstraintEnforced) {
  auto p = reference_inputs();
  p.G1 = 100.0;  // beta != 1 but omega1 == omega2
  try {
    derive_supermodes(p);
    FAIL() << "expected ConstraintViolation";
  } catch (const ConstraintViolation& e) {
    EXPECT_NEAR(e.residual(), -p.g * (std::pow(2.0 / 3.0, 2) - 1.0) / (2.0 / 3.0), 1e-12);
  }
  DeriveOptions skip;
  skip.check_detuning_constraint = false;
  EXPECT_NO_THROW(derive_supermodes(p, skip));
  EXPECT_NEAR(eq6_omega1(2500.0, 6.0, 2.0), 2500.0 + 6.0 * 3.0 / 2.0, 1e-12);
}

TEST(DeriveSupermodes, AdvisoryWarnings) {
  auto p = reference_inputs();
  EXPECT_TRUE(derive_supermodes(p).warnings.empty());
  p.g = 50.0;
  EXPECT_FALSE(derive_supermodes(p).warnings.empty());
  EXPECT_TRUE(validate(reference_inputs()).empty());
  p.G1 = 0.0;
  EXPECT_FALSE(validate(p).empty());
}

TEST(Multiphoton, CoefficientFormulas) {
  for (double lambda : {0.01, 0.0599, 0.12}) {
    const double pref = std::exp(-2.0 * lambda * lambda);
    EXPECT_NEAR(multiphoton_coefficient(BKind::B2, 0, 2, lambda), -pref * 2.0 * lambda, 1e-16);
    EXPECT_NEAR(multiphoton_coefficient(BKind::B2, 0, 1, lambda), pref, 1e-15);
    // B1(1, 1) = e^{-2 l^2} (2l)^2 / (0! 2!)
    EXPECT_NEAR(multiphoton_coefficient(BKind::B1, 1, 1, lambda), pref * 4.0 * lambda * lambda / 2.0, 1e-16);
    // B2(1, 2) = e^{-2 l^2} (2l)^3 / (1! 2!)
    EXPECT_NEAR(multiphoton_coefficient(BKind::B2, 1, 2, lambda), pref * std::pow(2.0 * lambda, 3) / 2.0, 1e-16);
  }
  EXPECT_THROW(multiphoton_coefficient(BKind::B1, 0, 1, 0.1), InvalidArgument);
  EXPECT_THROW(multiphoton_coefficient(BKind::B2, -1, 1, 0.1), InvalidArgument);
  EXPECT_THROW(multiphoton_coefficient(BKind::B2, 0, 0, 0.1), InvalidArgument);
}

TEST(Multiphoton, CoefficientsDecrease) {
  for (double lambda : {0.02, 0.06, 0.149}) {
    for (int n = 1; n <= 4; ++n) {
      for (int m = 1; m <= 4; ++m) {
        for (BKind k : {BKind::B1, BKind::B2}) {
          const double b = std::abs(multiphoton_coefficient(k, m, n, lambda));
          EXPECT_LT(std::abs(multiphoton_coefficient(k, m + 1, n, lambda)), b);
          EXPECT_LT(std::abs(multiphoton_coefficient(k, m, n + 1, lambda)), b);
        }
      }
    }
  }
}

TEST(Multiphoton, ReferenceRates) {
  const auto sp = derive_supermodes(reference_parameters());
  EXPECT_NEAR(sp.lambda, 0.0599, 5e-5);
  EXPECT_NEAR(std::abs(sp.Gx), 150.0, 1e-9);
  const double to_mhz = 2500.0 / reference_parameters().omega1;
  const double r2 = multiphoton_rate(sp, 2) * to_mhz;
  const double r3 = multiphoton_rate(sp, 3) * to_mhz;
  EXPECT_GE(r2, 17.8);
  EXPECT_LE(r2, 18.0);
  // The Gaussian prefactor puts the three-photon rate at 1.067, 0.7% under
  // the first-order value 1.075; the reported value is 1.1.
  EXPECT_NEAR(r3, 1.1, 0.05 * 1.1);
  EXPECT_NEAR(r3 / std::exp(-2.0 * sp.lambda * sp.lambda), 150.0 * std::pow(2.0 * sp.lambda, 2) / 2.0, 1e-12);
}

TEST(LabHamiltonian, StaticWithoutDrive) {
  auto p = reference_inputs();
  p.eps1 = p.eps2 = 0.0;
  const HilbertSpace s = HilbertSpace::qubit_two_modes(3);
  const auto h = build_lab_hamiltonian(p, s);
  EXPECT_TRUE(h.is_static());
  EXPECT_EQ(h.terms().size(), 1u);
  EXPECT_LT(hermiticity(h.static_part()), 1e-12);
}

TEST(LabHamiltonian, DecoupledGroundEnergy) {
  CircuitParams p;
  p.omega1 = p.omega2 = 3.0;
  p.omega_q = 7.0;
  p.G1 = p.G2 = 1e-300;  // positive but negligible
  p.theta_mix = 0.3;
  const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
  const Operator h = build_lab_hamiltonian(p, s).static_part();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  EXPECT_NEAR(es.eigenvalues()(0), -p.omega_q / 2.0, 1e-12);
}

TEST(LabHamiltonian, HermitianAtRandomTimes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(0.0, 100.0);
  const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_params(rng);
    const auto h = build_lab_hamiltonian(p, s);
    EXPECT_FALSE(h.is_static());
    for (int k = 0; k < 50; ++k) {
      const Operator ht = h.at(t(rng));
      EXPECT_LT(hermiticity(ht), 1e-12 * ht.max_abs());
    }
  }
}

TEST(EffectiveHamiltonian, DiagonalWithoutCouplingOrDrive) {
  SupermodeParams sp;
  sp.Delta_plus = 0.7;
  sp.Delta_minus = -1.3;
  const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
  const Matrix h = build_effective_hamiltonian(sp, s).matrix();
  Matrix off = h;
  off.diagonal().setZero();
  EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(h(s.index_of({kGround, 2, 1}), s.index_of({kGround, 2, 1})).real(),
              -0.35 + 2 * 0.7 - 1.3, 1e-14);
}

TEST(EffectiveHamiltonian, TwoExcitationSplitting) {
  const auto ref = derive_supermodes(reference_parameters());
  SupermodeParams sp;
  sp.Theta = ref.Theta;
  sp.Delta_minus = 3.0;
  const HilbertSpace s = HilbertSpace::qubit_two_modes(5);
  const Matrix h = build_effective_hamiltonian(sp, s).matrix();
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  const int i = s.index_of({kGround, 2, 0}), j = s.index_of({kExcited, 0, 0});
  Matrix block(2, 2);
  block << h(i, i), h(i, j), h(j, i), h(j, j);
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  EXPECT_NEAR(es.eigenvalues()(1) - es.eigenvalues()(0), 2.0 * std::sqrt(2.0) * sp.Theta, 1e-12);
  // The pair is closed: no other state couples to it.
  for (int k = 0; k < s.total_dim(); ++k) {
    if (k == i || k == j) continue;
    EXPECT_EQ(std::abs(h(k, i)) + std::abs(h(k, j)), 0.0);
  }
}

TEST(EffectiveHamiltonian, WeakDriveFirstExcitedState) {
  const auto ref = derive_supermodes(reference_parameters());
  const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
  const int one = s.index_of({kGround, 1, 0});
  double previous = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    SupermodeParams sp;
    sp.Theta = ref.Theta;
    sp.eps_plus = eps;
    sp.Delta_minus = 5.0;
    // At Delta+ = 0 the undriven |g,n,0> ladder is degenerate; a unit
    // detuning makes the one-photon state well defined.
    sp.Delta_plus = 1.0;
    const Matrix h = build_effective_hamiltonian(sp, s).matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    double best = 0.0;
    for (int k = 0; k < s.total_dim(); ++k) best = std::max(best, std::norm(es.eigenvectors()(one, k)));
    EXPECT_GT(best, previous);
    previous = best;
  }
  EXPECT_GT(previous, 1.0 - 1e-5);
}

TEST(RotatingFrame, HermitianAndTimeAverage) {
  const auto p = reference_parameters();
  const auto sp = derive_supermodes(p);
  const HilbertSpace s = HilbertSpace::qubit_two_modes(3);
  const auto h = build_rotating_frame_full(p, sp, s);
  EXPECT_FALSE(h.is_static());

  // Trapezoid average over one drive period; exact for the harmonics present.
  const int samples = 64;
  const double period = 2.0 * kPi / p.omega_d;
  Matrix avg = Matrix::Zero(s.total_dim(), s.total_dim());
  for (int k = 0; k < samples; ++k) {
    const Operator hk = h.at(period * k / samples + 0.37);
    EXPECT_LT(hermiticity(hk), 1e-12 * hk.max_abs());
    avg += hk.matrix() / double(samples);
  }
  const Operator heff = build_effective_hamiltonian(sp, s);
  const auto o = detail::qubit_mode_ops(s);
  const Operator nplus = o.a1.adjoint() * o.a1;
  // Without the oscillating terms A+ sits at its bare frequency Omega+, so the
  // average exceeds H_eff by the dispersive shift on A+^dag A+.
  EXPECT_LT(max_diff(avg, (heff + sp.dispersive_shift * nplus).matrix()), 1e-9);
  EXPECT_GT(max_diff(avg, heff.matrix()), 1.0);
}

TEST(RotatingFrame, NoQuadraticTermAtZeroLambda) {
  auto p = reference_parameters();
  p.theta_mix = kPi / 2.0;  // Gz = 0
  const auto sp = derive_supermodes(p);
  EXPECT_NEAR(sp.lambda, 0.0, 1e-15);
  EXPECT_NEAR(sp.Theta, 0.0, 1e-12);
  const HilbertSpace s = HilbertSpace::qubit_two_modes(3);
  const auto o = detail::qubit_mode_ops(s);
  const Operator quad = o.sp * o.a1 * o.a1;
  const Matrix base = build_rotating_frame_full(p, sp, s).static_part().matrix();
  const cplx overlap = (quad.matrix().adjoint() * base).trace();
  EXPECT_LT(std::abs(overlap), 1e-12);
  for (double t : {0.0, 0.1, 0.25}) {
    const Matrix ht = build_rotating_frame_full(p, sp, s).at(t).matrix();
    EXPECT_LT(std::abs((quad.matrix().adjoint() * ht).trace()), 1e-12);
  }
}

TEST(Supermodes, BasisChangeRoundTripAndOperators) {
  const double beta = 1.7;
  const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
  std::mt19937_64 rng(5);
  const Operator x(s, blockade::testing::random_hermitian(s.total_dim(), rng));
  EXPECT_LT(max_diff(supermode_to_bare(bare_to_supermode(x, beta), beta).matrix(), x.matrix()), 1e-12);

  const auto ops = supermode_operators(s, 1.0);
  const auto o = detail::qubit_mode_ops(s);
  EXPECT_LT(max_diff(ops.A_plus.matrix(), ((o.a1 + o.a2) * (1.0 / std::sqrt(2.0))).matrix()), 1e-15);

  // [A+, A-^dag] vanishes below the truncation edge.
  const auto sb = supermode_operators(s, beta);
  const Matrix c = commutator(sb.A_plus, sb.A_minus.adjoint()).matrix();
  for (int i = 0; i < s.total_dim(); ++i) {
    if (s.digit(i, 1) + s.digit(i, 2) >= 3) continue;
    EXPECT_LT(c.col(i).cwiseAbs().maxCoeff(), 1e-14);
  }

  // The transform maps A+ of the supermode basis onto c1 a1 + c2 a2 on the
  // low-photon manifolds.
  const Operator ap_super = o.a1;
  const Matrix mapped = supermode_to_bare(ap_super, beta).matrix();
  for (int i = 0; i < s.total_dim(); ++i) {
    if (s.digit(i, 1) + s.digit(i, 2) > 3) continue;
    EXPECT_LT((mapped.col(i) - sb.A_plus.matrix().col(i)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Supermodes, StatesInBareBasis) {
  const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
  auto at_beta = [](double beta) {
    SupermodeParams sp;
    sp.beta = beta;
    return sp;
  };
  const auto p1 = supermode_state(at_beta(1.0), s, SupermodeState::psi1_plus);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(p1.amplitudes()(s.index_of({kGround, 1, 0})) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p1.amplitudes()(s.index_of({kGround, 0, 1})) - r), 0.0, 1e-15);

  for (double beta : {0.3, 1.0, 1.7, 4.0}) {
    const auto sp = at_beta(beta);
    const auto plus = supermode_state(sp, s, SupermodeState::psi1_plus);
    const auto minus = supermode_state(sp, s, SupermodeState::psi1_minus);
    EXPECT_LT(std::abs(plus.inner(minus)), 1e-15);
    const double n = std::sqrt(1.0 + beta * beta);
    EXPECT_NEAR(plus.amplitudes()(s.index_of({kGround, 1, 0})).real(), beta / n, 1e-15);
    EXPECT_NEAR(plus.amplitudes()(s.index_of({kGround, 0, 1})).real(), 1.0 / n, 1e-15);
    const auto two = supermode_state(sp, s, SupermodeState::psi2_plus);
    const double b2 = 1.0 + beta * beta;
    EXPECT_NEAR(two.amplitudes()(s.index_of({kGround, 2, 0})).real(), beta * beta / b2, 1e-14);
    EXPECT_NEAR(two.amplitudes()(s.index_of({kGround, 1, 1})).real(), std::sqrt(2.0) * beta / b2, 1e-14);
    EXPECT_NEAR(two.amplitudes()(s.index_of({kGround, 0, 2})).real(), 1.0 / b2, 1e-14);
    const auto dp = supermode_state(sp, s, SupermodeState::dressed_plus);
    const auto dm = supermode_state(sp, s, SupermodeState::dressed_minus);
    EXPECT_LT(std::abs(dp.inner(dm)), 1e-15);
  }

  // A+ |psi2+> = sqrt(2) |psi1+> at beta = 1.7, with A+ from the bare modes.
  const auto sp = at_beta(1.7);
  const auto ops = supermode_operators(s, 1.7);
  const Vector lhs = ops.A_plus.matrix() * supermode_state(sp, s, SupermodeState::psi2_plus).amplitudes();
  const Vector rhs = std::sqrt(2.0) * supermode_state(sp, s, SupermodeState::psi1_plus).amplitudes();
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);

  EXPECT_THROW(supermode_state(sp, HilbertSpace::qubit_two_modes(2), SupermodeState::psi2_plus), InvalidDimension);
  EXPECT_NO_THROW(supermode_state(sp, HilbertSpace::qubit_two_modes(2), SupermodeState::psi1_plus));
}

TEST(Supermodes, SelectionRules) {
  const HilbertSpace s = HilbertSpace::qubit_two_modes(4);
  for (double beta : {0.5, 1.0, 2.0}) {
    SupermodeParams sp;
    sp.beta = beta;
    const auto ops = supermode_operators(s, beta);
    const Operator nplus = ops.A_plus.adjoint() * ops.A_plus;
    const Operator pairs = ops.A_plus.adjoint() * ops.A_plus.adjoint() * ops.A_plus * ops.A_plus;
    const auto m1 = supermode_state(sp, s, SupermodeState::psi1_minus);
    const auto m2 = supermode_state(sp, s, SupermodeState::psi2_minus);
    EXPECT_LT(std::abs(m1.amplitudes().dot(nplus.matrix() * m1.amplitudes())), 1e-12);
    EXPECT_LT(std::abs(m2.amplitudes().dot(pairs.matrix() * m2.amplitudes())), 1e-12);
    const Operator n1 = detail::qubit_mode_ops(s).a1.adjoint() * detail::qubit_mode_ops(s).a1;
    EXPECT_GT(std::abs(m1.amplitudes().dot(n1.matrix() * m1.amplitudes())), 0.1);
  }
}

TEST(Parameters, Helpers) {
  const auto p = reference_parameters();
  const auto sp = derive_supermodes(p);
  EXPECT_NEAR(sp.Delta_plus, 0.0, 1e-9);
  EXPECT_NEAR(p.omega_q, 2.0 * sp.Omega_plus_prime, 1e-9);

  const auto q = with_drive_phase(p, kPi / 2.0);
  EXPECT_NEAR(std::abs(q.eps1 - 0.95 * std::exp(-kI * (kPi / 4.0))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(q.eps2 - std::exp(kI * (kPi / 4.0))), 0.0, 1e-15);

  const auto d = with_drive_detuning(p, 2.5);
  EXPECT_NEAR(derive_supermodes(d).Delta_plus, 2.5, 1e-9);

  const auto split = with_supermode_splitting(p, 10.0);
  EXPECT_NEAR(derive_supermodes(split).Delta2, 10.0, 1e-9);

  const auto b = with_coupling_ratio(p, 2.0);
  const auto spb = derive_supermodes(b);
  EXPECT_NEAR(spb.beta, 2.0, 1e-14);
  EXPECT_NEAR(spb.Gbar, sp.Gbar, 1e-12);
  EXPECT_THROW(with_coupling_ratio(p, 0.0), InvalidArgument);
}
