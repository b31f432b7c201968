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

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "blockade/errors.hpp"
#include "blockade/fockspace.hpp"

namespace blockade {

// ---------------------------------------------------------------------------
// s-parametrized quasiprobabilities

// <l| T^(s)(alpha) |k>. For k >= l the Laguerre factor is carried as
// M_l = z^l L_l^m(x) so that s = -1 (z = 0, x infinite) stays finite.
inline cplx t_matrix_element(int l, int k, cplx alpha, double s) {
  if (!(s < 1.0)) throw InvalidArgument("t_matrix_element: s must be < 1 (P function excluded)");
  if (s < -1.0) throw InvalidArgument("t_matrix_element: s must be >= -1");
  if (l < 0 || k < 0) throw InvalidArgument("t_matrix_element: negative Fock index");
  if (k < l) return std::conj(t_matrix_element(k, l, alpha, s));

  const int m = k - l;
  const double a2 = std::norm(alpha);
  const double y = 2.0 / (1.0 - s);
  const double z = (s + 1.0) / (s - 1.0);
  const double u = -4.0 * a2 / ((1.0 - s) * (1.0 - s));  // z * x
  const double c = std::exp(-2.0 * a2 / (1.0 - s)) / std::numbers::pi;

  double prev = 1.0, cur = 1.0;
  if (l >= 1) {
    cur = z * (1.0 + m) - u;
    for (int j = 1; j < l; ++j) {
      const double next = (((2.0 * j + 1.0 + m) * z - u) * cur - (j + m) * z * z * prev) / (j + 1.0);
      prev = cur;
      cur = next;
    }
  }

  double ratio = 1.0;  // sqrt(l! / k!)
  for (int j = l + 1; j <= k; ++j) ratio /= std::sqrt(static_cast<double>(j));
  return c * ratio * std::pow(y, m + 1) * std::pow(std::conj(alpha), m) * cur;
}

struct QpdGridSpec {
  double re_half_width = 3.0;  // Re(alpha) in [-w, w]
  double im_half_width = 3.0;
  int resolution = 201;

  double re_at(int i) const { return axis(re_half_width, i); }
  double im_at(int j) const { return axis(im_half_width, j); }
  double cell_area() const {
    return (2.0 * re_half_width / (resolution - 1)) * (2.0 * im_half_width / (resolution - 1));
  }

  void validate() const {
    if (resolution < 2) throw InvalidArgument("QPD grid needs at least 2 points per axis");
    if (!(re_half_width > 0.0) || !(im_half_width > 0.0)) throw InvalidArgument("QPD grid ranges must be positive");
  }

 private:
  double axis(double w, int i) const { return -w + 2.0 * w * i / (resolution - 1); }
};

struct QpdGrid {
  double s = 0.0;
  QpdGridSpec spec;
  RealMatrix values;  // values(i, j) at alpha = re_at(i) + i im_at(j)
  double max_imag_residue = 0.0;

  double min() const { return values.minCoeff(); }
  double max() const { return values.maxCoeff(); }
  // trapezoid-free Riemann sum; adequate when the state fits inside the grid
  double integral() const { return values.sum() * spec.cell_area(); }
};

namespace detail {

inline void require_single_mode(const DensityMatrix& rho, const char* who) {
  if (rho.space().size() != 1)
    throw InvalidArgument(std::string(who) + ": expects a single-mode state; apply partial_trace first");
}

}  // namespace detail

// W^(s)(alpha) = sum_{k,l} <k|rho|l> <l|T|k> on the grid.
inline QpdGrid qpd(const DensityMatrix& rho, double s, const QpdGridSpec& spec = {}) {
  detail::require_single_mode(rho, "qpd");
  spec.validate();
  if (!(s < 1.0) || s < -1.0) throw InvalidArgument("qpd: s must lie in [-1, 1)");
  const Matrix& m = rho.matrix();
  const int d = static_cast<int>(m.rows());
  QpdGrid g;
  g.s = s;
  g.spec = spec;
  g.values.resize(spec.resolution, spec.resolution);
  for (int i = 0; i < spec.resolution; ++i) {
    for (int j = 0; j < spec.resolution; ++j) {
      const cplx alpha(spec.re_at(i), spec.im_at(j));
      cplx w = 0.0;
      for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k) w += m(k, l) * t_matrix_element(l, k, alpha, s);
      g.values(i, j) = w.real();
      g.max_imag_residue = std::max(g.max_imag_residue, std::abs(w.imag()));
    }
  }
  return g;
}

inline constexpr double kQpdNegativityThreshold = -1e-9;

// ---------------------------------------------------------------------------
// Nonclassical depth

struct QubitDepth {
  double tau = 0.0;
  bool undefined = false;      // vacuum-like: denominator vanished, tau reported as 0
  double outside_population = 0.0;
};

// Closed form for the state truncated to {|0>, |1>} and renormalized.
inline QubitDepth nonclassical_depth_qubit(const DensityMatrix& rho, double threshold = 0.01) {
  detail::require_single_mode(rho, "nonclassical_depth_qubit");
  const Matrix& m = rho.matrix();
  const double p0 = m(0, 0).real(), p1 = m(1, 1).real();
  QubitDepth out;
  out.outside_population = std::max(0.0, 1.0 - p0 - p1);
  if (out.outside_population > threshold)
    throw InvalidArgument("nonclassical_depth_qubit: population outside the qubit block is " +
                          std::to_string(out.outside_population));
  const double norm = p0 + p1;
  const double r11 = p1 / norm;
  const double r01 = std::abs(m(0, 1)) / norm;
  const double den = r11 - r01 * r01;
  if (den <= 1e-14) {
    out.undefined = true;
    return out;
  }
  out.tau = r11 * r11 / den;
  return out;
}

struct DepthSearch {
  double s_tol = 5e-3;
  QpdGridSpec grid;
};

// Bisection for the threshold s0 beyond which W^(s) turns negative on the grid.
inline double nonclassical_depth_numeric(const DensityMatrix& rho, const DepthSearch& opt = {}) {
  detail::require_single_mode(rho, "nonclassical_depth_numeric");
  if (!(opt.s_tol > 0.0) || opt.s_tol >= 1.0) throw InvalidArgument("s_tol must lie in (0, 1)");
  opt.grid.validate();

  auto negative = [&](double s, const QpdGridSpec& spec) { return qpd(rho, s, spec).min() < kQpdNegativityThreshold; };

  const double cap = 1.0 - opt.s_tol;
  if (!negative(cap, opt.grid)) return 0.0;  // classical up to the search boundary
  double lo = -1.0, hi = cap;
  if (negative(lo, opt.grid)) return 1.0;
  while (hi - lo > opt.s_tol) {
    const double mid = 0.5 * (lo + hi);
    (negative(mid, opt.grid) ? hi : lo) = mid;
  }
  const double s0 = 0.5 * (lo + hi);

  // negativity just past s0 must survive halving the resolution
  if (opt.grid.resolution >= 5) {
    QpdGridSpec coarse = opt.grid;
    coarse.resolution = (opt.grid.resolution + 1) / 2;
    const double probe = std::min(cap, s0 + 4.0 * opt.s_tol);
    if (negative(probe, opt.grid) && !negative(probe, coarse))
      throw ResolutionError("nonclassical_depth_numeric: negativity near s = " + std::to_string(probe) +
                            " vanishes on the half-resolution grid; refine the grid");
  }
  return 0.5 * (1.0 - s0);
}

// ---------------------------------------------------------------------------
// Photon statistics and entanglement

struct PhotonProbabilities {
  RealMatrix joint;      // P(n1, n2)
  RealVector mode1;      // P^(1)(n)
  RealVector mode2;      // P^(2)(n)
  double psi1_plus = 0.0;
};

// rho on (qubit, mode1, mode2) in the bare Fock basis.
inline PhotonProbabilities photon_probabilities(const DensityMatrix& rho, double beta) {
  const HilbertSpace& s = rho.space();
  if (s.size() != 3 || s.dim(0) != 2) throw InvalidArgument("photon_probabilities: expects (qubit, mode, mode)");
  const Operator modes = partial_trace(rho.op(), {1, 2});
  const int l1 = s.dim(1), l2 = s.dim(2);
  const Matrix& m = modes.matrix();

  PhotonProbabilities p;
  p.joint.resize(l1, l2);
  for (int a = 0; a < l1; ++a)
    for (int b = 0; b < l2; ++b) p.joint(a, b) = m(a * l2 + b, a * l2 + b).real();
  p.mode1 = p.joint.rowwise().sum();
  p.mode2 = p.joint.colwise().sum().transpose();

  // |psi1+> = A+^dag |0,0> = c1 |1,0> + c2 |0,1>
  const double c1 = beta / std::sqrt(1.0 + beta * beta), c2 = 1.0 / std::sqrt(1.0 + beta * beta);
  const int i10 = 1 * l2 + 0, i01 = 0 * l2 + 1;
  const cplx amp = c1 * c1 * m(i10, i10) + c2 * c2 * m(i01, i01) + c1 * c2 * (m(i10, i01) + m(i01, i10));
  p.psi1_plus = amp.real();
  return p;
}

struct Negativity {
  double trace_norm = 1.0;   // ||rho^{T1}||_1
  double negativity = 0.0;   // N_E
  double log_negativity = 0.0;
};

inline Negativity logarithmic_negativity(const DensityMatrix& rho12) {
  if (rho12.space().size() != 2) throw InvalidArgument("logarithmic_negativity: expects a two-mode state");
  const Operator pt = partial_transpose(rho12, 0);
  const Matrix h = 0.5 * (pt.matrix() + pt.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  Negativity out;
  out.trace_norm = es.eigenvalues().cwiseAbs().sum();
  out.negativity = 0.5 * (out.trace_norm - 1.0);
  out.log_negativity = std::max(0.0, std::log2(out.trace_norm));
  return out;
}

}  // namespace blockade
