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

// Operator algebra on truncated tensor-product Fock spaces.
//
// Conventions used everywhere in the library:
//  * subsystem order is (qubit, mode1, mode2); a composite index is
//    row-major in that order, i.e. the last subsystem varies fastest;
//  * the qubit basis is {|e>, |g>} with sigma_z|e> = +|e>;
//  * density matrices are vectorized by column stacking,
//    vec(rho)[i + j*d] = rho(i, j), so vec(A X B) = (B^T (x) A) vec(X).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "blockade/errors.hpp"

namespace blockade {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr cplx kI{0.0, 1.0};

class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw InvalidDimension("HilbertSpace needs at least one subsystem");
    total_ = 1;
    for (int d : dims_) {
      if (d < 2) throw InvalidDimension("subsystem dimension must be >= 2, got " + std::to_string(d));
      total_ *= d;
    }
  }

  // (qubit, mode1, mode2) with `levels` Fock states per mode.
  static HilbertSpace qubit_two_modes(int levels) { return HilbertSpace({2, levels, levels}); }

  const std::vector<int>& dims() const noexcept { return dims_; }
  int size() const noexcept { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  int total_dim() const noexcept { return total_; }

  // Row-major strides: index = sum_k digit_k * stride_k.
  std::vector<int> strides() const {
    std::vector<int> s(dims_.size(), 1);
    for (int k = size() - 2; k >= 0; --k) s[k] = s[k + 1] * dims_[k + 1];
    return s;
  }

  int digit(int index, int subsystem) const {
    return (index / strides()[subsystem]) % dims_[subsystem];
  }

  int index_of(const std::vector<int>& digits) const {
    if (static_cast<int>(digits.size()) != size()) throw InvalidDimension("digit count mismatch");
    int idx = 0;
    for (int k = 0; k < size(); ++k) idx = idx * dims_[k] + digits[k];
    return idx;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '[';
    for (int k = 0; k < size(); ++k) os << (k ? "," : "") << dims_[k];
    os << ']';
    return os.str();
  }

  bool operator==(const HilbertSpace& o) const { return dims_ == o.dims_; }
  bool operator!=(const HilbertSpace& o) const { return !(*this == o); }

 private:
  std::vector<int> dims_;
  int total_ = 0;
};

inline void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* where) {
  if (a != b) {
    throw InvalidDimension(std::string(where) + ": space mismatch " + a.to_string() + " vs " +
                           b.to_string());
  }
}

// Dense complex matrix tagged with the space it acts on.
class Operator {
 public:
  Operator(HilbertSpace space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
    if (m_.rows() != space_.total_dim() || m_.cols() != space_.total_dim()) {
      throw InvalidDimension("operator matrix must be " + std::to_string(space_.total_dim()) +
                             "x" + std::to_string(space_.total_dim()));
    }
  }

  static Operator identity(const HilbertSpace& s) {
    return {s, Matrix::Identity(s.total_dim(), s.total_dim())};
  }
  static Operator zero(const HilbertSpace& s) { return {s, Matrix::Zero(s.total_dim(), s.total_dim())}; }

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return space_.total_dim(); }

  Operator adjoint() const { return {space_, m_.adjoint()}; }
  cplx trace() const { return m_.trace(); }

  double hermiticity_residual() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
  bool is_hermitian(double tol) const { return hermiticity_residual() <= tol; }
  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

  Operator& operator+=(const Operator& o) {
    require_same_space(space_, o.space_, "operator+");
    m_ += o.m_;
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    require_same_space(space_, o.space_, "operator-");
    m_ -= o.m_;
    return *this;
  }
  Operator& operator*=(cplx c) {
    m_ *= c;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "operator*");
    return {a.space_, a.m_ * b.m_};
  }
  friend Operator operator*(cplx c, Operator a) { return a *= c; }
  friend Operator operator*(Operator a, cplx c) { return a *= c; }
  friend Operator operator*(double c, Operator a) { return a *= cplx(c); }
  friend Operator operator-(Operator a) { return a *= cplx(-1.0); }

 private:
  HilbertSpace space_;
  Matrix m_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

class StateVector {
 public:
  StateVector(HilbertSpace space, Vector amplitudes)
      : space_(std::move(space)), v_(std::move(amplitudes)) {
    if (v_.size() != space_.total_dim()) throw InvalidDimension("state vector length mismatch");
    if (std::abs(v_.squaredNorm() - 1.0) > 1e-12) {
      throw InvalidArgument("state vector is not normalized (|psi|^2 = " +
                            std::to_string(v_.squaredNorm()) + ")");
    }
  }

  static StateVector normalized(HilbertSpace space, Vector v) {
    const double n = v.norm();
    if (n == 0.0) throw InvalidArgument("cannot normalize the zero vector");
    return {std::move(space), v / n};
  }

  static StateVector basis(const HilbertSpace& space, const std::vector<int>& digits) {
    Vector v = Vector::Zero(space.total_dim());
    v(space.index_of(digits)) = 1.0;
    return {space, v};
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return v_; }

  cplx inner(const StateVector& o) const {
    require_same_space(space_, o.space_, "inner");
    return v_.dot(o.v_);
  }

  Operator projector() const { return {space_, v_ * v_.adjoint()}; }

 private:
  HilbertSpace space_;
  Vector v_;
};

struct DensityTolerance {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double positivity = 1e-8;
};

// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  using Tolerance = DensityTolerance;

  explicit DensityMatrix(Operator op, Tolerance tol = {}) : op_(std::move(op)) {
    const double herm = op_.hermiticity_residual();
    if (herm > tol.hermiticity) {
      throw InvalidArgument("density matrix not Hermitian (residual " + std::to_string(herm) + ")");
    }
    const double tr_err = std::abs(op_.trace() - 1.0);
    if (tr_err > tol.trace) {
      throw InvalidArgument("density matrix trace differs from 1 by " + std::to_string(tr_err));
    }
    const double lmin = min_eigenvalue();
    if (lmin < -tol.positivity) {
      throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(lmin));
    }
  }

  static DensityMatrix from_state(const StateVector& psi) { return DensityMatrix(psi.projector()); }

  static DensityMatrix maximally_mixed(const HilbertSpace& s) {
    return DensityMatrix(Operator(s, Matrix::Identity(s.total_dim(), s.total_dim()) /
                                         static_cast<double>(s.total_dim())));
  }

  const Operator& op() const noexcept { return op_; }
  const Matrix& matrix() const noexcept { return op_.matrix(); }
  const HilbertSpace& space() const noexcept { return op_.space(); }

  RealVector eigenvalues() const {
    const Matrix h = 0.5 * (op_.matrix() + op_.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  double min_eigenvalue() const { return eigenvalues().minCoeff(); }

 private:
  Operator op_;
};

// d^2 x d^2 generator acting on column-stacked density matrices.
class SuperOperator {
 public:
  SuperOperator(HilbertSpace space, SparseMatrix m) : space_(std::move(space)), m_(std::move(m)) {
    const long n = static_cast<long>(space_.total_dim()) * space_.total_dim();
    if (m_.rows() != n || m_.cols() != n) throw InvalidDimension("superoperator size mismatch");
    m_.makeCompressed();
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const SparseMatrix& matrix() const noexcept { return m_; }

  Vector apply(const Vector& v) const { return m_ * v; }

  double max_abs() const {
    double m = 0.0;
    for (int k = 0; k < m_.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m_, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
  }

  SuperOperator& operator+=(const SuperOperator& o) {
    require_same_space(space_, o.space_, "superoperator+");
    m_ += o.m_;
    m_.makeCompressed();
    return *this;
  }
  friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
  friend SuperOperator operator*(cplx c, const SuperOperator& a) {
    return {a.space_, SparseMatrix(c * a.m_)};
  }
  friend SuperOperator operator*(const SuperOperator& a, const SuperOperator& b) {
    require_same_space(a.space_, b.space_, "superoperator*");
    return {a.space_, SparseMatrix(a.m_ * b.m_)};
  }

 private:
  HilbertSpace space_;
  SparseMatrix m_;
};

// ---------------------------------------------------------------------------
// Single-subsystem operators

// Bosonic lowering operator on `levels` Fock states |0>..|levels-1>.
inline Operator annihilation(int levels) {
  if (levels < 2) throw InvalidDimension("Fock truncation needs at least 2 levels");
  Matrix a = Matrix::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {HilbertSpace({levels}), a};
}

inline Operator creation(int levels) { return annihilation(levels).adjoint(); }

inline Operator number(int levels) {
  Matrix n = Matrix::Zero(levels, levels);
  for (int k = 0; k < levels; ++k) n(k, k) = static_cast<double>(k);
  return {HilbertSpace({levels}), n};
}

enum class Pauli { x, y, z, plus, minus };

// Basis {|e>, |g>}: index 0 is the excited state.
inline Operator pauli(Pauli which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case Pauli::x: m << 0, 1, 1, 0; break;
    case Pauli::y: m << 0, -kI, kI, 0; break;
    case Pauli::z: m << 1, 0, 0, -1; break;
    case Pauli::plus: m << 0, 1, 0, 0; break;
    case Pauli::minus: m << 0, 0, 1, 0; break;
  }
  return {HilbertSpace({2}), m};
}

inline constexpr int kExcited = 0;
inline constexpr int kGround = 1;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// identity (x) ... (x) op (x) ... (x) identity, with op at `position`.
inline Operator embed(const Operator& op, const HilbertSpace& space, int position) {
  if (op.space().size() != 1) throw InvalidDimension("embed expects a single-subsystem operator");
  if (position < 0 || position >= space.size()) throw InvalidDimension("embed position out of range");
  if (op.dim() != space.dim(position)) {
    throw InvalidDimension("embed: operator dimension " + std::to_string(op.dim()) +
                           " does not match subsystem " + std::to_string(position) + " of " +
                           space.to_string());
  }
  Matrix m = Matrix::Identity(1, 1);
  for (int k = 0; k < space.size(); ++k) {
    const Matrix factor = k == position ? op.matrix() : Matrix::Identity(space.dim(k), space.dim(k));
    m = kron(m, factor);
  }
  return {space, m};
}

// ---------------------------------------------------------------------------
// Partial operations

inline Operator partial_trace(const Operator& op, const std::set<int>& keep) {
  const HilbertSpace& s = op.space();
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  for (int k : keep)
    if (k < 0 || k >= s.size()) throw InvalidArgument("partial_trace: subsystem index out of range");

  std::vector<int> kept_dims, traced;
  for (int k = 0; k < s.size(); ++k) {
    if (keep.count(k)) kept_dims.push_back(s.dim(k));
    else traced.push_back(k);
  }
  const HilbertSpace reduced(kept_dims);
  int traced_total = 1;
  for (int k : traced) traced_total *= s.dim(k);

  // full index for each (reduced index, traced index) pair
  const int dr = reduced.total_dim();
  std::vector<int> compose(static_cast<std::size_t>(dr) * traced_total);
  const auto strides = s.strides();
  for (int r = 0; r < dr; ++r) {
    for (int t = 0; t < traced_total; ++t) {
      int idx = 0, rr = r, tt = t;
      for (int k = s.size() - 1; k >= 0; --k) {
        int d;
        if (keep.count(k)) {
          d = rr % s.dim(k);
          rr /= s.dim(k);
        } else {
          d = tt % s.dim(k);
          tt /= s.dim(k);
        }
        idx += d * strides[k];
      }
      compose[static_cast<std::size_t>(r) * traced_total + t] = idx;
    }
  }

  Matrix out = Matrix::Zero(dr, dr);
  const Matrix& m = op.matrix();
  for (int r = 0; r < dr; ++r)
    for (int c = 0; c < dr; ++c) {
      cplx acc = 0.0;
      for (int t = 0; t < traced_total; ++t)
        acc += m(compose[static_cast<std::size_t>(r) * traced_total + t],
                 compose[static_cast<std::size_t>(c) * traced_total + t]);
      out(r, c) = acc;
    }
  return {reduced, out};
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& keep) {
  return DensityMatrix(partial_trace(rho.op(), keep));
}

inline Operator partial_transpose(const Operator& op, int subsystem) {
  const HilbertSpace& s = op.space();
  if (subsystem < 0 || subsystem >= s.size())
    throw InvalidArgument("partial_transpose: subsystem index out of range");
  const int stride = s.strides()[subsystem];
  const int d = s.dim(subsystem);
  const int n = s.total_dim();
  Matrix out(n, n);
  const Matrix& m = op.matrix();
  for (int i = 0; i < n; ++i) {
    const int di = (i / stride) % d;
    for (int j = 0; j < n; ++j) {
      const int dj = (j / stride) % d;
      out(i + (dj - di) * stride, j + (di - dj) * stride) = m(i, j);
    }
  }
  return {s, out};
}

inline Operator partial_transpose(const DensityMatrix& rho, int subsystem) {
  return partial_transpose(rho.op(), subsystem);
}

// Tr(rho * op)
inline cplx expectation(const Operator& rho, const Operator& op) {
  require_same_space(rho.space(), op.space(), "expectation");
  return rho.matrix().transpose().cwiseProduct(op.matrix()).sum();
}

inline cplx expectation(const DensityMatrix& rho, const Operator& op) {
  return expectation(rho.op(), op);
}

// ---------------------------------------------------------------------------
// Vectorization and superoperators (column stacking)

inline Vector vectorize(const Operator& op) {
  const Matrix& m = op.matrix();
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Vector vectorize(const DensityMatrix& rho) { return vectorize(rho.op()); }

inline Operator devectorize(const Vector& v, const HilbertSpace& space) {
  const int d = space.total_dim();
  if (v.size() != static_cast<Eigen::Index>(d) * d) throw InvalidDimension("devectorize: length mismatch");
  return {space, Eigen::Map<const Matrix>(v.data(), d, d)};
}

inline SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

inline SparseMatrix to_sparse(const Matrix& m) { return m.sparseView(0.0, 0.0); }

inline SparseMatrix sparse_identity(int d) {
  SparseMatrix id(d, d);
  id.setIdentity();
  return id;
}

// spre(A) vec(rho) = vec(A rho)
inline SuperOperator spre(const Operator& a) {
  return {a.space(), sparse_kron(sparse_identity(a.dim()), to_sparse(a.matrix()))};
}

// spost(B) vec(rho) = vec(rho B)
inline SuperOperator spost(const Operator& b) {
  return {b.space(), sparse_kron(to_sparse(b.matrix().transpose()), sparse_identity(b.dim()))};
}

}  // namespace blockade
