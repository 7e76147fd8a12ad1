#pragma once

// Dense linear algebra on U(n,m) and its Lie algebra u(n,m).
//
// Conventions: the Hermitian form is F(v,w) = v^* L w with L = diag(-I_n, I_m);
// g is in U(n,m) iff g^* L g = L, and a is in u(n,m) iff a^* L + L a = 0.
// Block index 0..n-1 is the negative block, n..n+m-1 the positive block.

#include <algorithm>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "holonomy/error.hpp"

namespace holonomy {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Eigen::Index;

/// Signature (n, m) of the indefinite form; n counts the negative directions.
struct Signature {
  Index n = 1;
  Index m = 1;

  Signature() = default;
  Signature(Index negative, Index positive) : n(negative), m(positive) {
    if (n < 1 || m < 1) {
      throw Error(ErrorCode::dimension, "signature blocks must be >= 1, got (" +
                                            std::to_string(n) + "," + std::to_string(m) + ")");
    }
  }

  Index size() const { return n + m; }
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// The form matrix diag(-I_n, I_m).
template <typename Scalar = Complex>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> form_matrix(const Signature& sig) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(sig.size());
  d.head(sig.n).setConstant(Scalar(-1));
  d.tail(sig.m).setConstant(Scalar(1));
  return d.asDiagonal();
}

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::dimension, what);
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, Index size, const char* name) {
  require(a.rows() == size && a.cols() == size,
          std::string(name) + " must be " + std::to_string(size) + "x" + std::to_string(size) +
              ", got " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

template <typename Derived>
ComplexMatrix algebra_defect(const Signature& sig, const Eigen::MatrixBase<Derived>& a) {
  const ComplexMatrix lam = form_matrix(sig);
  return a.adjoint() * lam + lam * a;
}

}  // namespace detail

/// F(v, w) = -sum_{k<n} conj(v_k) w_k + sum_{s>=n} conj(v_s) w_s.
template <typename DerivedV, typename DerivedW>
Complex hermitian_form(const Signature& sig, const Eigen::MatrixBase<DerivedV>& v,
                       const Eigen::MatrixBase<DerivedW>& w) {
  detail::require(v.size() == sig.size() && w.size() == sig.size(),
                  "hermitian_form expects vectors of length " + std::to_string(sig.size()));
  // Eigen's dot conjugates its left operand.
  return -v.head(sig.n).dot(w.head(sig.n)) + v.tail(sig.m).dot(w.tail(sig.m));
}

struct MembershipCheck {
  bool ok = false;
  double residual = 0.0;
};

/// Tests g^* L g = L; residual is the Frobenius norm of the difference.
template <typename Derived>
MembershipCheck is_pseudo_unitary(const Signature& sig, const Eigen::MatrixBase<Derived>& g,
                                  double tol) {
  detail::require_square(g, sig.size(), "is_pseudo_unitary: g");
  const ComplexMatrix lam = form_matrix(sig);
  const double residual = (g.adjoint() * lam * g - lam).norm();
  return {residual <= tol, residual};
}

/// <a, b> = (1/2) Re Tr(a^* b), the left-invariant metric on u(n,m).
template <typename DerivedA, typename DerivedB>
double killing_inner(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  detail::require(a.rows() == a.cols() && a.rows() == b.rows() && a.cols() == b.cols(),
                  "killing_inner expects square matrices of equal size");
  return 0.5 * a.conjugate().cwiseProduct(b).sum().real();
}

/// Block matrix [[0, x^*], [x, 0]] for x of shape m x n.
template <typename Derived>
ComplexMatrix hat_embed(const Signature& sig, const Eigen::MatrixBase<Derived>& x) {
  detail::require(x.rows() == sig.m && x.cols() == sig.n,
                  "hat_embed expects an " + std::to_string(sig.m) + "x" + std::to_string(sig.n) +
                      " matrix, got " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  ComplexMatrix out = ComplexMatrix::Zero(sig.size(), sig.size());
  out.topRightCorner(sig.n, sig.m) = x.adjoint();
  out.bottomLeftCorner(sig.m, sig.n) = x;
  return out;
}

/// Frobenius norm of a^* L + L a; zero exactly for elements of u(n,m).
template <typename Derived>
double algebra_residual(const Signature& sig, const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, sig.size(), "algebra_residual: a");
  return detail::algebra_defect(sig, a).norm();
}

struct AlgebraSplit {
  ComplexMatrix h;  // block-diagonal, in u(n) + u(m)
  ComplexMatrix m;  // block-off-diagonal, in the complement
};

/// Canonical split u(n,m) = h + m. The parts sum to `a` exactly.
template <typename Derived>
AlgebraSplit decompose_h_m(const Signature& sig, const Eigen::MatrixBase<Derived>& a,
                           double tol = 1e-10) {
  detail::require_square(a, sig.size(), "decompose_h_m: a");
  const double defect = algebra_residual(sig, a);
  const double scale = std::max(1.0, static_cast<double>(a.norm()));
  if (defect > tol * scale) {
    throw Error(ErrorCode::not_in_algebra,
                "a^*L + La has norm " + std::to_string(defect) + " (tolerance " +
                    std::to_string(tol * scale) + ")");
  }
  AlgebraSplit split{ComplexMatrix::Zero(sig.size(), sig.size()),
                     ComplexMatrix::Zero(sig.size(), sig.size())};
  split.h.topLeftCorner(sig.n, sig.n) = a.topLeftCorner(sig.n, sig.n);
  split.h.bottomRightCorner(sig.m, sig.m) = a.bottomRightCorner(sig.m, sig.m);
  split.m.topRightCorner(sig.n, sig.m) = a.topRightCorner(sig.n, sig.m);
  split.m.bottomLeftCorner(sig.m, sig.n) = a.bottomLeftCorner(sig.m, sig.n);
  return split;
}

template <typename DerivedA, typename DerivedB>
ComplexMatrix commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a * b - b * a;
}

/// Singular value decomposition w = left * Sigma * right^*.
struct SvdTriple {
  ComplexMatrix left;    // B in U(m)
  Eigen::VectorXd diag;  // sigma_1 >= ... >= sigma_a, a = min(m, n)
  ComplexMatrix right;   // A in U(n)
  Index rank = 0;

  /// The m x n rectangular Sigma.
  Eigen::MatrixXd sigma_matrix() const;
  ComplexMatrix reconstruct() const;
};

/// Full complex SVD; rank counts sigma_j > group_tol * sigma_1.
SvdTriple complex_svd(const ComplexMatrix& w, double group_tol = 1e-9);

/// General dense exponential by scaling and squaring.
ComplexMatrix expm_generic(const ComplexMatrix& a);

/// True when every entry is finite.
template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

}  // namespace holonomy
