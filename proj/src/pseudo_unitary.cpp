#include "holonomy/pseudo_unitary.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace holonomy {

Eigen::MatrixXd SvdTriple::sigma_matrix() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(left.rows(), right.rows());
  s.diagonal().head(diag.size()) = diag;
  return s;
}

ComplexMatrix SvdTriple::reconstruct() const {
  return left * sigma_matrix().cast<Complex>() * right.adjoint();
}

SvdTriple complex_svd(const ComplexMatrix& w, double group_tol) {
  if (!w.allFinite()) throw Error(ErrorCode::numerical, "complex_svd: non-finite input");
  Eigen::JacobiSVD<ComplexMatrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdTriple out;
  out.left = svd.matrixU();
  out.right = svd.matrixV();
  out.diag = svd.singularValues();
  if (!out.left.allFinite() || !out.right.allFinite() || !out.diag.allFinite()) {
    throw Error(ErrorCode::numerical, "complex_svd: kernel produced non-finite factors");
  }
  const double cutoff = out.diag.size() > 0 ? group_tol * out.diag(0) : 0.0;
  out.rank = 0;
  for (Index j = 0; j < out.diag.size(); ++j) {
    if (out.diag(j) > cutoff) ++out.rank;
  }
  return out;
}

ComplexMatrix expm_generic(const ComplexMatrix& a) {
  detail::require(a.rows() == a.cols(), "expm_generic expects a square matrix");
  if (!a.allFinite()) throw Error(ErrorCode::numerical, "expm_generic: non-finite input");
  ComplexMatrix out = a.exp();
  if (!out.allFinite()) throw Error(ErrorCode::numerical, "expm_generic: overflow");
  return out;
}

}  // namespace holonomy
