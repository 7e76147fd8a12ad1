#pragma once

// Holonomy displacement along a closed curve on the surface through the identity.
//
// The horizontal lift is gamma(t) exp(Psi(t)) U(m) with gamma(t) = exp(hat(z(t) W)) and
// Psi(t) = i sum_k psi_k(t) (W^*W)^k; horizontality reduces to the linear system
//   sum_k sigma_l^{2k} psi_k'(t) = theta'(t) sinh^2(sigma_l r(t)),  l = 1..p,
// over the p distinct positive singular values, and the displacement is exp(Psi(1)).

#include <vector>

#include <json.hpp>

#include "holonomy/config.hpp"
#include "holonomy/curve.hpp"
#include "holonomy/surface.hpp"

namespace holonomy {

using ExtVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using ExtMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// C(l, k) = sigma_{j_l}^{2k}, k = 1..p, over the distinct positive singular values.
struct VandermondeSystem {
  Eigen::MatrixXd c;
  Eigen::MatrixXd c_inverse;
  double condition = 0.0;         // ||C||_1 ||C^{-1}||_1
  double inverse_residual = 0.0;  // ||C C^{-1} - I||_F

  /// Solves C psi = rhs in extended precision with iterative refinement.
  ExtVector solve(const ExtVector& rhs) const;
  /// C psi in extended precision.
  ExtVector apply(const ExtVector& psi) const;

  ExtMatrix c_ext;
};

/// Throws ill_conditioned when the condition number exceeds max_condition.
VandermondeSystem vandermonde_system(const SurfaceSpec& s, double max_condition = 1e12);

struct PsiTrajectory {
  std::vector<double> times;            // t_{2i}
  std::vector<Eigen::VectorXd> values;  // psi(t_{2i}), psi(0) = 0
  ExtVector final_coeffs;               // psi(1)
  Eigen::VectorXd group_integrals;      // int_0^1 theta' sinh^2(sigma_{j_l} r) dt
  double defining_residual = 0.0;       // max over nodes of |C psi'(t) - b(t)| / max(1, |b(t)|)
  double quadrature_error = 0.0;        // Richardson estimate
};

PsiTrajectory solve_psi_trajectory(const SurfaceSpec& s, const ClosedCurve& c,
                                   const VandermondeSystem& sys, const Tolerances& tol = {});
PsiTrajectory solve_psi_trajectory(const SurfaceSpec& s, const ClosedCurve& c, const Tolerances& tol = {});

/// Psi = sum_k i psi_k (W^*W)^k with matrix powers formed directly.
ComplexMatrix assemble_psi(const SurfaceSpec& s, const Eigen::VectorXd& psi);
/// Psi = A diag(i sum_k sigma_j^{2k} psi_k) A^* in the SVD frame.
ComplexMatrix assemble_psi_spectral(const SurfaceSpec& s, const VandermondeSystem& sys, const ExtVector& psi);

enum class AreaForm { omega0, omega1 };

/// Signed area enclosed by c: the line integral of P(r) dtheta with P the radial potential.
double enclosed_area(const SurfaceSpec& s, const ClosedCurve& c, AreaForm form, const Tolerances& tol = {});

/// Distance of psi from Span_R{i (W^*W)^k}_{k=1..q}, relative to max(1, |psi|).
double span_membership_residual(const SurfaceSpec& s, const ComplexMatrix& psi);

struct HolonomyResult {
  ComplexMatrix psi;       // in u(n)
  ComplexMatrix holonomy;  // exp(psi) in U(n)
  double area0 = 0.0;
  double area1 = 0.0;
  double trace_residual = 0.0;  // |Tr psi - 2 i area0|
  Eigen::VectorXd psi_coeffs;   // psi_k(1) - psi_k(0), k = 1..p

  double assembly_residual = 0.0;        // power route vs spectral route, relative
  double span_residual = 0.0;
  double anti_hermitian_residual = 0.0;  // |psi + psi^*|
  double unitarity_residual = 0.0;       // |U^*U - I|
  double defining_residual = 0.0;
  double quadrature_error = 0.0;
  double condition = 0.0;
  bool negative_orientation = false;  // area0 < 0
};

HolonomyResult holonomy(const SurfaceSpec& s, const ClosedCurve& c, const Tolerances& tol = {});

nlohmann::json holonomy_to_json(const HolonomyResult& h);

struct DiagonalFormCheck {
  bool ok = false;
  double psi_residual = 0.0;  // |psi - A diag(2i/q Area, ..., 0, ...) A^*|
  double area_gap = 0.0;      // |area0 - area1|
};

/// Only for a single distinct positive singular value; otherwise throws not_applicable.
DiagonalFormCheck corollary_diagonal_form(const SurfaceSpec& s, const HolonomyResult& result, double tol = 1e-8);

}  // namespace holonomy
