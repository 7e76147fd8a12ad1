#pragma once

// The complex surface {exp(hat(zW)) : z in C} through the identity of U(n,m), with W = X / |hat X|.
//
// Everything is evaluated in the SVD frame Omega = diag(A, B) of W = B Sigma A^*, where the
// surface decouples into 2x2 blocks of hyperbolic rotations with rates sigma_j.

#include <optional>
#include <vector>

#include <json.hpp>

#include "holonomy/config.hpp"
#include "holonomy/pseudo_unitary.hpp"

namespace holonomy {

/// A class of equal positive singular values (0-based indices into SurfaceSpec::sigma).
struct SingularGroup {
  double value = 0.0;
  std::vector<Index> indices;

  Index multiplicity() const { return static_cast<Index>(indices.size()); }
};

struct SurfaceSpec {
  Signature sig;
  ComplexMatrix x;      // m x n input
  double x_norm = 0.0;  // |hat X|
  ComplexMatrix w;      // X / |hat X|
  SvdTriple svd;        // of w
  // Length n, decreasing; entries past the rank are exact zeros and entries of a group share
  // the group's value.
  Eigen::VectorXd sigma;
  Index rank = 0;
  std::vector<SingularGroup> groups;  // strictly decreasing values

  Index distinct() const { return static_cast<Index>(groups.size()); }
  Eigen::VectorXd group_values() const;
  const ComplexMatrix& a() const { return svd.right; }
  const ComplexMatrix& b() const { return svd.left; }
  /// Omega = diag(A, B).
  ComplexMatrix frame() const;
  double sigma_at(Index j) const { return j < sigma.size() ? sigma(j) : 0.0; }
};

/// Normalizes X, decomposes it and groups the singular values. Throws trivial_X on X = 0.
SurfaceSpec build_surface(const Signature& sig, const ComplexMatrix& x, double group_tol = 1e-9);

nlohmann::json surface_to_json(const SurfaceSpec& s);

/// exp(hat(zW)) through the closed form Omega [[Gamma_n, Lambda^*], [Lambda, Gamma_m]] Omega^*.
ComplexMatrix exp_surface_point(const SurfaceSpec& s, Complex z);

/// Radial potential of omega_0: sum_j (1/2) sinh^2(sigma_j r).
double omega0_potential(const SurfaceSpec& s, double r);
/// d/dr of omega0_potential: sum_j sigma_j sinh(sigma_j r) cosh(sigma_j r).
double omega0_density(const SurfaceSpec& s, double r);
/// omega_0(d/dr, d/dtheta) evaluated straight from its determinant definition.
double omega0_density_from_definition(const SurfaceSpec& s, double r, double theta);

/// Density of the metric area form: (1/2) sqrt(sum_j sinh^2(2 sigma_j r)).
double omega1_density(const SurfaceSpec& s, double r);
/// Integral of omega1_density over [0, r] by adaptive Gauss-Kronrod quadrature.
double omega1_potential(const SurfaceSpec& s, double r, double tol = 1e-12);

/// Left-translated coordinate vectors at exp(hat(zW)).
struct TangentPair {
  ComplexMatrix d_r;
  ComplexMatrix d_theta;
  ComplexMatrix d_theta_horizontal;  // m-part of d_theta
};

TangentPair tangent_pushforwards(const SurfaceSpec& s, double r, double theta);
inline TangentPair tangent_pushforwards(const SurfaceSpec& s, Complex z) {
  return tangent_pushforwards(s, std::abs(z), std::arg(z));
}

/// One level of the generating families of the Lie algebra spanned by hat X and hat iX.
struct LieGenerator {
  ComplexMatrix v;   // diag(i (X^*X)^k, -i (XX^*)^k)
  ComplexMatrix x;   // hat(X (X^*X)^{k-1})
  ComplexMatrix ix;  // hat(i X (X^*X)^{k-1})
};

std::vector<LieGenerator> lie_generators(const SurfaceSpec& s, Index k_max);

/// Rank of a set of matrices as real vectors, after normalizing each one.
Index numerical_rank(const std::vector<ComplexMatrix>& family, double rel_tol = 1e-9);

struct GeodesicCheck {
  bool geodesic = false;
  double closure_residual = 0.0;  // norm of [[m',m'],m'] outside m'
  // Only set when all positive singular values coincide.
  std::optional<double> bracket_identity_residual;
};

GeodesicCheck totally_geodesic_check(const SurfaceSpec& s, double tol = 1e-10);

/// Norm of the off-diagonal blocks of exp(-hat(z1 W)) exp(hat(z2 W)).
double separation_residual(const SurfaceSpec& s, Complex z1, Complex z2);
/// True iff the two points project to the same point of D_{n,m}.
bool point_separation_check(const SurfaceSpec& s, Complex z1, Complex z2, double tol = 1e-9);

}  // namespace holonomy
