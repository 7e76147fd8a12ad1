#pragma once

namespace holonomy {

/// Numerical knobs shared by every module. Defaults are the documented ones.
struct Tolerances {
  // Singular values closer than group_tol * sigma_1 share a group; below it they count as zero.
  double group_tol = 1e-9;
  // Composite Simpson must agree with its half-resolution estimate to this (relative to max(1,|I|)).
  double quad_tol = 1e-10;
  // Absolute tolerance of the adaptive radial quadrature behind the omega_1 potential.
  double potential_tol = 1e-12;
  // Membership in u(n,m) for inputs to the h+m split.
  double algebra_tol = 1e-10;
  // Off-diagonal block norm below which a product counts as lying in U(n) x U(m).
  double separation_tol = 1e-9;
  // Vandermonde systems above this 1-norm condition number are rejected.
  double max_condition = 1e12;
  // Quadrature panels for line integrals along a curve (multiple of 4, >= 64).
  int samples = 4096;
  // RK4 steps for the transport oracle (>= 64).
  int ode_steps = 16384;
};

}  // namespace holonomy
