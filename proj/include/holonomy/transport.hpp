#pragma once

// Brute-force parallel transport: integrates the horizontality condition u' = -M11(t) u directly,
// where M11 is the u(n)-block of gamma^{-1} gamma' along gamma(t) = exp(hat(z(t) W)).

#include <vector>

#include <json.hpp>

#include "holonomy/curve.hpp"
#include "holonomy/holonomy.hpp"
#include "holonomy/surface.hpp"

namespace holonomy {

struct TransportTrace {
  std::vector<double> times;
  std::vector<ComplexMatrix> u;  // u(t_i), u(0) = I
  double unitarity_drift = 0.0;  // max_i |u^*u - I|, after projection
  double max_step_defect = 0.0;  // max_i |u^*u - I| of the raw RK4 step, before projection
  ComplexMatrix holonomy_oracle; // u(1)
  int steps = 0;
};

/// r'(t) (d_r)_11 + theta'(t) (d_theta)_11 at z(t).
ComplexMatrix base_velocity_block(const SurfaceSpec& s, const ClosedCurve& c, double t);

/// Classical RK4 on a uniform grid, each step followed by the polar projection onto U(n).
/// Throws numerical when a raw step leaves U(n) by more than 1e-6.
TransportTrace integrate_lift(const SurfaceSpec& s, const ClosedCurve& c, int steps = 16384,
                              bool keep_trajectory = false);

/// |analytic.holonomy - oracle.holonomy_oracle|_F.
double compare_holonomies(const HolonomyResult& analytic, const TransportTrace& oracle);

/// Max over the stored times of the pseudo-unitarity residual of gamma(t) diag(u(t), I_m).
/// Needs a trace built with keep_trajectory.
double lifted_frame_drift(const SurfaceSpec& s, const ClosedCurve& c, const TransportTrace& trace);

/// Self-consistency residuals |u_N(1) - u_{2N}(1)| and |u_{2N}(1) - u_{4N}(1)|; their ratio is
/// close to 16 for a fourth-order stepper.
struct ConvergenceStudy {
  int base_steps = 0;
  double coarse_residual = 0.0;
  double fine_residual = 0.0;
  double ratio = 0.0;
};

ConvergenceStudy step_halving_study(const SurfaceSpec& s, const ClosedCurve& c, int base_steps);

nlohmann::json transport_summary(const TransportTrace& t);

}  // namespace holonomy
