#include "holonomy/transport.hpp"

#include <cmath>
#include <string>

namespace holonomy {

namespace {

// Nearest unitary matrix: U V^* from the SVD of a.
ComplexMatrix polar_unitary(const ComplexMatrix& a) {
  const Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double unitarity_defect(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

}  // namespace

ComplexMatrix base_velocity_block(const SurfaceSpec& s, const ClosedCurve& c, double t) {
  const CurvePoint p = c(t);
  const TangentPair tp = tangent_pushforwards(s, p.r, p.theta);
  const Index n = s.sig.n;
  return p.dr * tp.d_r.topLeftCorner(n, n) + p.dtheta * tp.d_theta.topLeftCorner(n, n);
}

TransportTrace integrate_lift(const SurfaceSpec& s, const ClosedCurve& c, int steps, bool keep_trajectory) {
  if (steps < 64) throw Error(ErrorCode::invalid_input, "integrate_lift: steps must be >= 64");
  const Index n = s.sig.n;
  const double h = 1.0 / steps;

  TransportTrace out;
  out.steps = steps;
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  if (keep_trajectory) {
    out.times.push_back(0.0);
    out.u.push_back(u);
  }
  // The right-hand side at t_{i+1} is reused as k1 of the next step.
  ComplexMatrix m_left = base_velocity_block(s, c, 0.0);
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const ComplexMatrix m_mid = base_velocity_block(s, c, t + 0.5 * h);
    const ComplexMatrix m_right = base_velocity_block(s, c, (i + 1 == steps) ? 1.0 : t + h);
    const ComplexMatrix k1 = -m_left * u;
    const ComplexMatrix k2 = -m_mid * (u + 0.5 * h * k1);
    const ComplexMatrix k3 = -m_mid * (u + 0.5 * h * k2);
    const ComplexMatrix k4 = -m_right * (u + h * k3);
    const ComplexMatrix raw = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!raw.allFinite()) throw Error(ErrorCode::numerical, "integrate_lift: non-finite step; raise --ode-steps");
    const double defect = unitarity_defect(raw);
    out.max_step_defect = std::max(out.max_step_defect, defect);
    if (defect > 1e-6) {
      throw Error(ErrorCode::numerical, "integrate_lift: step left U(n) by " + std::to_string(defect) +
                                            "; raise --ode-steps");
    }
    u = polar_unitary(raw);
    out.unitarity_drift = std::max(out.unitarity_drift, unitarity_defect(u));
    m_left = m_right;
    if (keep_trajectory) {
      out.times.push_back((i + 1) * h);
      out.u.push_back(u);
    }
  }
  out.holonomy_oracle = u;
  return out;
}

double compare_holonomies(const HolonomyResult& analytic, const TransportTrace& oracle) {
  return (analytic.holonomy - oracle.holonomy_oracle).norm();
}

double lifted_frame_drift(const SurfaceSpec& s, const ClosedCurve& c, const TransportTrace& trace) {
  const Index n = s.sig.n;
  const Index m = s.sig.m;
  double worst = 0.0;
  for (std::size_t i = 0; i < trace.u.size(); ++i) {
    const CurvePoint p = c(trace.times[i]);
    ComplexMatrix fiber = ComplexMatrix::Identity(n + m, n + m);
    fiber.topLeftCorner(n, n) = trace.u[i];
    const ComplexMatrix frame = exp_surface_point(s, std::polar(p.r, p.theta)) * fiber;
    worst = std::max(worst, is_pseudo_unitary(s.sig, frame, 0.0).residual);
  }
  return worst;
}

ConvergenceStudy step_halving_study(const SurfaceSpec& s, const ClosedCurve& c, int base_steps) {
  const ComplexMatrix u1 = integrate_lift(s, c, base_steps).holonomy_oracle;
  const ComplexMatrix u2 = integrate_lift(s, c, 2 * base_steps).holonomy_oracle;
  const ComplexMatrix u4 = integrate_lift(s, c, 4 * base_steps).holonomy_oracle;
  ConvergenceStudy out;
  out.base_steps = base_steps;
  out.coarse_residual = (u1 - u2).norm();
  out.fine_residual = (u2 - u4).norm();
  out.ratio = out.fine_residual > 0.0 ? out.coarse_residual / out.fine_residual : 0.0;
  return out;
}

nlohmann::json transport_summary(const TransportTrace& t) {
  return {{"steps", t.steps},
          {"unitarity_drift", t.unitarity_drift},
          {"max_step_defect", t.max_step_defect}};
}

}  // namespace holonomy
