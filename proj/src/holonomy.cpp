#include "holonomy/holonomy.hpp"

#include <cmath>
#include <string>

#include "holonomy/matrix_json.hpp"
#include "holonomy/quadrature.hpp"

namespace holonomy {

namespace {

const Complex kI(0.0, 1.0);

double sinh_squared(double x) {
  const double s = std::sinh(x);
  return s * s;
}

// b_l(t) = theta'(t) sinh^2(sigma_{j_l} r(t)).
Eigen::VectorXd forcing(const Eigen::VectorXd& values, const CurvePoint& p) {
  Eigen::VectorXd b(values.size());
  for (Index l = 0; l < values.size(); ++l) b(l) = p.dtheta * sinh_squared(values(l) * p.r);
  return b;
}

Eigen::VectorXd to_double(const ExtVector& v) { return v.cast<double>(); }

}  // namespace

ExtVector VandermondeSystem::apply(const ExtVector& psi) const { return c_ext * psi; }

ExtVector VandermondeSystem::solve(const ExtVector& rhs) const {
  const Eigen::PartialPivLU<ExtMatrix> lu(c_ext);
  ExtVector x = lu.solve(rhs);
  for (int pass = 0; pass < 2; ++pass) x += lu.solve(rhs - c_ext * x);
  return x;
}

VandermondeSystem vandermonde_system(const SurfaceSpec& s, double max_condition) {
  const Index p = s.distinct();
  if (p < 1) throw Error(ErrorCode::trivial_x, "no positive singular values");
  VandermondeSystem sys;
  sys.c_ext.resize(p, p);
  for (Index l = 0; l < p; ++l) {
    const long double node = static_cast<long double>(s.groups[static_cast<std::size_t>(l)].value) *
                             static_cast<long double>(s.groups[static_cast<std::size_t>(l)].value);
    long double power = node;
    for (Index k = 0; k < p; ++k) {
      sys.c_ext(l, k) = power;
      power *= node;
    }
  }
  sys.c = sys.c_ext.cast<double>();
  sys.c_inverse = Eigen::PartialPivLU<ExtMatrix>(sys.c_ext).inverse().cast<double>();
  const auto one_norm = [](const Eigen::MatrixXd& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); };
  sys.condition = one_norm(sys.c) * one_norm(sys.c_inverse);
  sys.inverse_residual = (sys.c * sys.c_inverse - Eigen::MatrixXd::Identity(p, p)).norm();
  if (!std::isfinite(sys.condition) || sys.condition > max_condition) {
    throw Error(ErrorCode::ill_conditioned,
                "Vandermonde condition number " + std::to_string(sys.condition) + " exceeds " +
                    std::to_string(max_condition) + "; raise --group-tol to merge nearby singular values");
  }
  return sys;
}

PsiTrajectory solve_psi_trajectory(const SurfaceSpec& s, const ClosedCurve& c, const VandermondeSystem& sys,
                                   const Tolerances& tol) {
  const Eigen::VectorXd values = s.group_values();
  const int panels = c.samples();

  PsiTrajectory out;
  // psi' = C^{-1} b pointwise; check the defining equations at every node.
  for (int i = 0; i <= panels; ++i) {
    const Eigen::VectorXd b = forcing(values, c(static_cast<double>(i) / panels));
    const ExtVector b_ext = b.cast<long double>();
    const ExtVector dpsi = sys.solve(b_ext);
    const double res = static_cast<double>((sys.apply(dpsi) - b_ext).cwiseAbs().maxCoeff());
    out.defining_residual = std::max(out.defining_residual, res / std::max(1.0, b.lpNorm<Eigen::Infinity>()));
  }

  // C is constant, so psi(t) = C^{-1} int_0^t b.
  const SimpsonResult integral =
      composite_simpson([&](double t) { return forcing(values, c(t)); }, panels, /*keep_running=*/true);
  require_converged(integral, tol.quad_tol, "solve_psi_trajectory");
  out.quadrature_error = integral.error_estimate;
  out.group_integrals = integral.value;
  out.final_coeffs = sys.solve(integral.value.cast<long double>());
  for (std::size_t i = 0; i < integral.running.size(); ++i) {
    out.times.push_back(static_cast<double>(2 * i) / panels);
    out.values.push_back(to_double(sys.solve(integral.running[i].cast<long double>())));
  }
  return out;
}

PsiTrajectory solve_psi_trajectory(const SurfaceSpec& s, const ClosedCurve& c, const Tolerances& tol) {
  return solve_psi_trajectory(s, c, vandermonde_system(s, tol.max_condition), tol);
}

ComplexMatrix assemble_psi(const SurfaceSpec& s, const Eigen::VectorXd& psi) {
  const Index n = s.sig.n;
  const ComplexMatrix gram = s.w.adjoint() * s.w;
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index k = 0; k < psi.size(); ++k) {
    power = power * gram;
    out += (kI * psi(k)) * power;
  }
  return out;
}

ComplexMatrix assemble_psi_spectral(const SurfaceSpec& s, const VandermondeSystem& sys, const ExtVector& psi) {
  if (psi.size() != s.distinct()) {
    throw Error(ErrorCode::dimension, "assemble_psi_spectral: expected " + std::to_string(s.distinct()) +
                                          " coefficients, got " + std::to_string(psi.size()));
  }
  const ExtVector per_group = sys.apply(psi);
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(s.sig.n);
  for (std::size_t l = 0; l < s.groups.size(); ++l) {
    for (Index j : s.groups[l].indices) d(j) = kI * static_cast<double>(per_group(static_cast<Index>(l)));
  }
  return s.a() * d.asDiagonal() * s.a().adjoint();
}

double enclosed_area(const SurfaceSpec& s, const ClosedCurve& c, AreaForm form, const Tolerances& tol) {
  const auto integrand = [&](double t) {
    const CurvePoint p = c(t);
    Eigen::VectorXd v(1);
    if (p.dtheta == 0.0) {
      v(0) = 0.0;
    } else {
      const double potential =
          form == AreaForm::omega0 ? omega0_potential(s, p.r) : omega1_potential(s, p.r, tol.potential_tol);
      v(0) = potential * p.dtheta;
    }
    return v;
  };
  const SimpsonResult area = composite_simpson(integrand, c.samples());
  require_converged(area, tol.quad_tol, "enclosed_area");
  return area.value(0);
}

double span_membership_residual(const SurfaceSpec& s, const ComplexMatrix& psi) {
  const Index n = s.sig.n;
  const ComplexMatrix gram = s.w.adjoint() * s.w;
  // Real inner product on complex matrices: Re Tr(a^* b).
  const auto dot = [](const ComplexMatrix& a, const ComplexMatrix& b) { return a.conjugate().cwiseProduct(b).sum().real(); };

  std::vector<ComplexMatrix> basis;
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  for (Index k = 1; k <= s.rank; ++k) {
    power = power * gram;
    ComplexMatrix v = kI * power;
    const double original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : basis) v -= dot(e, v) * e;
    }
    if (v.norm() > 1e-12 * original) basis.push_back(v / v.norm());
  }
  ComplexMatrix rest = psi;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& e : basis) rest -= dot(e, rest) * e;
  }
  return rest.norm() / std::max(1.0, psi.norm());
}

HolonomyResult holonomy(const SurfaceSpec& s, const ClosedCurve& c, const Tolerances& tol) {
  const VandermondeSystem sys = vandermonde_system(s, tol.max_condition);
  const PsiTrajectory traj = solve_psi_trajectory(s, c, sys, tol);

  HolonomyResult out;
  out.condition = sys.condition;
  out.defining_residual = traj.defining_residual;
  out.quadrature_error = traj.quadrature_error;
  out.psi_coeffs = to_double(traj.final_coeffs);
  out.psi = assemble_psi_spectral(s, sys, traj.final_coeffs);
  out.assembly_residual = (out.psi - assemble_psi(s, out.psi_coeffs)).norm() / std::max(1.0, out.psi.norm());
  out.holonomy = expm_generic(out.psi);

  const Index n = s.sig.n;
  out.anti_hermitian_residual = (out.psi + out.psi.adjoint()).norm();
  out.unitarity_residual = (out.holonomy.adjoint() * out.holonomy - ComplexMatrix::Identity(n, n)).norm();
  out.span_residual = span_membership_residual(s, out.psi);

  out.area0 = enclosed_area(s, c, AreaForm::omega0, tol);
  out.area1 = enclosed_area(s, c, AreaForm::omega1, tol);
  out.trace_residual = std::abs(out.psi.trace() - 2.0 * kI * out.area0);
  out.negative_orientation = out.area0 < 0.0;
  return out;
}

nlohmann::json holonomy_to_json(const HolonomyResult& h) {
  const Complex tr = h.psi.trace();
  return {{"psi", matrix_to_json(h.psi)},
          {"holonomy", matrix_to_json(h.holonomy)},
          {"trace_psi", {{"re", tr.real()}, {"im", tr.imag()}}},
          {"area0", h.area0},
          {"area1", h.area1},
          {"psi_coeffs", vector_to_json(h.psi_coeffs)},
          {"vandermonde_condition", h.condition},
          {"negative_orientation", h.negative_orientation},
          {"residuals",
           {{"trace", h.trace_residual},
            {"assembly", h.assembly_residual},
            {"span", h.span_residual},
            {"anti_hermitian", h.anti_hermitian_residual},
            {"unitarity", h.unitarity_residual},
            {"defining_equations", h.defining_residual},
            {"quadrature", h.quadrature_error}}}};
}

DiagonalFormCheck corollary_diagonal_form(const SurfaceSpec& s, const HolonomyResult& result, double tol) {
  if (s.distinct() != 1) {
    throw Error(ErrorCode::not_applicable, "the diagonal form needs a single distinct singular value, found " +
                                               std::to_string(s.distinct()));
  }
  const Index n = s.sig.n;
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
  const Complex value = 2.0 * kI * result.area0 / static_cast<double>(s.rank);
  for (Index j = 0; j < s.rank; ++j) d(j) = value;
  const ComplexMatrix expected = s.a() * d.asDiagonal() * s.a().adjoint();

  DiagonalFormCheck out;
  out.psi_residual = (result.psi - expected).norm();
  out.area_gap = std::abs(result.area0 - result.area1);
  out.ok = out.psi_residual <= tol && out.area_gap <= tol;
  return out;
}

}  // namespace holonomy
