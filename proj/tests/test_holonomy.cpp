#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "holonomy/holonomy.hpp"
#include "holonomy/quadrature.hpp"

using namespace holonomy;
using holonomy::testing::random_matrix;
using holonomy::testing::random_signature;
using holonomy::testing::with_singular_values;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

template <typename F>
void require_error(F&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == code);
    return;
  }
  FAIL("expected an Error");
}

double sinh2(double x) { return std::sinh(x) * std::sinh(x); }

ComplexMatrix scalar(Complex v) {
  ComplexMatrix x(1, 1);
  x(0, 0) = v;
  return x;
}

ComplexMatrix diag12() {
  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 2.0;
  return x;
}

// Periodic trapezoid rule: spectrally accurate for smooth closed curves, and a different rule
// from the composite Simpson used by the engine.
double trapezoid(const std::function<double(double)>& f, int n) {
  long double sum = 0.0L;
  for (int i = 0; i < n; ++i) sum += f(static_cast<double>(i) / n);
  return static_cast<double>(sum / n);
}

}  // namespace

TEST_CASE("composite Simpson") {
  const auto cubic = [](double t) {
    Eigen::VectorXd v(2);
    v << t * t * t, 1.0;
    return v;
  };
  const SimpsonResult r = composite_simpson(cubic, 8, true);
  CHECK(r.value(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(r.value(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.error_estimate < 1e-15);
  REQUIRE(r.running.size() == 5);
  CHECK(r.running[2](0) == doctest::Approx(std::pow(0.5, 4) / 4).epsilon(1e-15));
  require_error([&] { composite_simpson(cubic, 6); }, ErrorCode::invalid_input);
  require_error([&] { composite_simpson(cubic, 0); }, ErrorCode::invalid_input);
  const auto bad = [](double t) {
    Eigen::VectorXd v(1);
    v << (t > 0.5 ? std::numeric_limits<double>::infinity() : 0.0);
    return v;
  };
  require_error([&] { composite_simpson(bad, 8); }, ErrorCode::numerical);
}

TEST_CASE("Vandermonde system examples") {
  const VandermondeSystem one = vandermonde_system(build_surface(Signature(1, 1), scalar(1.0)));
  CHECK(one.c.rows() == 1);
  CHECK(one.c(0, 0) == doctest::Approx(1.0));
  CHECK(one.c_inverse(0, 0) == doctest::Approx(1.0));

  for (Index q : {2, 3, 4}) {
    const VandermondeSystem eq =
        vandermonde_system(build_surface(Signature(q, q), ComplexMatrix::Identity(q, q)));
    CHECK(eq.c.rows() == 1);
    CHECK(eq.c(0, 0) == doctest::Approx(1.0 / static_cast<double>(q)).epsilon(1e-15));
  }

  const VandermondeSystem two = vandermonde_system(build_surface(Signature(2, 2), diag12()));
  Eigen::Matrix2d c, inv;
  c << 4.0 / 5, 16.0 / 25, 1.0 / 5, 1.0 / 25;
  // Hand inverse: det = -12/125.
  inv << -5.0 / 12, 20.0 / 3, 25.0 / 12, -25.0 / 3;
  CHECK((two.c - c).norm() < 1e-15);
  CHECK((two.c_inverse - inv).norm() < 1e-13);
  CHECK((two.c * two.c_inverse - Eigen::Matrix2d::Identity()).norm() < 1e-14);
  CHECK(two.inverse_residual < 1e-14);
  CHECK(two.condition > 1.0);
}

TEST_CASE("Vandermonde conditioning is enforced") {
  const SurfaceSpec s = build_surface(Signature(2, 2), diag12());
  require_error([&] { vandermonde_system(s, 10.0); }, ErrorCode::ill_conditioned);

  std::mt19937_64 rng(31);
  Eigen::VectorXd sv(4);
  sv << 1.0, 1.0 - 1e-4, 1.0 - 2e-4, 1.0 - 3e-4;
  const SurfaceSpec close = build_surface(Signature(4, 4), with_singular_values(rng, 4, 4, sv));
  CHECK(close.distinct() == 4);
  require_error([&] { vandermonde_system(close); }, ErrorCode::ill_conditioned);
  require_error([&] { holonomy::holonomy(close, circle(1.0)); }, ErrorCode::ill_conditioned);
  // A coarser grouping merges them and the system becomes trivially conditioned.
  CHECK(vandermonde_system(build_surface(close.sig, close.x, 1e-3)).c.rows() == 1);
}

TEST_CASE("psi trajectory examples") {
  const SurfaceSpec one = build_surface(Signature(1, 1), scalar(1.0));
  const PsiTrajectory flat = solve_psi_trajectory(one, constant_curve(0.8, 0.3));
  for (const auto& v : flat.values) CHECK(v.isZero(0.0));

  for (double radius : {0.5, 1.0, 2.0}) {
    const PsiTrajectory t = solve_psi_trajectory(one, circle(radius));
    CHECK(t.values.front().isZero(0.0));
    CHECK(t.times.back() == 1.0);
    CHECK(std::abs(static_cast<double>(t.final_coeffs(0)) - 2 * kPi * sinh2(radius)) < 1e-12 * sinh2(radius));
    CHECK(t.defining_residual < 1e-15);
  }

  const SurfaceSpec two = build_surface(Signature(2, 2), diag12());
  const PsiTrajectory t = solve_psi_trajectory(two, circle(1.0));
  Eigen::Vector2d b(2 * kPi * sinh2(2 / std::sqrt(5.0)), 2 * kPi * sinh2(1 / std::sqrt(5.0)));
  Eigen::Matrix2d inv;
  inv << -5.0 / 12, 20.0 / 3, 25.0 / 12, -25.0 / 3;
  const Eigen::Vector2d expected = inv * b;
  CHECK((t.final_coeffs.cast<double>() - expected).norm() < 1e-12 * expected.norm());
  CHECK((t.values.back() - expected).norm() < 1e-12 * expected.norm());
}

TEST_CASE("scalar engine reproduces phi' = theta' sinh^2(r)") {
  std::mt19937_64 rng(32);
  for (Index m : {1, 2, 4}) {
    ComplexMatrix x = random_matrix(rng, m, 1);
    const SurfaceSpec s = build_surface(Signature(1, m), x);
    for (const ClosedCurve& c : {ellipse(1.3, 0.4), star(0.8, 0.45, 3), shifted_circle(0.4, 0.2, 1.1)}) {
      const double reference = trapezoid(
          [&](double t) {
            const CurvePoint p = c(t);
            return p.dtheta * sinh2(p.r);
          },
          4000);
      const HolonomyResult h = holonomy::holonomy(s, c);
      CHECK(std::abs(h.psi(0, 0) - kI * reference) < 1e-10 * std::max(1.0, reference));
    }
  }
}

TEST_CASE("assemble_psi examples") {
  const SurfaceSpec one = build_surface(Signature(1, 1), scalar(1.0));
  CHECK(assemble_psi(one, Eigen::VectorXd::Zero(1)).isZero(0.0));
  const double value = 2 * kPi * sinh2(1.0);
  const ComplexMatrix psi = assemble_psi(one, Eigen::VectorXd::Constant(1, value));
  CHECK(std::abs(psi(0, 0) - kI * value) < 1e-13);

  const SurfaceSpec id = build_surface(Signature(3, 3), ComplexMatrix::Identity(3, 3));
  const ComplexMatrix p3 = assemble_psi(id, Eigen::VectorXd::Constant(1, 6.0));
  CHECK((p3 - kI * 2.0 * ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
  require_error(
      [&] { assemble_psi_spectral(id, vandermonde_system(id), ExtVector::Zero(2)); }, ErrorCode::dimension);
}

TEST_CASE("enclosed area examples") {
  const SurfaceSpec one = build_surface(Signature(1, 1), scalar(1.0));
  CHECK(enclosed_area(one, constant_curve(1.0, 0.0), AreaForm::omega0) == 0.0);
  CHECK(enclosed_area(one, constant_curve(1.0, 0.0), AreaForm::omega1) == 0.0);
  for (double radius : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(enclosed_area(one, circle(radius), AreaForm::omega0) - kPi * sinh2(radius)) <
          1e-12 * sinh2(radius));
  }
  const SurfaceSpec two = build_surface(Signature(2, 2), diag12());
  const double expected = kPi * (sinh2(2 / std::sqrt(5.0)) + sinh2(1 / std::sqrt(5.0)));
  CHECK(std::abs(enclosed_area(two, circle(1.0), AreaForm::omega0) - expected) < 1e-13);

  // An off-origin circle: both area forms agree with a trapezoid line integral.
  const ClosedCurve c = shifted_circle(1.0, 0.5, 0.6);
  const double ref0 = trapezoid([&](double t) { return omega0_potential(two, c(t).r) * c(t).dtheta; }, 4000);
  CHECK(std::abs(enclosed_area(two, c, AreaForm::omega0) - ref0) < 1e-11);
  CHECK(enclosed_area(two, c, AreaForm::omega0) > 0.0);
  const double ref1 = trapezoid([&](double t) { return omega1_potential(two, c(t).r) * c(t).dtheta; }, 4000);
  CHECK(std::abs(enclosed_area(two, c, AreaForm::omega1) - ref1) < 1e-11);
}

TEST_CASE("holonomy of a constant curve is trivial") {
  std::mt19937_64 rng(33);
  const Signature sig(3, 2);
  const SurfaceSpec s = build_surface(sig, random_matrix(rng, 2, 3));
  const HolonomyResult h = holonomy::holonomy(s, constant_curve(1.4, 0.2));
  CHECK(h.psi.isZero(0.0));
  CHECK(h.holonomy.isIdentity(1e-15));
  CHECK(h.area0 == 0.0);
  CHECK(h.area1 == 0.0);
  CHECK(h.trace_residual == 0.0);
}

TEST_CASE("scalar closed form") {
  const SurfaceSpec one = build_surface(Signature(1, 1), scalar(Complex(0.6, -0.8)));
  for (double radius : {0.5, 1.0, 2.0}) {
    const HolonomyResult h = holonomy::holonomy(one, circle(radius));
    const double target = 2 * kPi * sinh2(radius);
    CHECK(std::abs(h.psi(0, 0) - kI * target) <= 1e-10);
    CHECK(std::abs(h.area0 - kPi * sinh2(radius)) <= 1e-10);
    CHECK(std::abs(h.holonomy(0, 0) - std::exp(kI * target)) < 1e-10);
    CHECK(std::abs(h.psi.trace() - 2.0 * kI * kPi * sinh2(radius)) < 1e-10);
  }
}

TEST_CASE("equal singular values give a scalar holonomy") {
  std::mt19937_64 rng(34);
  for (Index n : {2, 3}) {
    // Scaled isometry in random frames.
    const ComplexMatrix x = 1.7 * testing::random_unitary(rng, n);
    const SurfaceSpec s = build_surface(Signature(n, n), x);
    for (const ClosedCurve& c : {circle(1.2), ellipse(0.9, 0.3), star(1.0, 0.4, 3)}) {
      const HolonomyResult h = holonomy::holonomy(s, c);
      const double theta = 2.0 / static_cast<double>(n) * h.area0;
      const ComplexMatrix expected = std::exp(kI * theta) * ComplexMatrix::Identity(n, n);
      CHECK((h.holonomy - expected).norm() <= 1e-8);
      CHECK(std::abs(h.area0 - h.area1) <= 1e-8);
      const DiagonalFormCheck d = corollary_diagonal_form(s, h);
      CHECK(d.ok);
    }
  }
}

TEST_CASE("diagonal form eigenvalues") {
  const SurfaceSpec id = build_surface(Signature(2, 2), ComplexMatrix::Identity(2, 2));
  const HolonomyResult h = holonomy::holonomy(id, circle(1.0));
  const Eigen::VectorXcd ev = h.psi.eigenvalues();
  for (Index j = 0; j < 2; ++j) CHECK(std::abs(ev(j) - kI * h.area0) < 1e-10);

  std::mt19937_64 rng(35);
  const ComplexMatrix r1 = random_matrix(rng, 2, 1) * random_matrix(rng, 2, 1).adjoint();
  const SurfaceSpec s1 = build_surface(Signature(2, 2), r1);
  const HolonomyResult h1 = holonomy::holonomy(s1, ellipse(1.0, 0.2));
  Eigen::VectorXd imag = h1.psi.eigenvalues().imag();
  std::sort(imag.data(), imag.data() + imag.size());
  CHECK(std::abs(imag(0)) < 1e-10);
  CHECK(std::abs(imag(1) - 2.0 * h1.area0) < 1e-10);
  CHECK(corollary_diagonal_form(s1, h1).ok);

  const SurfaceSpec d = build_surface(Signature(2, 2), diag12());
  const HolonomyResult hd = holonomy::holonomy(d, circle(1.0));
  require_error([&] { corollary_diagonal_form(d, hd); }, ErrorCode::not_applicable);
}

TEST_CASE("structural invariants of the holonomy") {
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> radius(0.2, 2.0), eps(0.0, 0.5);
  for (int trial = 0; trial < 30; ++trial) {
    const Signature sig = random_signature(rng);
    const SurfaceSpec s = build_surface(sig, random_matrix(rng, sig.m, sig.n, 1.5));
    const ClosedCurve c = trial % 3 == 0 ? circle(radius(rng))
                          : trial % 3 == 1 ? ellipse(radius(rng), eps(rng))
                                           : star(radius(rng), eps(rng), 3);
    const HolonomyResult h = holonomy::holonomy(s, c);
    CHECK(h.trace_residual <= 1e-8);
    CHECK(h.anti_hermitian_residual <= 1e-12);
    CHECK(h.unitarity_residual <= 1e-10);
    CHECK(h.span_residual <= 1e-10);
    CHECK(h.defining_residual <= 1e-12);
    CHECK(h.assembly_residual <= 1e-8);
    CHECK_FALSE(h.negative_orientation);
    CHECK(h.psi_coeffs.size() == s.distinct());

    // Psi(t) at different times commute.
    const PsiTrajectory traj = solve_psi_trajectory(s, c);
    const ComplexMatrix a = assemble_psi(s, traj.values[traj.values.size() / 3]);
    const ComplexMatrix b = assemble_psi(s, traj.values[2 * traj.values.size() / 3]);
    CHECK(commutator(a, b).norm() <= 1e-12 * std::max(1.0, a.norm() * b.norm()));
  }
}

TEST_CASE("reparametrization and orientation reversal") {
  std::mt19937_64 rng(37);
  const auto tau = [](double t) { return t + 0.12 * std::sin(2 * kPi * t) / (2 * kPi); };
  const auto dtau = [](double t) { return 1.0 + 0.12 * std::cos(2 * kPi * t); };
  for (int trial = 0; trial < 10; ++trial) {
    const Signature sig = random_signature(rng);
    const SurfaceSpec s = build_surface(sig, random_matrix(rng, sig.m, sig.n));
    const ClosedCurve c = ellipse(1.1, 0.35);
    const HolonomyResult h = holonomy::holonomy(s, c);
    const HolonomyResult hr = holonomy::holonomy(s, reparametrized(c, tau, dtau));
    const HolonomyResult hv = holonomy::holonomy(s, reversed(c));
    CHECK((h.psi - hr.psi).norm() <= 1e-9);
    CHECK((h.psi + hv.psi).norm() <= 1e-9);
    CHECK((h.holonomy * hv.holonomy - ComplexMatrix::Identity(sig.n, sig.n)).norm() <= 1e-9);
    CHECK(hv.negative_orientation);
    CHECK(hv.area0 < 0.0);
  }
}

TEST_CASE("span residual detects matrices outside the span") {
  const SurfaceSpec d = build_surface(Signature(2, 2), diag12());
  ComplexMatrix off = ComplexMatrix::Zero(2, 2);
  off(0, 1) = kI;
  off(1, 0) = kI;
  CHECK(span_membership_residual(d, off) > 0.5);
  CHECK(span_membership_residual(d, kI * (d.w.adjoint() * d.w)) < 1e-14);
}

TEST_CASE("holonomy errors") {
  const SurfaceSpec one = build_surface(Signature(1, 1), scalar(1.0));
  require_error([&] { holonomy::holonomy(one, circle(800.0)); }, ErrorCode::numerical);
  require_error([&] { holonomy::holonomy(one, star(2.0, 0.9, 24, 64)); }, ErrorCode::numerical);
}

TEST_CASE("holonomy JSON carries every residual") {
  const SurfaceSpec one = build_surface(Signature(1, 1), scalar(1.0));
  const nlohmann::json j = holonomy_to_json(holonomy::holonomy(one, circle(1.0)));
  for (const char* key : {"trace", "assembly", "span", "anti_hermitian", "unitarity", "defining_equations",
                          "quadrature"}) {
    CHECK(j["residuals"].contains(key));
  }
  CHECK(j["trace_psi"]["im"].get<double>() == doctest::Approx(2 * kPi * sinh2(1.0)));
}
