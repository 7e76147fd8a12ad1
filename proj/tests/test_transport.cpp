#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "holonomy/transport.hpp"

using namespace holonomy;
using holonomy::testing::random_matrix;
using holonomy::testing::random_signature;

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

SurfaceSpec scalar_surface() {
  ComplexMatrix x(1, 1);
  x(0, 0) = 1.0;
  return build_surface(Signature(1, 1), x);
}

// A closed curve that only moves radially.
ClosedCurve radial_curve() {
  return ClosedCurve(
      [](double t) {
        return CurvePoint{1.0 + 0.5 * std::sin(2 * kPi * t), 0.4, kPi * std::cos(2 * kPi * t), 0.0};
      },
      256, "radial");
}

}  // namespace

TEST_CASE("base velocity block examples") {
  const SurfaceSpec one = scalar_surface();
  CHECK(base_velocity_block(one, constant_curve(1.0, 0.5), 0.3).isZero(0.0));
  CHECK(base_velocity_block(one, radial_curve(), 0.3).isZero(0.0));

  for (double radius : {0.5, 1.0, 2.0}) {
    const ComplexMatrix m = base_velocity_block(one, circle(radius), 0.37);
    CHECK(std::abs(m(0, 0).real()) == 0.0);
    CHECK(m(0, 0).imag() == doctest::Approx(-2 * kPi * sinh2(radius)).epsilon(1e-14));
  }

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const Signature sig = random_signature(rng);
    const SurfaceSpec s = build_surface(sig, random_matrix(rng, sig.m, sig.n));
    const ComplexMatrix m = base_velocity_block(s, star(1.4, 0.4, 3), 0.01 * trial);
    CHECK((m + m.adjoint()).norm() <= 1e-10 * std::max(1.0, m.norm()));
  }
}

TEST_CASE("integrate_lift on trivial and scalar curves") {
  const SurfaceSpec one = scalar_surface();
  const TransportTrace flat = integrate_lift(one, constant_curve(0.9, 0.1), 64, true);
  CHECK(flat.holonomy_oracle.isIdentity(0.0));
  CHECK(flat.u.front().isIdentity(0.0));

  for (double radius : {0.5, 1.0, 2.0}) {
    const TransportTrace t = integrate_lift(one, circle(radius), 16384, true);
    CHECK(t.u.front().isIdentity(0.0));
    CHECK(t.times.size() == 16385);
    CHECK(t.unitarity_drift <= 1e-8);
    CHECK(std::abs(t.holonomy_oracle(0, 0) - std::exp(kI * 2.0 * kPi * sinh2(radius))) <= 1e-7);
  }
}

TEST_CASE("integrate_lift on equal singular values") {
  std::mt19937_64 rng(42);
  for (Index n : {2, 3}) {
    const SurfaceSpec s = build_surface(Signature(n, n), testing::random_unitary(rng, n));
    const ClosedCurve c = ellipse(1.0, 0.3);
    const HolonomyResult h = holonomy::holonomy(s, c);
    const TransportTrace t = integrate_lift(s, c);
    const ComplexMatrix expected =
        std::exp(kI * 2.0 / static_cast<double>(n) * h.area0) * ComplexMatrix::Identity(n, n);
    CHECK((t.holonomy_oracle - expected).norm() <= 1e-6);
  }
}

TEST_CASE("integrate_lift errors") {
  const SurfaceSpec one = scalar_surface();
  require_error([&] { integrate_lift(one, circle(1.0), 32); }, ErrorCode::invalid_input);
  // Far too few steps for a fast-turning fiber: the raw step leaves U(1).
  require_error([&] { integrate_lift(one, circle(3.0), 64); }, ErrorCode::numerical);
}

TEST_CASE("compare_holonomies") {
  const SurfaceSpec one = scalar_surface();
  const ClosedCurve flat = constant_curve(0.5, 0.0);
  CHECK(compare_holonomies(holonomy::holonomy(one, flat), integrate_lift(one, flat, 64)) == 0.0);

  const ClosedCurve c = circle(1.0);
  CHECK(compare_holonomies(holonomy::holonomy(one, c), integrate_lift(one, c)) <= 1e-7);

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 4; ++trial) {
    const SurfaceSpec s = build_surface(Signature(2, 3), random_matrix(rng, 3, 2));
    const ClosedCurve e = ellipse(1.2, 0.4);
    CHECK(compare_holonomies(holonomy::holonomy(s, e), integrate_lift(s, e)) <= 1e-6);
  }
}

TEST_CASE("lifted frames stay pseudo-unitary") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 4; ++trial) {
    const Signature sig = random_signature(rng, 3);
    const SurfaceSpec s = build_surface(sig, random_matrix(rng, sig.m, sig.n));
    const ClosedCurve c = star(1.3, 0.35, 3);
    const TransportTrace t = integrate_lift(s, c, 4096, true);
    CHECK(lifted_frame_drift(s, c, t) <= 1e-8);
  }
}

TEST_CASE("step halving shows fourth-order convergence") {
  std::mt19937_64 rng(45);
  const SurfaceSpec s = build_surface(Signature(3, 2), random_matrix(rng, 2, 3));
  const ConvergenceStudy study = step_halving_study(s, star(1.5, 0.4, 3), 512);
  CHECK(study.coarse_residual > study.fine_residual);
  CHECK(study.ratio >= 12.0);
  CHECK(study.ratio <= 20.0);
}

TEST_CASE("transport summary") {
  const nlohmann::json j = transport_summary(integrate_lift(scalar_surface(), circle(0.5), 128));
  CHECK(j["steps"] == 128);
  CHECK(j.contains("unitarity_drift"));
  CHECK(j.contains("max_step_defect"));
}
