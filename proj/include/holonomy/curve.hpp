#pragma once

// Closed curves z(t) = r(t) e^{i theta(t)}, t in [0, 1], in polar form with unwrapped theta.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace holonomy {

struct CurvePoint {
  double r = 0.0;
  double theta = 0.0;
  double dr = 0.0;      // r'(t)
  double dtheta = 0.0;  // theta'(t)
};

class ClosedCurve {
 public:
  using Evaluator = std::function<CurvePoint(double)>;

  /// Checks closedness: r(1) = r(0) and theta(1) - theta(0) in 2 pi Z, both within 1e-10.
  ClosedCurve(Evaluator eval, int samples, std::string description, nlohmann::json source = {});

  CurvePoint operator()(double t) const { return eval_(t); }
  int samples() const { return samples_; }
  const std::string& description() const { return description_; }
  /// The JSON document this curve was built from, when it came from one.
  const nlohmann::json& source() const { return source_; }
  /// (theta(1) - theta(0)) / 2 pi.
  int winding() const { return winding_; }

  ClosedCurve with_samples(int samples) const;

 private:
  Evaluator eval_;
  int samples_;
  std::string description_;
  nlohmann::json source_;
  int winding_ = 0;
};

constexpr int kDefaultCurveSamples = 4096;

ClosedCurve circle(double radius, int samples = kDefaultCurveSamples);
/// r(t) = R (1 + eps cos theta(t)), theta(t) = 2 pi t.
ClosedCurve ellipse(double radius, double eps, int samples = kDefaultCurveSamples);
/// r(t) = R (1 + eps cos(lobes theta(t))), theta(t) = 2 pi t.
ClosedCurve star(double radius, double eps, int lobes = 3, int samples = kDefaultCurveSamples);
/// z(t) = c + R e^{2 pi i t}; winds around the origin only when |c| < R.
ClosedCurve shifted_circle(double cx, double cy, double radius, int samples = kDefaultCurveSamples);
ClosedCurve constant_curve(double r, double theta, int samples = kDefaultCurveSamples);
/// Samples on the uniform grid t_i = i / N, i = 0..N-1 (a trailing copy of the first point is
/// dropped), interpolated trigonometrically. theta must be unwrapped.
ClosedCurve polar_samples(const std::vector<double>& r, const std::vector<double>& theta,
                          int samples = kDefaultCurveSamples);

/// t -> c(1 - t).
ClosedCurve reversed(const ClosedCurve& c);
/// t -> c(tau(t)) for an increasing bijection tau of [0, 1] with derivative dtau.
ClosedCurve reparametrized(const ClosedCurve& c, std::function<double(double)> tau,
                           std::function<double(double)> dtau);

/// Accepts {"kind": "circle"|"ellipse"|"star"|"shifted_circle"|"constant"|"polar_samples", ...}.
ClosedCurve curve_from_json(const nlohmann::json& doc, int samples = kDefaultCurveSamples);

}  // namespace holonomy
