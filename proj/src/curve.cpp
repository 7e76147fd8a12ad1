#include "holonomy/curve.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "holonomy/error.hpp"

namespace holonomy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_input(bool ok, const std::string& why) {
  if (!ok) throw Error(ErrorCode::invalid_input, "curve: " + why);
}

void require_samples(int samples) {
  require_input(samples >= 64 && samples % 4 == 0, "samples must be a multiple of 4 and >= 64");
}

// Real trigonometric interpolant of equispaced periodic data f_i = f(i / N).
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const std::vector<double>& f) : n_(static_cast<int>(f.size())) {
    const int half = (n_ - 1) / 2;
    a_.assign(static_cast<std::size_t>(half + 1), 0.0);
    b_.assign(static_cast<std::size_t>(half + 1), 0.0);
    for (int i = 0; i < n_; ++i) a_[0] += f[static_cast<std::size_t>(i)] / n_;
    for (int h = 1; h <= half; ++h) {
      for (int i = 0; i < n_; ++i) {
        const double phase = kTwoPi * h * i / n_;
        a_[static_cast<std::size_t>(h)] += 2.0 * f[static_cast<std::size_t>(i)] * std::cos(phase) / n_;
        b_[static_cast<std::size_t>(h)] += 2.0 * f[static_cast<std::size_t>(i)] * std::sin(phase) / n_;
      }
    }
    if (n_ % 2 == 0) {
      for (int i = 0; i < n_; ++i) nyquist_ += (i % 2 == 0 ? 1.0 : -1.0) * f[static_cast<std::size_t>(i)] / n_;
    }
  }

  std::pair<double, double> value_and_derivative(double t) const {
    double v = a_[0];
    double d = 0.0;
    for (std::size_t h = 1; h < a_.size(); ++h) {
      const double w = kTwoPi * static_cast<double>(h);
      const double c = std::cos(w * t);
      const double s = std::sin(w * t);
      v += a_[h] * c + b_[h] * s;
      d += w * (b_[h] * c - a_[h] * s);
    }
    if (n_ % 2 == 0) {
      const double w = std::numbers::pi * n_;
      v += nyquist_ * std::cos(w * t);
      d -= nyquist_ * w * std::sin(w * t);
    }
    return {v, d};
  }

 private:
  int n_;
  std::vector<double> a_;
  std::vector<double> b_;
  double nyquist_ = 0.0;
};

double number(const nlohmann::json& doc, const char* key) {
  require_input(doc.contains(key) && doc[key].is_number(), std::string("field '") + key + "' must be a number");
  const double v = doc[key].get<double>();
  require_input(std::isfinite(v), std::string("field '") + key + "' must be finite");
  return v;
}

std::vector<double> number_list(const nlohmann::json& doc, const char* key) {
  require_input(doc.contains(key) && doc[key].is_array(), std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : doc[key]) {
    require_input(v.is_number() && std::isfinite(v.get<double>()),
                  std::string("field '") + key + "' must hold finite numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ClosedCurve::ClosedCurve(Evaluator eval, int samples, std::string description, nlohmann::json source)
    : eval_(std::move(eval)), samples_(samples), description_(std::move(description)), source_(std::move(source)) {
  require_samples(samples_);
  const CurvePoint start = eval_(0.0);
  const CurvePoint end = eval_(1.0);
  require_input(start.r >= 0.0 && end.r >= 0.0, "r must be nonnegative");
  require_input(std::abs(end.r - start.r) <= 1e-10, "r(1) must equal r(0)");
  const double turns = (end.theta - start.theta) / kTwoPi;
  require_input(std::abs(turns - std::round(turns)) * kTwoPi <= 1e-10,
                "theta(1) - theta(0) must be a multiple of 2 pi");
  winding_ = static_cast<int>(std::lround(turns));
}

ClosedCurve ClosedCurve::with_samples(int samples) const {
  return ClosedCurve(eval_, samples, description_, source_);
}

ClosedCurve circle(double radius, int samples) {
  require_input(radius >= 0.0, "circle radius must be nonnegative");
  return ClosedCurve(
      [radius](double t) { return CurvePoint{radius, kTwoPi * t, 0.0, kTwoPi}; }, samples,
      "circle R=" + std::to_string(radius), {{"kind", "circle"}, {"R", radius}});
}

ClosedCurve ellipse(double radius, double eps, int samples) {
  require_input(radius >= 0.0 && std::abs(eps) < 1.0, "ellipse needs R >= 0 and |eps| < 1");
  return ClosedCurve(
      [radius, eps](double t) {
        const double th = kTwoPi * t;
        return CurvePoint{radius * (1.0 + eps * std::cos(th)), th, -radius * eps * std::sin(th) * kTwoPi, kTwoPi};
      },
      samples, "ellipse R=" + std::to_string(radius) + " eps=" + std::to_string(eps),
      {{"kind", "ellipse"}, {"R", radius}, {"eps", eps}});
}

ClosedCurve star(double radius, double eps, int lobes, int samples) {
  require_input(radius >= 0.0 && std::abs(eps) < 1.0 && lobes >= 1, "star needs R >= 0, |eps| < 1, lobes >= 1");
  return ClosedCurve(
      [radius, eps, lobes](double t) {
        const double th = kTwoPi * t;
        return CurvePoint{radius * (1.0 + eps * std::cos(lobes * th)), th,
                          -radius * eps * lobes * std::sin(lobes * th) * kTwoPi, kTwoPi};
      },
      samples, "star R=" + std::to_string(radius) + " eps=" + std::to_string(eps) + " lobes=" + std::to_string(lobes),
      {{"kind", "star"}, {"R", radius}, {"eps", eps}, {"lobes", lobes}});
}

ClosedCurve shifted_circle(double cx, double cy, double radius, int samples) {
  require_input(radius > 0.0, "shifted_circle radius must be positive");
  require_input(std::abs(std::hypot(cx, cy) - radius) > 1e-6, "shifted_circle must not pass through the origin");
  const double start_angle = std::atan2(cy, cx + radius);
  // Winding number about the origin, fixed by whether the origin is inside.
  const int turns = std::hypot(cx, cy) < radius ? 1 : 0;
  auto point = [cx, cy, radius](double t) {
    const double c = std::cos(kTwoPi * t);
    const double s = std::sin(kTwoPi * t);
    const double x = cx + radius * c;
    const double y = cy + radius * s;
    const double dx = -radius * kTwoPi * s;
    const double dy = radius * kTwoPi * c;
    const double r2 = x * x + y * y;
    return std::tuple{x, y, dx, dy, r2};
  };
  return ClosedCurve(
      [point, start_angle, turns](double t) {
        const auto [x, y, dx, dy, r2] = point(t);
        const double r = std::sqrt(r2);
        // Continuous branch of the angle: the principal value relative to the start, unwrapped by t.
        double theta = std::atan2(y, x);
        const double expected = start_angle + kTwoPi * turns * t;
        theta += kTwoPi * std::round((expected - theta) / kTwoPi);
        return CurvePoint{r, theta, (x * dx + y * dy) / r, (x * dy - y * dx) / r2};
      },
      samples,
      "shifted_circle c=(" + std::to_string(cx) + "," + std::to_string(cy) + ") R=" + std::to_string(radius),
      {{"kind", "shifted_circle"}, {"cx", cx}, {"cy", cy}, {"R", radius}});
}

ClosedCurve constant_curve(double r, double theta, int samples) {
  require_input(r >= 0.0, "constant curve needs r >= 0");
  return ClosedCurve([r, theta](double) { return CurvePoint{r, theta, 0.0, 0.0}; }, samples,
                     "constant r=" + std::to_string(r), {{"kind", "constant"}, {"r", r}, {"theta", theta}});
}

ClosedCurve polar_samples(const std::vector<double>& r, const std::vector<double>& theta, int samples) {
  require_input(r.size() == theta.size(), "r and theta must have equal length");
  require_input(r.size() >= 4, "need at least 4 samples");
  for (double v : r) require_input(v >= 0.0 && std::isfinite(v), "r samples must be finite and nonnegative");
  for (double v : theta) require_input(std::isfinite(v), "theta samples must be finite");

  std::vector<double> rs = r;
  std::vector<double> ths = theta;
  {
    const double turns = (ths.back() - ths.front()) / kTwoPi;
    if (std::abs(rs.back() - rs.front()) <= 1e-12 * std::max(1.0, rs.front()) &&
        std::abs(turns - std::round(turns)) <= 1e-9 && rs.size() > 4) {
      rs.pop_back();
      ths.pop_back();
    }
  }
  const std::size_t count = rs.size();
  // theta(1) is extrapolated one grid step past the last sample.
  const double theta_end = 2.0 * ths[count - 1] - ths[count - 2];
  const int turns = static_cast<int>(std::lround((theta_end - ths.front()) / kTwoPi));

  std::vector<double> periodic(count);
  for (std::size_t i = 0; i < count; ++i) {
    periodic[i] = ths[i] - kTwoPi * turns * static_cast<double>(i) / static_cast<double>(count);
  }
  const TrigInterpolant r_fit(rs);
  const TrigInterpolant theta_fit(periodic);
  nlohmann::json source = {{"kind", "polar_samples"}, {"r", r}, {"theta", theta}};
  return ClosedCurve(
      [r_fit, theta_fit, turns](double t) {
        const auto [rv, rd] = r_fit.value_and_derivative(t);
        const auto [tv, td] = theta_fit.value_and_derivative(t);
        return CurvePoint{std::max(rv, 0.0), tv + kTwoPi * turns * t, rd, td + kTwoPi * turns};
      },
      samples, "polar_samples N=" + std::to_string(count), std::move(source));
}

ClosedCurve reversed(const ClosedCurve& c) {
  nlohmann::json source = c.source().is_null() ? nlohmann::json() : nlohmann::json{{"reversed", c.source()}};
  return ClosedCurve(
      [c](double t) {
        CurvePoint p = c(1.0 - t);
        p.dr = -p.dr;
        p.dtheta = -p.dtheta;
        return p;
      },
      c.samples(), "reversed " + c.description(), std::move(source));
}

ClosedCurve reparametrized(const ClosedCurve& c, std::function<double(double)> tau,
                           std::function<double(double)> dtau) {
  return ClosedCurve(
      [c, tau = std::move(tau), dtau = std::move(dtau)](double t) {
        CurvePoint p = c(tau(t));
        const double speed = dtau(t);
        p.dr *= speed;
        p.dtheta *= speed;
        return p;
      },
      c.samples(), "reparametrized " + c.description());
}

ClosedCurve curve_from_json(const nlohmann::json& doc, int samples) {
  require_input(doc.is_object() && doc.contains("kind") && doc["kind"].is_string(),
                "expected an object with a string 'kind'");
  if (doc.contains("samples")) {
    require_input(doc["samples"].is_number_integer(), "'samples' must be an integer");
    samples = doc["samples"].get<int>();
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "circle") return circle(number(doc, "R"), samples);
  if (kind == "ellipse") return ellipse(number(doc, "R"), number(doc, "eps"), samples);
  if (kind == "star") {
    int lobes = 3;
    if (doc.contains("lobes")) {
      require_input(doc["lobes"].is_number_integer(), "'lobes' must be an integer");
      lobes = doc["lobes"].get<int>();
    }
    return star(number(doc, "R"), number(doc, "eps"), lobes, samples);
  }
  if (kind == "shifted_circle") return shifted_circle(number(doc, "cx"), number(doc, "cy"), number(doc, "R"), samples);
  if (kind == "constant") return constant_curve(number(doc, "r"), number(doc, "theta"), samples);
  if (kind == "polar_samples") return polar_samples(number_list(doc, "r"), number_list(doc, "theta"), samples);
  throw Error(ErrorCode::invalid_input, "curve: unknown kind '" + kind + "'");
}

}  // namespace holonomy
