#include "holonomy/surface.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "holonomy/matrix_json.hpp"

namespace holonomy {

namespace {

const Complex kI(0.0, 1.0);

// Omega * [[nn, nm], [mn, mm]] * Omega^*, block by block.
ComplexMatrix from_frame(const SurfaceSpec& s, const ComplexMatrix& nn, const ComplexMatrix& nm,
                         const ComplexMatrix& mn, const ComplexMatrix& mm) {
  const Index n = s.sig.n;
  const Index m = s.sig.m;
  ComplexMatrix out(n + m, n + m);
  out.topLeftCorner(n, n).noalias() = s.a() * nn * s.a().adjoint();
  out.topRightCorner(n, m).noalias() = s.a() * nm * s.b().adjoint();
  out.bottomLeftCorner(m, n).noalias() = s.b() * mn * s.a().adjoint();
  out.bottomRightCorner(m, m).noalias() = s.b() * mm * s.b().adjoint();
  return out;
}

ComplexMatrix diagonal(const Eigen::VectorXcd& d) { return d.asDiagonal(); }

// m x n matrix with d on its leading diagonal.
ComplexMatrix rectangular(Index rows, Index cols, const Eigen::VectorXcd& d) {
  ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
  for (Index j = 0; j < std::min({rows, cols, d.size()}); ++j) out(j, j) = d(j);
  return out;
}

template <typename F>
Eigen::VectorXcd per_sigma(const SurfaceSpec& s, Index count, F&& f) {
  Eigen::VectorXcd out(count);
  for (Index j = 0; j < count; ++j) out(j) = f(s.sigma_at(j));
  return out;
}

}  // namespace

Eigen::VectorXd SurfaceSpec::group_values() const {
  Eigen::VectorXd out(distinct());
  for (Index l = 0; l < distinct(); ++l) out(l) = groups[static_cast<std::size_t>(l)].value;
  return out;
}

ComplexMatrix SurfaceSpec::frame() const {
  ComplexMatrix omega = ComplexMatrix::Zero(sig.size(), sig.size());
  omega.topLeftCorner(sig.n, sig.n) = a();
  omega.bottomRightCorner(sig.m, sig.m) = b();
  return omega;
}

SurfaceSpec build_surface(const Signature& sig, const ComplexMatrix& x, double group_tol) {
  if (x.rows() != sig.m || x.cols() != sig.n) {
    throw Error(ErrorCode::dimension, "X must be " + std::to_string(sig.m) + "x" +
                                          std::to_string(sig.n) + " for signature (" +
                                          std::to_string(sig.n) + "," + std::to_string(sig.m) + ")");
  }
  if (!x.allFinite()) throw Error(ErrorCode::invalid_input, "X has non-finite entries");

  SurfaceSpec s;
  s.sig = sig;
  s.x = x;
  const ComplexMatrix x_hat = hat_embed(sig, x);
  s.x_norm = std::sqrt(killing_inner(x_hat, x_hat));
  if (!(s.x_norm > 0.0)) throw Error(ErrorCode::trivial_x, "X must be nonzero");
  s.w = x / s.x_norm;
  s.svd = complex_svd(s.w, group_tol);
  s.rank = s.svd.rank;

  s.sigma = Eigen::VectorXd::Zero(sig.n);
  const double cutoff = group_tol * s.svd.diag(0);
  for (Index j = 0; j < s.rank; ++j) {
    if (s.groups.empty() || s.svd.diag(s.groups.back().indices.front()) - s.svd.diag(j) > cutoff) {
      s.groups.push_back({});
    }
    s.groups.back().indices.push_back(j);
  }
  // A group's value is the RMS of its members, which keeps sum sigma_j^2 unchanged.
  for (auto& g : s.groups) {
    double sq = 0.0;
    for (Index j : g.indices) sq += s.svd.diag(j) * s.svd.diag(j);
    g.value = std::sqrt(sq / static_cast<double>(g.indices.size()));
    for (Index j : g.indices) s.sigma(j) = g.value;
  }
  return s;
}

nlohmann::json surface_to_json(const SurfaceSpec& s) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : s.groups) {
    nlohmann::json idx = nlohmann::json::array();
    for (Index j : g.indices) idx.push_back(j + 1);
    groups.push_back({{"value", g.value}, {"indices", idx}, {"multiplicity", g.multiplicity()}});
  }
  return {{"n", s.sig.n},
          {"m", s.sig.m},
          {"x", matrix_to_json(s.x)},
          {"x_norm", s.x_norm},
          {"sigma", vector_to_json(s.sigma)},
          {"rank", s.rank},
          {"distinct", s.distinct()},
          {"groups", groups}};
}

ComplexMatrix exp_surface_point(const SurfaceSpec& s, Complex z) {
  const double r = std::abs(z);
  const Complex phase = r > 0.0 ? z / r : Complex(1.0, 0.0);
  const Index n = s.sig.n;
  const Index m = s.sig.m;
  const auto ch = [r](double sg) { return Complex(std::cosh(sg * r), 0.0); };
  const ComplexMatrix lambda =
      rectangular(m, n, per_sigma(s, std::min(n, m), [&](double sg) { return phase * std::sinh(sg * r); }));
  return from_frame(s, diagonal(per_sigma(s, n, ch)), lambda.adjoint(), lambda,
                    diagonal(per_sigma(s, m, ch)));
}

double omega0_potential(const SurfaceSpec& s, double r) {
  double sum = 0.0;
  for (Index j = 0; j < s.sigma.size(); ++j) {
    const double sh = std::sinh(s.sigma(j) * r);
    sum += 0.5 * sh * sh;
  }
  return sum;
}

double omega0_density(const SurfaceSpec& s, double r) {
  double sum = 0.0;
  for (Index j = 0; j < s.sigma.size(); ++j) {
    sum += s.sigma(j) * std::sinh(s.sigma(j) * r) * std::cosh(s.sigma(j) * r);
  }
  return sum;
}

double omega0_density_from_definition(const SurfaceSpec& s, double r, double theta) {
  const TangentPair t = tangent_pushforwards(s, r, theta);
  const ComplexMatrix w_hat = hat_embed(s.sig, s.w);
  const ComplexMatrix iw_hat = hat_embed(s.sig, ComplexMatrix(kI * s.w));
  const double a11 = killing_inner(t.d_r, w_hat);
  const double a12 = killing_inner(t.d_theta, w_hat);
  const double a21 = killing_inner(t.d_r, iw_hat);
  const double a22 = killing_inner(t.d_theta, iw_hat);
  return a11 * a22 - a12 * a21;
}

double omega1_density(const SurfaceSpec& s, double r) {
  double sum = 0.0;
  for (Index j = 0; j < s.sigma.size(); ++j) {
    const double sh = std::sinh(2.0 * s.sigma(j) * r);
    sum += sh * sh;
  }
  return 0.5 * std::sqrt(sum);
}

double omega1_potential(const SurfaceSpec& s, double r, double tol) {
  if (r == 0.0) return 0.0;
  // Integrated over u = r s, s in [0, 1]: the library's error estimate is not rescaled with the
  // subinterval, so it is only meaningful on a unit-length domain.
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&s, r](double u) { return r * omega1_density(s, r * u); }, 0.0, 1.0, 12, 1e-14, &error);
  if (!std::isfinite(value) || error > tol * std::max(1.0, std::abs(value))) {
    throw Error(ErrorCode::numerical, "omega1_potential: quadrature error estimate " +
                                          std::to_string(error) + " at r = " + std::to_string(r));
  }
  return value;
}

TangentPair tangent_pushforwards(const SurfaceSpec& s, double r, double theta) {
  const Index n = s.sig.n;
  const Index m = s.sig.m;
  const Complex phase = std::polar(1.0, theta);

  TangentPair out;
  out.d_r = hat_embed(s.sig, ComplexMatrix(phase * s.w));

  // Per 2x2 block with rate sigma: diagonal entries -/+ i sinh^2(sigma r),
  // off-diagonal entries -/+ (i/2) e^{-/+ i theta} sinh(2 sigma r).
  const auto sh2 = [r](double sg) {
    const double sh = std::sinh(sg * r);
    return sh * sh;
  };
  const Eigen::VectorXcd upsilon =
      per_sigma(s, std::min(n, m), [r](double sg) { return Complex(std::sinh(2.0 * sg * r), 0.0); });
  const ComplexMatrix lower = rectangular(m, n, (0.5 * kI * phase) * upsilon);
  const ComplexMatrix nn = diagonal(per_sigma(s, n, [&](double sg) { return -kI * sh2(sg); }));
  const ComplexMatrix mm = diagonal(per_sigma(s, m, [&](double sg) { return kI * sh2(sg); }));
  const ComplexMatrix upper = lower.adjoint();

  out.d_theta = from_frame(s, nn, upper, lower, mm);
  out.d_theta_horizontal = ComplexMatrix::Zero(n + m, n + m);
  out.d_theta_horizontal.topRightCorner(n, m) = out.d_theta.topRightCorner(n, m);
  out.d_theta_horizontal.bottomLeftCorner(m, n) = out.d_theta.bottomLeftCorner(m, n);
  return out;
}

std::vector<LieGenerator> lie_generators(const SurfaceSpec& s, Index k_max) {
  if (k_max < 1) throw Error(ErrorCode::invalid_input, "lie_generators: k_max must be >= 1");
  const Index n = s.sig.n;
  const Index m = s.sig.m;
  const ComplexMatrix xsx = s.x.adjoint() * s.x;
  const ComplexMatrix xxs = s.x * s.x.adjoint();

  std::vector<LieGenerator> out;
  ComplexMatrix pow_n = ComplexMatrix::Identity(n, n);  // (X^*X)^{k-1}
  ComplexMatrix pow_m = ComplexMatrix::Identity(m, m);  // (XX^*)^{k-1}
  for (Index k = 1; k <= k_max; ++k) {
    LieGenerator g;
    const ComplexMatrix x_k = s.x * pow_n;
    g.x = hat_embed(s.sig, x_k);
    g.ix = hat_embed(s.sig, ComplexMatrix(kI * x_k));
    pow_n = pow_n * xsx;
    pow_m = pow_m * xxs;
    g.v = ComplexMatrix::Zero(n + m, n + m);
    g.v.topLeftCorner(n, n) = kI * pow_n;
    g.v.bottomRightCorner(m, m) = -kI * pow_m;
    out.push_back(std::move(g));
  }
  return out;
}

Index numerical_rank(const std::vector<ComplexMatrix>& family, double rel_tol) {
  if (family.empty()) return 0;
  const Index len = family.front().size();
  Eigen::MatrixXd cols(2 * len, static_cast<Index>(family.size()));
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto flat = family[k].reshaped();
    const double nrm = flat.norm();
    const Index c = static_cast<Index>(k);
    if (nrm == 0.0) {
      cols.col(c).setZero();
      continue;
    }
    cols.col(c).head(len) = flat.real() / nrm;
    cols.col(c).tail(len) = flat.imag() / nrm;
  }
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(cols).singularValues();
  if (sv(0) == 0.0) return 0;
  return (sv.array() > rel_tol * sv(0)).count();
}

GeodesicCheck totally_geodesic_check(const SurfaceSpec& s, double tol) {
  const ComplexMatrix w_hat = hat_embed(s.sig, s.w);
  const ComplexMatrix iw_hat = hat_embed(s.sig, ComplexMatrix(kI * s.w));
  // Orthonormal basis of m' under the metric, so projection is two inner products.
  const auto outside = [&](const ComplexMatrix& a) -> ComplexMatrix {
    return a - killing_inner(a, w_hat) * w_hat - killing_inner(a, iw_hat) * iw_hat;
  };
  const ComplexMatrix inner = commutator(w_hat, iw_hat);
  const double r1 = outside(commutator(inner, w_hat)).norm();
  const double r2 = outside(commutator(inner, iw_hat)).norm();

  GeodesicCheck out;
  out.closure_residual = std::hypot(r1, r2);
  out.geodesic = out.closure_residual <= tol;

  if (s.distinct() == 1) {
    const Index n = s.sig.n;
    const Index m = s.sig.m;
    const double q = static_cast<double>(s.rank);
    const double rq = std::sqrt(q);
    ComplexMatrix v_hat = ComplexMatrix::Zero(n + m, n + m);
    v_hat.topLeftCorner(n, n) = kI * (s.w.adjoint() * s.w);
    v_hat.bottomRightCorner(m, m) = -kI * (s.w * s.w.adjoint());
    const double e1 = (commutator(rq * w_hat, rq * iw_hat) - 2.0 * q * v_hat).norm();
    const double e2 = (commutator(q * v_hat, rq * w_hat) + 2.0 * rq * iw_hat).norm();
    const double e3 = (commutator(q * v_hat, rq * iw_hat) - 2.0 * rq * w_hat).norm();
    out.bracket_identity_residual = std::max({e1, e2, e3});
  }
  return out;
}

double separation_residual(const SurfaceSpec& s, Complex z1, Complex z2) {
  const ComplexMatrix prod = exp_surface_point(s, -z1) * exp_surface_point(s, z2);
  const Index n = s.sig.n;
  const Index m = s.sig.m;
  return std::hypot(prod.topRightCorner(n, m).norm(), prod.bottomLeftCorner(m, n).norm());
}

bool point_separation_check(const SurfaceSpec& s, Complex z1, Complex z2, double tol) {
  return separation_residual(s, z1, z2) <= tol;
}

}  // namespace holonomy
