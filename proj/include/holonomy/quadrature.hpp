#pragma once

// Composite Simpson on the uniform grid t_i = i / N of [0, 1], with a Richardson estimate
// from the half-resolution rule sharing the same nodes.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "holonomy/error.hpp"

namespace holonomy {

struct SimpsonResult {
  Eigen::VectorXd value;
  double error_estimate = 0.0;  // |S_N - S_{N/2}|_inf / 15
  // Running integrals at t_{2i}, i = 0..N/2 (only filled when requested).
  std::vector<Eigen::VectorXd> running;
};

/// Integrates a vector-valued f over [0, 1]. N must be a positive multiple of 4.
template <typename F>
SimpsonResult composite_simpson(F&& f, int panels, bool keep_running = false) {
  if (panels < 4 || panels % 4 != 0) {
    throw Error(ErrorCode::invalid_input, "composite_simpson: panels must be a positive multiple of 4");
  }
  const double h = 1.0 / panels;
  std::vector<Eigen::VectorXd> vals;
  vals.reserve(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) {
    vals.push_back(f(i * h));
    if (!vals.back().allFinite()) {
      throw Error(ErrorCode::numerical, "non-finite integrand at t = " + std::to_string(i * h));
    }
  }
  const Eigen::Index dim = vals.front().size();

  SimpsonResult out;
  Eigen::VectorXd fine = Eigen::VectorXd::Zero(dim);
  if (keep_running) out.running.push_back(fine);
  for (int i = 0; i < panels; i += 2) {
    const auto k = static_cast<std::size_t>(i);
    fine += (h / 3.0) * (vals[k] + 4.0 * vals[k + 1] + vals[k + 2]);
    if (keep_running) out.running.push_back(fine);
  }
  Eigen::VectorXd coarse = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < panels; i += 4) {
    const auto k = static_cast<std::size_t>(i);
    coarse += (2.0 * h / 3.0) * (vals[k] + 4.0 * vals[k + 2] + vals[k + 4]);
  }
  out.value = fine;
  out.error_estimate = (fine - coarse).lpNorm<Eigen::Infinity>() / 15.0;
  return out;
}

/// Throws numerical when the Richardson estimate exceeds tol * max(1, |I|).
inline void require_converged(const SimpsonResult& r, double tol, const char* what) {
  const double scale = std::max(1.0, r.value.lpNorm<Eigen::Infinity>());
  if (!(r.error_estimate <= tol * scale)) {
    throw Error(ErrorCode::numerical, std::string(what) + ": quadrature did not converge (estimate " +
                                          std::to_string(r.error_estimate) + "); raise --samples");
  }
}

}  // namespace holonomy
