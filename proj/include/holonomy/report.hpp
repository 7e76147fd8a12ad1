#pragma once

// Batch front end: turns a RunConfig into a JSON or CSV report and a process exit code.
//
// Exit codes: 0 success, 1 a check exceeded its threshold, 2 input error (including trivial_X),
// 3 ill_conditioned, 4 numerical.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "holonomy/config.hpp"
#include "holonomy/curve.hpp"
#include "holonomy/error.hpp"
#include "holonomy/surface.hpp"

namespace holonomy {

inline constexpr const char* kReportSchema = "holonomy_forge.report.v1";
inline constexpr const char* kSweepCsvSchema = "holonomy_forge.sweep.v1";

enum class OutputFormat { json, csv };

struct RunConfig {
  std::string input;                 // a file path, or inline JSON when it starts with '{'
  std::optional<std::string> curve;  // curve JSON; falls back to the input document's "curve"
  Tolerances tol;
  OutputFormat format = OutputFormat::json;
  std::uint64_t seed = 20240611;
  std::vector<double> radii;  // sweep grid
  int cases = 24;             // verify suite size
  bool include_timings = true;

  /// Throws invalid_input unless tolerances are positive, samples >= 64 (multiple of 4)
  /// and ode_steps >= 64.
  void validate() const;
};

struct CommandOutput {
  int exit_code = 0;
  std::string text;
  nlohmann::json report;  // the JSON form, also kept when text is CSV
};

/// One named claim with its residual and threshold.
struct Check {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass() const { return residual <= threshold; }
};

nlohmann::json checks_to_json(const std::vector<Check>& checks);

int exit_code_for(ErrorCode code);

/// Reads the input document: a bare matrix object or {"x": matrix, "curve": {...}, "samples": N}.
nlohmann::json load_input(const std::string& input);
ComplexMatrix input_matrix(const nlohmann::json& doc);

CommandOutput cmd_spectrum(const RunConfig& config);
CommandOutput cmd_holonomy(const RunConfig& config);
CommandOutput cmd_sweep(const RunConfig& config);
CommandOutput cmd_verify(const RunConfig& config);

/// Runs one of the commands, converting holonomy::Error into an error report and exit code.
CommandOutput run_command(const std::string& name, const RunConfig& config);

/// Worker count: HOLONOMY_FORGE_THREADS when set and positive, else the hardware concurrency.
unsigned worker_count();

/// Calls fn(i) for i in [0, count) on a worker pool. Results land by index, so the output order
/// does not depend on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn);

// Randomized inputs shared by the verify command and the test suites.
struct RandomCase {
  Signature sig;
  ComplexMatrix x;
  nlohmann::json curve;
};

/// n, m in [1, 4], complex Gaussian X rescaled to |X|_F in [0.1, 3], and a circle
/// (R in [0.2, 2]), ellipse (eps <= 0.5) or 3-lobed star.
RandomCase draw_case(std::mt19937_64& rng, double max_condition = 1e12);

}  // namespace holonomy

#include "holonomy/detail/parallel_map.hpp"
