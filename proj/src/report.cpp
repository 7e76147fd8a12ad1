#include "holonomy/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "holonomy/holonomy.hpp"
#include "holonomy/matrix_json.hpp"
#include "holonomy/transport.hpp"

namespace holonomy {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Thresholds quoted in every report.
constexpr double kTraceThreshold = 1e-8;
constexpr double kOracleThreshold = 1e-6;
constexpr double kHalvingThreshold = 1e-7;
constexpr double kDriftThreshold = 1e-8;
constexpr double kStructureThreshold = 1e-10;
constexpr double kAntiHermitianThreshold = 1e-12;
constexpr double kSigmaSumThreshold = 1e-12;
constexpr double kDiagonalFormThreshold = 1e-8;

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    if (!c.pass()) return false;
  }
  return true;
}

nlohmann::json config_echo(const RunConfig& config) {
  return {{"group_tol", config.tol.group_tol}, {"quad_tol", config.tol.quad_tol},
          {"samples", config.tol.samples},     {"ode_steps", config.tol.ode_steps},
          {"seed", config.seed},               {"format", config.format == OutputFormat::json ? "json" : "csv"}};
}

SurfaceSpec surface_from(const nlohmann::json& doc, const RunConfig& config) {
  const ComplexMatrix x = input_matrix(doc);
  return build_surface(Signature{x.cols(), x.rows()}, x, config.tol.group_tol);
}

nlohmann::json curve_document(const nlohmann::json& doc, const RunConfig& config, bool required) {
  if (config.curve) {
    try {
      return nlohmann::json::parse(*config.curve);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::invalid_input, std::string("--curve is not valid JSON: ") + e.what());
    }
  }
  if (doc.is_object() && doc.contains("curve")) return doc["curve"];
  if (required) throw Error(ErrorCode::invalid_input, "no curve given; pass --curve or an input with a 'curve' field");
  return nlohmann::json{{"kind", "circle"}, {"R", 1.0}};
}

std::vector<Check> spectrum_checks(const SurfaceSpec& s) {
  const double w_norm = s.w.norm();
  return {{"sigma_square_sum", std::abs(s.sigma.squaredNorm() - 1.0), kSigmaSumThreshold},
          {"svd_reconstruction", (s.svd.reconstruct() - s.w).norm(), kStructureThreshold * std::max(w_norm, 1e-300)}};
}

std::string spectrum_csv(const SurfaceSpec& s) {
  std::ostringstream os;
  os << "index,sigma,group\n";
  for (Index j = 0; j < s.sigma.size(); ++j) {
    int group = 0;
    for (std::size_t l = 0; l < s.groups.size(); ++l) {
      for (Index k : s.groups[l].indices) {
        if (k == j) group = static_cast<int>(l) + 1;
      }
    }
    os << j + 1 << ',' << format_double(s.sigma(j)) << ',' << group << '\n';
  }
  return os.str();
}

std::string checks_csv(const std::vector<Check>& checks) {
  std::ostringstream os;
  os << "check,residual,threshold,pass\n";
  for (const auto& c : checks) {
    os << c.name << ',' << format_double(c.residual) << ',' << format_double(c.threshold) << ','
       << (c.pass() ? "true" : "false") << '\n';
  }
  return os.str();
}

// Holonomy with oracle and every residual that goes with it.
struct PipelineResult {
  HolonomyResult analytic;
  TransportTrace oracle;
  double oracle_residual = 0.0;
  double halving_delta = 0.0;
  double frame_drift = 0.0;
  std::optional<DiagonalFormCheck> diagonal;
  std::vector<Check> checks;
  nlohmann::json timings;
};

PipelineResult run_pipeline(const SurfaceSpec& s, const ClosedCurve& c, const Tolerances& tol, bool full) {
  PipelineResult out;
  auto start = Clock::now();
  out.analytic = holonomy(s, c, tol);
  out.timings["holonomy_ms"] = elapsed_ms(start);

  start = Clock::now();
  out.oracle = integrate_lift(s, c, tol.ode_steps, full);
  out.oracle_residual = compare_holonomies(out.analytic, out.oracle);
  out.timings["oracle_ms"] = elapsed_ms(start);

  const HolonomyResult& h = out.analytic;
  out.checks = {{"trace_identity", h.trace_residual, kTraceThreshold},
                {"oracle_agreement", out.oracle_residual, kOracleThreshold},
                {"oracle_unitarity_drift", out.oracle.unitarity_drift, kDriftThreshold},
                {"psi_anti_hermitian", h.anti_hermitian_residual, kAntiHermitianThreshold},
                {"holonomy_unitarity", h.unitarity_residual, kStructureThreshold},
                {"psi_span_membership", h.span_residual, kStructureThreshold},
                {"defining_equations", h.defining_residual, kStructureThreshold},
                {"quadrature", h.quadrature_error, tol.quad_tol * std::max(1.0, std::abs(h.area0))}};
  if (!full) return out;

  start = Clock::now();
  const int half_steps = std::max(64, tol.ode_steps / 2);
  out.halving_delta = (integrate_lift(s, c, half_steps).holonomy_oracle - out.oracle.holonomy_oracle).norm();
  out.frame_drift = lifted_frame_drift(s, c, out.oracle);
  out.timings["oracle_checks_ms"] = elapsed_ms(start);
  out.checks.push_back({"oracle_step_halving", out.halving_delta, kHalvingThreshold});
  out.checks.push_back({"lifted_frame_pseudo_unitarity", out.frame_drift, kDriftThreshold});
  if (s.distinct() == 1) {
    out.diagonal = corollary_diagonal_form(s, h, kDiagonalFormThreshold);
    out.checks.push_back({"diagonal_form_psi", out.diagonal->psi_residual, kDiagonalFormThreshold});
    out.checks.push_back({"area_forms_agree", out.diagonal->area_gap, kDiagonalFormThreshold});
  }
  return out;
}

nlohmann::json finish(nlohmann::json report, const RunConfig& config, const nlohmann::json& timings) {
  if (config.include_timings) report["timings"] = timings;
  return report;
}

}  // namespace

void RunConfig::validate() const {
  const auto require = [](bool ok, const char* why) {
    if (!ok) throw Error(ErrorCode::invalid_input, why);
  };
  require(tol.group_tol > 0.0 && tol.quad_tol > 0.0 && tol.potential_tol > 0.0 && tol.algebra_tol > 0.0 &&
              tol.separation_tol > 0.0 && tol.max_condition > 0.0,
          "tolerances must be positive");
  require(tol.samples >= 64 && tol.samples % 4 == 0, "--samples must be a multiple of 4 and >= 64");
  require(tol.ode_steps >= 64, "--ode-steps must be >= 64");
  require(cases >= 0, "--cases must be >= 0");
  for (double r : radii) require(std::isfinite(r) && r >= 0.0, "sweep radii must be finite and nonnegative");
}

nlohmann::json checks_to_json(const std::vector<Check>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name}, {"residual", c.residual}, {"threshold", c.threshold}, {"pass", c.pass()}});
  }
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ill_conditioned: return 3;
    case ErrorCode::numerical: return 4;
    default: return 2;
  }
}

nlohmann::json load_input(const std::string& input) {
  const auto first = input.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && input[first] == '{') return nlohmann::json::parse(input);
    std::ifstream in(input);
    if (!in) throw Error(ErrorCode::invalid_input, "cannot open input '" + input + "'");
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("input is not valid JSON: ") + e.what());
  }
}

ComplexMatrix input_matrix(const nlohmann::json& doc) {
  if (doc.is_object() && doc.contains("x")) return matrix_from_json(doc["x"]);
  return matrix_from_json(doc);
}

CommandOutput cmd_spectrum(const RunConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const nlohmann::json doc = load_input(config.input);
  const SurfaceSpec s = surface_from(doc, config);
  const GeodesicCheck geo = totally_geodesic_check(s);
  const std::vector<Check> checks = spectrum_checks(s);

  nlohmann::json geodesic = {{"geodesic", geo.geodesic}, {"closure_residual", geo.closure_residual}};
  if (geo.bracket_identity_residual) geodesic["bracket_identity_residual"] = *geo.bracket_identity_residual;

  nlohmann::json report = {{"schema", kReportSchema},       {"command", "spectrum"},
                           {"config", config_echo(config)}, {"surface", surface_to_json(s)},
                           {"totally_geodesic", geodesic},  {"checks", checks_to_json(checks)}};
  CommandOutput out;
  out.exit_code = all_pass(checks) ? 0 : 1;
  out.report = finish(std::move(report), config, {{"total_ms", elapsed_ms(start)}});
  out.text = config.format == OutputFormat::json ? out.report.dump(2) : spectrum_csv(s);
  return out;
}

CommandOutput cmd_holonomy(const RunConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const nlohmann::json doc = load_input(config.input);
  const SurfaceSpec s = surface_from(doc, config);
  const ClosedCurve c = curve_from_json(curve_document(doc, config, true), config.tol.samples);
  PipelineResult run = run_pipeline(s, c, config.tol, true);

  nlohmann::json warnings = nlohmann::json::array();
  warnings.push_back("curve simplicity is not checked; areas are signed line integrals");
  if (run.analytic.negative_orientation) warnings.push_back("area0 is negative: the curve runs clockwise");

  nlohmann::json transport = transport_summary(run.oracle);
  transport["oracle_residual"] = run.oracle_residual;
  transport["halving_delta"] = run.halving_delta;
  transport["lifted_frame_drift"] = run.frame_drift;
  transport["holonomy_oracle"] = matrix_to_json(run.oracle.holonomy_oracle);

  const Complex tr = run.analytic.psi.trace();
  nlohmann::json report = {{"schema", kReportSchema},
                           {"command", "holonomy"},
                           {"config", config_echo(config)},
                           {"curve", {{"description", c.description()}, {"source", c.source()}, {"winding", c.winding()}}},
                           {"surface", surface_to_json(s)},
                           {"holonomy", holonomy_to_json(run.analytic)},
                           {"trace_over_2i", tr.imag() / 2.0},
                           {"transport", transport},
                           {"checks", checks_to_json(run.checks)},
                           {"warnings", warnings}};
  run.timings["total_ms"] = elapsed_ms(start);

  CommandOutput out;
  out.exit_code = all_pass(run.checks) ? 0 : 1;
  out.report = finish(std::move(report), config, run.timings);
  out.text = config.format == OutputFormat::json ? out.report.dump(2) : checks_csv(run.checks);
  return out;
}

CommandOutput cmd_sweep(const RunConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const nlohmann::json doc = load_input(config.input);
  const SurfaceSpec s = surface_from(doc, config);
  const nlohmann::json base = curve_document(doc, config, false);
  if (!base.is_object() || !base.contains("R")) {
    throw Error(ErrorCode::invalid_input, "sweep needs a curve kind with an 'R' field");
  }

  struct Row {
    double radius = 0.0;
    double area0 = NAN, area1 = NAN, trace_over_2i = NAN, trace_residual = NAN, oracle_residual = NAN;
    std::string status;
  };
  const std::function<Row(std::size_t)> run_row = [&](std::size_t i) {
    Row row;
    row.radius = config.radii[i];
    try {
      nlohmann::json curve_doc = base;
      curve_doc["R"] = row.radius;
      const ClosedCurve c = curve_from_json(curve_doc, config.tol.samples);
      const PipelineResult run = run_pipeline(s, c, config.tol, false);
      row.area0 = run.analytic.area0;
      row.area1 = run.analytic.area1;
      row.trace_over_2i = run.analytic.psi.trace().imag() / 2.0;
      row.trace_residual = run.analytic.trace_residual;
      row.oracle_residual = run.oracle_residual;
      row.status = all_pass(run.checks) ? "ok" : "threshold";
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
    }
    return row;
  };
  const std::vector<Row> rows = parallel_map(config.radii.size(), run_row);

  std::size_t failed = 0;
  nlohmann::json table = nlohmann::json::array();
  std::ostringstream csv;
  csv << "schema,R,area0,area1,trace_over_2i,trace_residual,oracle_residual,status\n";
  for (const Row& r : rows) {
    if (r.status != "ok") ++failed;
    const auto num = [](double v) { return std::isnan(v) ? nlohmann::json() : nlohmann::json(v); };
    table.push_back({{"R", r.radius},
                     {"area0", num(r.area0)},
                     {"area1", num(r.area1)},
                     {"trace_over_2i", num(r.trace_over_2i)},
                     {"trace_residual", num(r.trace_residual)},
                     {"oracle_residual", num(r.oracle_residual)},
                     {"status", r.status}});
    csv << kSweepCsvSchema << ',' << format_double(r.radius) << ',' << format_double(r.area0) << ','
        << format_double(r.area1) << ',' << format_double(r.trace_over_2i) << ',' << format_double(r.trace_residual)
        << ',' << format_double(r.oracle_residual) << ',' << r.status << '\n';
  }

  nlohmann::json report = {{"schema", kReportSchema},
                           {"command", "sweep"},
                           {"config", config_echo(config)},
                           {"curve", base},
                           {"surface", surface_to_json(s)},
                           {"thresholds", {{"trace_identity", kTraceThreshold}, {"oracle_agreement", kOracleThreshold}}},
                           {"rows", table}};
  CommandOutput out;
  out.exit_code = (!rows.empty() && failed == rows.size()) ? 1 : 0;
  out.report = finish(std::move(report), config, {{"total_ms", elapsed_ms(start)}});
  out.text = config.format == OutputFormat::json ? out.report.dump(2) : csv.str();
  return out;
}

CommandOutput cmd_verify(const RunConfig& config) {
  config.validate();
  const auto start = Clock::now();
  std::mt19937_64 rng(config.seed);
  std::vector<RandomCase> cases;
  for (int i = 0; i < config.cases; ++i) cases.push_back(draw_case(rng, config.tol.max_condition));

  struct Outcome {
    std::vector<Check> checks;
    std::string error;
  };
  const std::function<Outcome(std::size_t)> run_case = [&](std::size_t i) {
    Outcome o;
    try {
      const SurfaceSpec s = build_surface(cases[i].sig, cases[i].x, config.tol.group_tol);
      const ClosedCurve c = curve_from_json(cases[i].curve, config.tol.samples);
      o.checks = run_pipeline(s, c, config.tol, false).checks;
    } catch (const Error& e) {
      o.error = e.what();
    }
    return o;
  };
  const std::vector<Outcome> outcomes = parallel_map(cases.size(), run_case);

  nlohmann::json rows = nlohmann::json::array();
  std::map<std::string, double> worst;
  std::ostringstream csv;
  csv << "case,n,m,curve,check,residual,threshold,pass\n";
  int failures = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Outcome& o = outcomes[i];
    const bool ok = o.error.empty() && all_pass(o.checks);
    if (!ok) ++failures;
    nlohmann::json row = {{"case", i},
                          {"n", cases[i].sig.n},
                          {"m", cases[i].sig.m},
                          {"x", matrix_to_json(cases[i].x)},
                          {"curve", cases[i].curve},
                          {"pass", ok}};
    if (!o.error.empty()) row["error"] = o.error;
    row["checks"] = checks_to_json(o.checks);
    rows.push_back(row);
    for (const auto& c : o.checks) {
      worst[c.name] = std::max(worst[c.name], c.residual);
      csv << i << ',' << cases[i].sig.n << ',' << cases[i].sig.m << ',' << cases[i].curve["kind"].get<std::string>()
          << ',' << c.name << ',' << format_double(c.residual) << ',' << format_double(c.threshold) << ','
          << (c.pass() ? "true" : "false") << '\n';
    }
  }

  nlohmann::json report = {{"schema", kReportSchema},
                           {"command", "verify"},
                           {"config", config_echo(config)},
                           {"seed", config.seed},
                           {"cases", cases.size()},
                           {"failures", failures},
                           {"worst_residuals", worst},
                           {"rows", rows}};
  CommandOutput out;
  out.exit_code = failures == 0 ? 0 : 1;
  out.report = finish(std::move(report), config, {{"total_ms", elapsed_ms(start)}});
  out.text = config.format == OutputFormat::json ? out.report.dump(2) : csv.str();
  return out;
}

CommandOutput run_command(const std::string& name, const RunConfig& config) {
  try {
    if (name == "spectrum") return cmd_spectrum(config);
    if (name == "holonomy") return cmd_holonomy(config);
    if (name == "sweep") return cmd_sweep(config);
    if (name == "verify") return cmd_verify(config);
    throw Error(ErrorCode::invalid_input, "unknown command '" + name + "'");
  } catch (const Error& e) {
    CommandOutput out;
    out.exit_code = exit_code_for(e.code());
    out.report = {{"schema", kReportSchema},
                  {"command", name},
                  {"error", std::string(to_string(e.code()))},
                  {"message", e.what()}};
    out.text = out.report.dump(2);
    return out;
  }
}

unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("HOLONOMY_FORGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

RandomCase draw_case(std::mt19937_64& rng, double max_condition) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    RandomCase out;
    out.sig = Signature{dim(rng), dim(rng)};
    out.x.resize(out.sig.m, out.sig.n);
    for (Index i = 0; i < out.x.rows(); ++i) {
      for (Index j = 0; j < out.x.cols(); ++j) out.x(i, j) = Complex(gauss(rng), gauss(rng));
    }
    out.x *= (0.1 + 2.9 * unit(rng)) / out.x.norm();

    const double radius = 0.2 + 1.8 * unit(rng);
    const double eps = 0.5 * unit(rng);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: out.curve = {{"kind", "circle"}, {"R", radius}}; break;
      case 1: out.curve = {{"kind", "ellipse"}, {"R", radius}, {"eps", eps}}; break;
      default: out.curve = {{"kind", "star"}, {"R", radius}, {"eps", eps}, {"lobes", 3}}; break;
    }
    // Nearly coincident singular values give Vandermonde systems the pipeline refuses; redraw.
    const SurfaceSpec s = build_surface(out.sig, out.x);
    if (vandermonde_system(s, std::numeric_limits<double>::infinity()).condition <= max_condition) return out;
  }
}

}  // namespace holonomy
