// holonomy_forge: spectrum, holonomy, sweep and verify reports for the complex surfaces
// exp(hat(zW)) in U(n,m).

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "holonomy/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Holonomy displacement along closed curves on complex surfaces in U(n,m)/U(m)"};
  app.require_subcommand(1);

  holonomy::RunConfig config;
  std::string format = "json";
  std::string curve;
  bool no_timings = false;

  const auto common = [&](CLI::App* sub, bool with_curve) {
    sub->add_option("--input", config.input, "X as a JSON file path or inline JSON")->required();
    if (with_curve) {
      sub->add_option("--curve", curve,
                      "curve JSON, e.g. {\"kind\":\"circle\",\"R\":1}; kinds: circle, ellipse, star, "
                      "shifted_circle, constant, polar_samples. Simplicity of the curve is not checked.");
    }
    sub->add_option("--samples", config.tol.samples, "quadrature panels (multiple of 4, >= 64)");
    sub->add_option("--ode-steps", config.tol.ode_steps, "RK4 steps for the transport oracle (>= 64)");
    sub->add_option("--group-tol", config.tol.group_tol, "relative tolerance for merging singular values");
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", config.seed, "seed for randomized suites");
    sub->add_flag("--no-timings", no_timings, "omit wall-clock timings from the report");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "singular values, groups and the totally geodesic test");
  common(spectrum, false);
  CLI::App* hol = app.add_subcommand("holonomy", "holonomy along one closed curve, checked against the ODE oracle");
  common(hol, true);
  CLI::App* sweep = app.add_subcommand("sweep", "one CSV/JSON row per radius of the curve family");
  common(sweep, true);
  sweep->add_option("--radii", config.radii, "radius grid, e.g. --radii 0.5,1,2 or --radii 0.5 1 2")->delimiter(',');
  CLI::App* verify = app.add_subcommand("verify", "seeded randomized suite of trace and oracle checks");
  verify->add_option("--input", config.input, "ignored; cases are drawn from --seed");
  verify->add_option("--cases", config.cases, "number of random cases");
  verify->add_option("--samples", config.tol.samples, "quadrature panels (multiple of 4, >= 64)");
  verify->add_option("--ode-steps", config.tol.ode_steps, "RK4 steps for the transport oracle (>= 64)");
  verify->add_option("--group-tol", config.tol.group_tol, "relative tolerance for merging singular values");
  verify->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--seed", config.seed, "seed for randomized suites");
  verify->add_flag("--no-timings", no_timings, "omit wall-clock timings from the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  config.format = format == "csv" ? holonomy::OutputFormat::csv : holonomy::OutputFormat::json;
  config.include_timings = !no_timings;
  if (!curve.empty()) config.curve = curve;

  const std::string name = app.get_subcommands().front()->get_name();
  const holonomy::CommandOutput out = holonomy::run_command(name, config);
  if (out.report.contains("error")) {
    std::cerr << out.text << '\n';
  } else {
    std::cout << out.text;
    if (config.format == holonomy::OutputFormat::json) std::cout << '\n';
  }
  return out.exit_code;
}
