#include <iostream>

#include <CLI11.hpp>

#include "dustlab/cli.hpp"

int main(int argc, char** argv) {
  using namespace dustlab::cli;
  CLI::App app{"Lagrangian dust-collapse laboratory: simulate, certify, verify, sweep"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  RunManifest manifest;
  manifest.tool_version = tool_version();
  std::string lambda_grid, h0_grid;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", manifest.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out", manifest.output_dir, "Output directory")->required();
  };
  auto* simulate = app.add_subcommand("simulate", "Integrate a scenario and write trajectory tables");
  auto* certify = app.add_subcommand("certify", "Issue a finite-time blowup certificate");
  auto* verify = app.add_subcommand("verify", "Simulate and check the integral inequality chain");
  auto* sweep = app.add_subcommand("sweep", "Certificate and simulation over a lambda or h0 grid");
  for (auto* sub : {simulate, certify, verify, sweep}) add_common(sub);
  sweep->add_option("--lambda-grid", lambda_grid, "Lambda grid a:b:n");
  sweep->add_option("--h0-grid", h0_grid, "H(0) grid a:b:n");
  sweep->add_option("--jobs", manifest.jobs, "Concurrent sweep rows")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  if (simulate->parsed()) manifest.command = Command::Simulate;
  if (certify->parsed()) manifest.command = Command::Certify;
  if (verify->parsed()) manifest.command = Command::Verify;
  if (sweep->parsed()) {
    manifest.command = Command::Sweep;
    try {
      if (!lambda_grid.empty()) manifest.lambda_grid = parse_grid(lambda_grid);
      if (!h0_grid.empty()) manifest.h0_grid = parse_grid(h0_grid);
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << '\n';
      return kValidation;
    }
  }
  return run(manifest, std::cout, std::cerr);
}
