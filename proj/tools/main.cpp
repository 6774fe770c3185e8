#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void print_report(const ahmass::runner::RunReport& rep) {
  std::cout << "scenario: " << rep.scenario << " (n = " << rep.dimension << ")\n";
  if (rep.mass) {
    std::cout << "mass vector: (";
    for (int i = 0; i < rep.mass->size(); ++i)
      std::cout << (i ? ", " : "") << (*rep.mass)[i];
    std::cout << ")\n";
  }
  for (const auto& t : rep.charges)
    std::cout << "  charge " << t.name << ": " << t.result.extrapolated << " +- "
              << t.result.error_estimate << (t.result.converged ? "" : "  [NOT CONVERGED]")
              << "\n";
  for (const auto& g : rep.gates)
    std::cout << (g.pass ? "  [PASS] " : "  [FAIL] ") << g.name << " = " << g.value
              << " (|.| <= " << g.threshold << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mass aspect charges for asymptotically hyperbolic metrics"};
  app.set_version_flag("--version", "ahmass 0.1.0");

  std::string config_path, out_dir;
  bool no_plots = false;
  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario from a JSON config");
  run_cmd->add_option("--config", config_path, "path to the config JSON")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run_cmd->add_flag("--no-plots", no_plots, "skip SVG convergence plots");

  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "list scenarios and parameters");

  app.require_subcommand(0, 1);
  CLI11_PARSE(app, argc, argv);

  if (list_cmd->parsed()) {
    std::cout << ahmass::runner::list_scenarios();
    return 0;
  }
  if (!run_cmd->parsed()) {
    std::cout << app.help();
    return 0;
  }

  try {
    ahmass::runner::RunConfig config = ahmass::runner::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (no_plots) config.write_plots = false;
    const ahmass::runner::RunReport report = ahmass::runner::run(config);
    ahmass::runner::write_outputs(report, config);
    print_report(report);
    return ahmass::runner::exit_code(report);
  } catch (const ahmass::runner::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
