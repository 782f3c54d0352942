#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bardina/errors.hpp"
#include "bardina/scenario.hpp"
#include "bardina/workbench.hpp"

using namespace bardina;

int main(int argc, char** argv) {
  CLI::App app{"Damped Euler-Bardina workbench: simulation, certificates and alpha sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  CommandOptions opts;
  std::string out;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--set", overrides, "Override section.key=value (repeatable)")->allow_extra_args(false);
  app.add_flag("--serial", opts.serial, "Single lane, bit-reproducible execution");
  app.add_option("--out", out, "Output directory (overrides output.dir)");

  auto* simulate = app.add_subcommand("simulate", "Integrate and write checkpoints and an energy CSV");
  auto* certify = app.add_subcommand("certify", "Integrate and run the selected certificates");
  auto* sweep = app.add_subcommand("sweep", "Run an alpha family and its family-level checks");
  auto* semi = app.add_subcommand("semicontinuity", "Attractor gap table over alpha");
  auto* dim = app.add_subcommand("dim-bound", "Print the attractor dimension bound");
  auto* selftest = app.add_subcommand("selftest", "Run the built-in example suite");
  std::optional<double> g_norm, alpha, gamma;
  dim->add_option("--g-norm", g_norm, "L2 norm of the forcing (default: configured forcing)");
  dim->add_option("--alpha", alpha, "alpha (default: solver.alpha)");
  dim->add_option("--gamma", gamma, "gamma (default: solver.gamma)");
  for (auto* sub : {simulate, certify, sweep, semi, dim, selftest}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }
  opts.out = out;

  return run_guarded(
      [&]() -> int {
        const bool needs_config = !(dim->parsed() || selftest->parsed());
        if (needs_config && config_path.empty()) {
          throw ConfigError("--config is required for this subcommand", "--config");
        }
        RunConfig cfg;
        if (!config_path.empty()) {
          cfg = load_config(config_path, overrides);
        } else if (!overrides.empty()) {
          cfg = parse_config("", overrides);
        }
        if (selftest->parsed()) return selftest_command(opts, std::cout);
        if (dim->parsed()) {
          const double g = g_norm ? *g_norm
                                  : norm(make_forcing(cfg.forcing, cfg.solver.resolution), NormKind::l2());
          return dim_bound_command(g, alpha.value_or(cfg.solver.alpha), gamma.value_or(cfg.solver.gamma), std::cout);
        }
        if (simulate->parsed()) return simulate_command(cfg, opts, std::cout);
        if (certify->parsed()) return certify_command(cfg, opts, std::cout);
        if (sweep->parsed()) return sweep_command(cfg, opts, std::cout);
        return semicontinuity_command(cfg, opts, std::cout);
      },
      std::cerr);
}
