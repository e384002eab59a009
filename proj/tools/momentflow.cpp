// momentflow: run a configured flow experiment and write its report.
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 for a
// configuration error, 3 for any other library error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "momentflow/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Moment-map gradient flow experiments"};
  std::string config_path;
  std::string builtin;
  bool list = false;
  bool quiet = false;
  bool print_config = false;
  momentflow::RunOptions options;

  auto* config_opt = app.add_option("--config", config_path, "experiment config file");
  auto* builtin_opt = app.add_option("--builtin", builtin, "name of a bundled experiment");
  config_opt->excludes(builtin_opt);
  app.add_option("--out-dir", options.out_dir,
                 "output directory (default: config output_dir, then $MOMENTFLOW_OUT, then .)");
  app.add_option("--tol-scale", options.tol_scale, "multiply every check tolerance")
      ->check(CLI::PositiveNumber);
  app.add_flag("--list-builtins", list, "print the bundled experiment names");
  app.add_flag("--print-config", print_config, "print the selected config text and exit");
  app.add_flag("--quiet", quiet, "do not echo the report");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const std::string& name : momentflow::list_builtins()) std::cout << name << '\n';
    return 0;
  }
  if (config_path.empty() && builtin.empty()) {
    std::cerr << "momentflow: one of --config or --builtin is required\n";
    return 2;
  }

  try {
    if (print_config) {
      if (!builtin.empty()) {
        std::cout << momentflow::builtin_config_text(builtin);
      } else {
        std::cout << momentflow::canonical_config(momentflow::load_config(config_path));
      }
      return 0;
    }
    const momentflow::ExperimentConfig config = builtin.empty()
                                                    ? momentflow::load_config(config_path)
                                                    : momentflow::builtin_config(builtin);
    const momentflow::ExperimentResult result = momentflow::run_experiment(config, options);
    if (!quiet) std::cout << result.report;
    for (const momentflow::CheckResult& check : result.checks) {
      if (!check.pass) std::cerr << "check failed: " << check.name << '\n';
    }
    return result.passed ? 0 : 1;
  } catch (const momentflow::ConfigError& e) {
    std::cerr << "momentflow: " << e.what() << '\n';
    return 2;
  } catch (const momentflow::Error& e) {
    std::cerr << "momentflow: " << e.what() << '\n';
    return 3;
  }
}
