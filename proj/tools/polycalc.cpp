#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "polycalc/experiment.hpp"
#include "polycalc/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"polycalc: finite-dimensional experiments on Ritt-type operators"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "polycalc_out";
  std::optional<std::uint64_t> seed;
  for (const std::string& name : polycalc::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "report directory");
    sub->add_option("--seed", seed, "override the config seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  polycalc::kernels::configure_threads_from_env();
  try {
    polycalc::ExperimentConfig cfg = polycalc::load_config(config_path);
    if (seed) cfg.seed = *seed;
    const polycalc::Report report = polycalc::run_experiment(subcommand, cfg);
    polycalc::write_report(report, out_dir);
    std::cout << subcommand << ": " << (report.passed ? "pass" : "FAIL") << " (" << out_dir << "/summary.json)\n";
    return report.passed ? 0 : 1;
  } catch (const polycalc::Error& e) {
    std::cerr << "polycalc: " << e.what() << '\n';
    return e.kind() == polycalc::ErrorKind::InvalidInput ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "polycalc: " << e.what() << '\n';
    return 1;
  }
}
