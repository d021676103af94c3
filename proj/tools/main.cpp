#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "app/config.hpp"
#include "app/plot.hpp"
#include "app/runner.hpp"
#include "rpsde/csv.hpp"

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const std::string& seed_override, const std::string& dt_override, unsigned workers,
        bool plots) {
  using namespace rpsde::app;
  auto config = load_config(config_path);
  if (!seed_override.empty()) config.set("run", "seed", seed_override);
  if (!dt_override.empty()) {
    config.set("grid", "dt", dt_override);
    config.set("grid", "steps_per_period", "0");
  }
  const auto result = run_command(command, config, out_dir, {workers, plots}, std::cout);
  for (const auto& o : result.outputs) std::cout << "wrote " << out_dir << '/' << o << '\n';
  std::cout << (result.status == kExitPass ? "status: pass" : "status: fail") << '\n';
  return result.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random periodic solutions of periodic SDEs"};
  app.set_version_flag("--version", rpsde::app::version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string seed_override;
  std::string dt_override;
  unsigned workers = 1;
  bool plots = false;
  std::string csv_path;
  std::string chosen;

  for (const auto& name : rpsde::app::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment INI file")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed-override", seed_override, "replace [run] seed");
    sub->add_option("--dt-override", dt_override, "replace [grid] dt");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--plots", plots, "write gnuplot scripts next to the CSVs");
    sub->callback([&chosen, name] { chosen = name; });
  }
  auto* plot = app.add_subcommand("plot", "write a gnuplot script for a CSV file");
  plot->add_option("--csv", csv_path, "CSV file")->required()->check(CLI::ExistingFile);
  plot->callback([&chosen] { chosen = "plot"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : rpsde::app::kExitError;
  }

  try {
    if (chosen == "plot") {
      const auto script = rpsde::app::emit_plot(csv_path);
      std::cout << "wrote " << script.string() << '\n';
      return rpsde::app::kExitPass;
    }
    return run(chosen, config_path, out_dir, seed_override, dt_override, workers, plots);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rpsde::app::kExitError;
  }
}
