#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nashseek/cli.hpp"

int main(int argc, char** argv) {
  using namespace nashseek;
  CLI::App app{"Distributed Nash equilibrium seeking under disturbances and unmodeled terms"};

  cli::Options opt;
  std::string preset, config, axis, levels;
  bool list = false;
  app.add_option("--preset", preset, "Named preset scenario");
  app.add_option("--config", config, "Scenario JSON file");
  app.add_option("--out", opt.out, "Output directory")->capture_default_str();
  app.add_option("--set", opt.overrides, "Override KEY=VALUE (dotted path, repeatable)");
  app.add_option("--sweep-axis", axis, "Gain to sweep (sigma or theta)");
  app.add_option("--sweep-levels", levels, "Comma-separated sweep levels");
  app.add_flag("--record-estimates", opt.record_estimates, "Also write estimates.csv");
  app.add_flag("--dump-config", opt.dump_config, "Print the preset as scenario JSON and exit");
  app.add_flag("--list-presets", list, "List preset names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kBadInput;
  }

  if (list) {
    for (const auto& name : presets::names()) std::cout << name << '\n';
    return cli::kOk;
  }
  if (!preset.empty()) opt.preset = preset;
  if (!config.empty()) opt.config = config;
  if (!axis.empty()) opt.sweep_axis = axis;
  if (!levels.empty()) {
    std::stringstream ss(levels);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        opt.sweep_levels.push_back(std::stod(item));
      } catch (const std::exception&) {
        std::cerr << "bad sweep level '" << item << "'\n";
        return cli::kBadInput;
      }
    }
  }
  try {
    return cli::dispatch(opt, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBadInput;
  }
}
