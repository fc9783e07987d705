// Command-line driver: runs one experiment subcommand against a config file
// and writes deterministic CSV/JSON payloads.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gibbs/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gibbs/Patterson-Sullivan experiments on Schottky groups"};
  app.require_subcommand(1);

  std::string config_path, out_prefix, cache_dir;
  int workers = 0;
  uint64_t budget = 0;
  bool strict = false;
  app.add_option("--config", config_path, "experiment config file")
      ->required();
  app.add_option("--out", out_prefix,
                 "output prefix; writes <prefix>.csv and <prefix>.json");
  app.add_option("--cache", cache_dir, "cache directory");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_option("--budget", budget, "enumeration node budget override");
  app.add_flag("--strict", strict, "treat numerical warnings as failures");

  for (const std::string& sub : gibbs::subcommands())
    app.add_subcommand(sub, "")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : gibbs::kExitUsage;
  }

  try {
    gibbs::ExperimentConfig cfg = gibbs::parse_config(config_path);
    gibbs::RunOverrides ov;
    ov.workers = workers;
    ov.budget = budget;
    ov.cache_dir = cache_dir;
    ov.strict = strict;
    std::string sub = app.get_subcommands().front()->get_name();
    gibbs::RunReport rep = gibbs::run(cfg, sub, ov);

    if (!out_prefix.empty()) {
      std::ofstream csv(out_prefix + ".csv", std::ios::binary);
      csv << rep.csv;
      std::ofstream js(out_prefix + ".json", std::ios::binary);
      js << rep.json;
    } else {
      std::cout << rep.json;
    }
    std::cerr << "# " << sub << " config=" << std::hex << rep.config_hash
              << std::dec << (rep.cache_hit ? " [cache]" : "") << " wall="
              << rep.wall_seconds << "s\n";
    for (const std::string& w : rep.warnings)
      std::cerr << "# warning: " << w << "\n";
    if (strict && rep.exit_category == gibbs::kExitNumericalWarning)
      return gibbs::kExitNumericalWarning;
    if (!strict && rep.exit_category == gibbs::kExitNumericalWarning)
      return gibbs::kExitNumericalWarning;
    return rep.exit_category;
  } catch (const gibbs::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gibbs::kExitUsage;
  } catch (const gibbs::InvalidDiscs& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return gibbs::kExitValidation;
  } catch (const gibbs::NonLoxodromicGenerator& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return gibbs::kExitValidation;
  } catch (const gibbs::BudgetExceeded& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return gibbs::kExitBudget;
  } catch (const gibbs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gibbs::kExitValidation;
  }
}
