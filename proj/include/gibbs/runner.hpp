#ifndef GIBBS_RUNNER_HPP
#define GIBBS_RUNNER_HPP

#include <string>
#include <vector>

#include "gibbs/config.hpp"

// Experiment orchestration: subcommand dispatch, deterministic CSV/JSON
// payload emission, result caching.

namespace gibbs {

inline constexpr const char* kVersion = "0.1.0";

// exit-code taxonomy
enum ExitCategory {
  kExitOk = 0,
  kExitNumericalWarning = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitBudget = 4,
};

struct RunOverrides {
  int workers = 0;          // 0 = hardware concurrency
  uint64_t budget = 0;      // 0 = config value
  std::string cache_dir;    // empty = no cache
  bool strict = false;
};

struct RunReport {
  uint64_t config_hash = 0;
  std::string version = kVersion;
  std::string subcommand;
  double wall_seconds = 0.0;
  bool cache_hit = false;
  std::vector<std::string> warnings;
  std::string csv;   // deterministic payload
  std::string json;  // deterministic payload
  int exit_category = kExitOk;
};

const std::vector<std::string>& subcommands();

RunReport run(const ExperimentConfig& cfg, const std::string& subcommand,
              const RunOverrides& ov = {});

// 17-significant-digit float printing used in every payload
std::string fmt17(double v);

}  // namespace gibbs

#endif  // GIBBS_RUNNER_HPP
