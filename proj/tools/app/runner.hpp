#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "app/config.hpp"

namespace rpsde::app {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailed = 2;

struct RunSettings {
  unsigned workers = 1;
  /// Also write a plot script next to every plottable CSV.
  bool plots = false;
};

struct RunResult {
  int status = kExitPass;
  /// File names written into the output directory, in order.
  std::vector<std::string> outputs;
};

/// Validates the config for `command`, runs it and writes the CSVs, the
/// canonical `config.ini` and `manifest.txt` into `out_dir` (created if
/// missing). A pullback that does not converge counts as a failed check;
/// other toolkit errors propagate to the caller.
RunResult run_command(const std::string& command, const ExperimentConfig& config,
                      const std::filesystem::path& out_dir, const RunSettings& settings,
                      std::ostream& log);

/// Toolkit version string.
std::string version();

}  // namespace rpsde::app
