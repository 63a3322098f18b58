#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/config.hpp"

namespace frontlab {

const char* version();

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides the config
  int workers = 1;
};

struct RunReport {
  Task task = Task::R0;
  std::map<std::string, double> values;
  std::map<std::string, double> residuals;
  std::map<std::string, std::string> labels;
  std::vector<std::string> warnings;
  std::vector<std::string> files;  // relative to the output directory
  double wall_time_s = 0.0;
};

/// Runs the configured task and writes its CSVs, `summary.json` and
/// `manifest.json` into the output directory.
RunReport run(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace frontlab
