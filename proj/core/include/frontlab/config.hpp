#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/coeffs.hpp"
#include "frontlab/r0.hpp"
#include "frontlab/semiwave.hpp"
#include "frontlab/stefan.hpp"

namespace frontlab {

enum class Task { R0, Simulate, HStar, MuStar, SemiWave, Sweep };
const char* to_string(Task task);
Task parse_task(const std::string& name);

struct FieldSpec {
  FieldFamily family = FieldFamily::Constant;
  double period = 1.0;
  RateParams beta{2.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  RateParams gamma{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  std::filesystem::path table;  // Tabulated only
  TableExtension extension = TableExtension::Constant;

  CoefficientField build() const;
};

struct R0Settings {
  std::optional<Interval> interval;  // default [g0, h0]
  std::vector<R0Method> methods{R0Method::Floquet};
};

struct SimulateSettings {
  double horizon = 0.0;  // 0 -> 100 T
  SimulateOptions options{};
  bool classify = true;
  bool r0_series = true;
  int r0_samples = 16;  // evenly spaced trace rows that get an R0F value
  bool speeds = true;
};

struct HStarSettings {
  double anchor = 0.0;
  double tol = 1e-4;
};

struct MuStarSettings {
  double mu_lo = 0.01;
  double mu_hi = 10.0;
  double tol = 1e-2;
  int max_horizon_doublings = 4;
};

struct SemiWaveSettings {
  double tol = 1e-6;
  bool ordering = true;
  SemiWaveOptions options{};
};

struct SweepAxis {
  std::string name;  // mu | alpha | h0 | amplitude
  std::vector<double> values;
};

struct SweepSettings {
  std::vector<SweepAxis> axes;
  double horizon = 0.0;  // 0 -> classify.horizon or 100 T
  bool speeds = true;
  bool h_star = false;
};

inline constexpr std::size_t kMaxSweepCells = 10000;

struct ExperimentConfig {
  Task task = Task::R0;
  ModelParams model{};
  FieldSpec field{};
  InitialDatum initial{};
  EigenOptions eigen{};
  ClassifyCriteria classify{};
  R0Settings r0{};
  SimulateSettings simulate{};
  HStarSettings hstar{};
  MuStarSettings mustar{};
  SemiWaveSettings semiwave{};
  SweepSettings sweep{};
  std::filesystem::path output_dir = "out";
  unsigned long long seed = 0;
  std::string source;  // raw config text, echoed into the manifest

  void validate() const;
};

/// Parses and validates. Relative table paths resolve against `base_dir`.
/// Unknown keys and wrong types raise ValidationError naming the key path.
/// With `expected` set, `task` may be omitted and must match when present.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {},
                              std::optional<Task> expected = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Task> expected = std::nullopt);

}  // namespace frontlab
