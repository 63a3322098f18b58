#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/config.hpp"

namespace frontlab {

struct SweepCell {
  std::vector<double> params;  // one value per axis, in axis order
  Outcome outcome = Outcome::Undecided;
  Trigger trigger = Trigger::None;
  std::optional<double> r0f0;
  std::optional<double> tau;
  std::optional<double> speed_right;
  std::optional<double> speed_left;
  std::optional<double> h_star;
  std::string error;  // non-empty when the cell failed; outcome stays Undecided
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<SweepCell> cells;  // row-major, last axis fastest
};

/// Evaluates every grid cell on up to `workers` threads. Cell failures are
/// recorded in the cell and never abort the sweep; output order is fixed.
SweepResult run_sweep(const ExperimentConfig& config, int workers);

/// Midpoint between the last Vanishing and first Spreading cell along a
/// one-dimensional mu sweep; empty when there is no such crossing.
std::optional<double> mu_boundary(const SweepResult& result);

/// `<axes...>,classification,trigger,R0F0,tau,speed_right,speed_left,h_star,error`
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

}  // namespace frontlab
