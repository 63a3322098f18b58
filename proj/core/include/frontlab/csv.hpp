#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/pde.hpp"
#include "frontlab/semiwave.hpp"
#include "frontlab/trace.hpp"

namespace frontlab {

/// Shortest round-trip decimal; empty for NaN or missing values.
std::string format_number(double value);
std::string format_number(const std::optional<double>& value);

/// `t,g,h,width,sup_I,mass,R0F`
void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace);
/// `t,x,I` for every stored profile.
void write_profiles_csv(const std::filesystem::path& path, const SimulationTrace& trace);
/// `x,phi`
void write_eigenfunction_csv(const std::filesystem::path& path, const FieldOnGrid& phi);
/// `x,t,q`
void write_semiwave_profile_csv(const std::filesystem::path& path, const SemiWaveSolution& sol);
/// `t,k`
void write_semiwave_speed_csv(const std::filesystem::path& path, const SemiWaveSolution& sol);

}  // namespace frontlab
