#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace frontlab {

/// Solution snapshot on the moving domain [g, h], stored on the fixed unit
/// grid y = (x - g)/(h - g) with I(0) = I(1) = 0.
struct FrontState {
  double t = 0.0;
  double g = 0.0;
  double h = 0.0;
  std::vector<double> I;

  int n() const { return static_cast<int>(I.size()); }
  double width() const { return h - g; }
  double x(int i) const { return g + (h - g) * i / (n() - 1); }
  /// Linear interpolation in x; zero outside [g, h].
  double value_at(double x) const;
  double sup() const;
  double mass() const;
};

/// Time series of a free-boundary run, sampled at fixed intervals.
struct SimulationTrace {
  double period = 1.0;
  std::vector<double> t;
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> sup_I;
  std::vector<double> mass;
  std::vector<std::optional<double>> r0f;
  std::vector<FrontState> profiles;  // filled only when requested
  FrontState final_state;

  std::size_t size() const { return t.size(); }
  double width(std::size_t i) const { return h[i] - g[i]; }
  double horizon() const { return t.empty() ? 0.0 : t.back(); }
};

}  // namespace frontlab
