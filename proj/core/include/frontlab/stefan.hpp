#pragma once

// Free-boundary SIS infection model with Stefan-type fronts:
//
//   I_t - d I_xx + alpha I_x = (beta - gamma) I - (beta/N*) I^2,  g(t) < x < h(t)
//   I(g) = I(h) = 0,  g' = -mu I_x(g),  h' = -mu I_x(h).
//
// Integrated on the fixed unit interval y = (x - g)/(h - g).

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/coeffs.hpp"
#include "frontlab/r0.hpp"
#include "frontlab/trace.hpp"

namespace frontlab {

struct ModelParams {
  double d_I = 1.0;
  double alpha = 0.0;
  double mu = 1.0;
  double n_star = 1.0;
  double h0 = 1.0;
  std::optional<double> g0;  // defaults to -h0; other values are an extension
  int grid_n = 401;
  double dt = 1e-2;

  double left0() const { return g0 ? *g0 : -h0; }
  void validate() const;
};

enum class InitialShape { Parabolic, Cosine, Tabulated };

const char* to_string(InitialShape shape);
InitialShape parse_initial_shape(const std::string& name);

struct InitialDatum {
  InitialShape shape = InitialShape::Cosine;
  double amplitude = 0.5;
  // Tabulated profile (x ascending, spanning [g0, h0], zero at both ends).
  std::vector<double> table_x;
  std::vector<double> table_values;

  double eval(double x, double g0, double h0) const;
  void validate(double n_star, double g0, double h0) const;
};

/// Loads a CSV with header `x,I`.
InitialDatum load_initial_csv(const std::string& path);

struct SimulateOptions {
  double sample_interval = 0.0;  // 0 -> T/8
  bool keep_profiles = false;
};

SimulationTrace simulate(const ModelParams& params, const CoefficientField& field, const InitialDatum& initial,
                         double horizon, const SimulateOptions& options = {});

enum class Outcome { Spreading, Vanishing, Undecided };
const char* to_string(Outcome outcome);

enum class Trigger { InitialR0, LaterR0, WidthExceeded, Decayed, None };
const char* to_string(Trigger trigger);

struct ClassifyCriteria {
  double eps_vanish = 1e-5;                 // relative to N*
  std::optional<double> width_spread;       // default 20 * far-field h*
  double horizon = 0.0;                     // 0 -> 100 T; used by find_mu_star
  double plateau_growth = 1e-4;             // relative width growth over the last 20%
  double r0_slack = 1e-3;
  EigenOptions eigen{};
};

struct Classification {
  Outcome outcome = Outcome::Undecided;
  Trigger trigger = Trigger::None;
  double tau = 0.0;
  double r0_initial = 0.0;
  double r0_final = std::numeric_limits<double>::quiet_NaN();
  std::string reason;
};

Classification classify(const SimulationTrace& trace, const CoefficientField& field, const ModelParams& params,
                        const ClassifyCriteria& criteria = {}, std::optional<double> r0_initial = std::nullopt);

struct MuStarOptions {
  double tol = 1e-2;
  int max_horizon_doublings = 4;
  ClassifyCriteria criteria{};
  SimulateOptions simulate{};
};

struct MuStarResult {
  double mu_star = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool spreading_for_all = false;  // R0 on the initial interval is already >= 1
  double r0_initial = 0.0;
  int probes = 0;
};

MuStarResult find_mu_star(const ModelParams& params, const CoefficientField& field, const InitialDatum& initial,
                          double mu_lo, double mu_hi, const MuStarOptions& options = {});

struct FrontSpeeds {
  double speed_right = 0.0;
  double speed_left = 0.0;
  double residual_right = 0.0;
  double residual_left = 0.0;
  double fit_residual = 0.0;
};

inline constexpr double kLinearRegimeTolerance = 0.05;

/// Least-squares slopes of h(t) and -g(t) over the last half of the trace.
/// The residual is the largest deviation of a one-period mean speed from the slope.
FrontSpeeds front_speed_estimate(const SimulationTrace& trace);

}  // namespace frontlab
