#pragma once

// Basic reproduction numbers on fixed intervals and along moving fronts.
//
// Three routes are provided and cross-check one another:
//   * closed form for spatially homogeneous coefficients,
//   * Floquet: mu0 such that the period map of
//       phi_t - d phi_xx + alpha phi_x = (-gamma + beta/mu0) phi
//     has dominant multiplier 1,
//   * variational: supremum of the Rayleigh quotient for time-independent
//     coefficients.

#include <limits>
#include <span>
#include <vector>

#include "frontlab/coeffs.hpp"
#include "frontlab/pde.hpp"
#include "frontlab/trace.hpp"

namespace frontlab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

enum class R0Method { ClosedForm, Floquet, Variational };
const char* to_string(R0Method method);

struct EigenOptions {
  int grid_n = 401;
  int steps_per_period = 512;
  double tol = 1e-4;
  int krylov_dim = 20;
  int max_restarts = 400;
  int max_outer = 200;
  bool compute_lambda0 = true;
};

struct R0Result {
  double value = 0.0;
  double lambda0 = std::numeric_limits<double>::quiet_NaN();
  FieldOnGrid eigenfunction;
  R0Method method = R0Method::Floquet;
  double residual = 0.0;
  int iterations = 0;
};

/// beta_bar / (d (pi/L)^2 + alpha^2/(4d) + gamma_bar).
double r0_closed_form(double d, double alpha, double beta_bar, double gamma_bar, double length);

struct SandwichBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Closed-form values for the pointwise-in-time extremes of beta and gamma over the interval.
SandwichBounds sandwich_bounds(const CoefficientField& field, double d, double alpha, const Interval& interval,
                               int grid_n = 401);

R0Result r0_floquet(const CoefficientField& field, double d, double alpha, const Interval& interval,
                    const EigenOptions& options = {});

R0Result r0_variational(const CoefficientField& field, double d, double alpha, const Interval& interval,
                        int grid_n = 401);

struct Lambda0Result {
  double value = 0.0;
  double residual = 0.0;
  FieldOnGrid eigenfunction;
  int iterations = 0;
};

/// Principal eigenvalue of psi_t - d psi_xx + alpha psi_x = (beta - gamma + lambda0) psi.
Lambda0Result lambda0_detailed(const CoefficientField& field, double d, double alpha, const Interval& interval,
                               const EigenOptions& options = {});
double lambda0(const CoefficientField& field, double d, double alpha, const Interval& interval,
               const EigenOptions& options = {});

/// Same eigenvalue for time-independent coefficients from the symmetrized
/// elliptic operator -d psi'' + (alpha^2/(4d) + gamma - beta) psi.
double lambda0_elliptic(const CoefficientField& field, double d, double alpha, const Interval& interval,
                        int grid_n = 401);

inline constexpr double kHStarMax = 1e4;

/// Length h* with R0 on [anchor, anchor + h*] equal to one.
double find_h_star(const CoefficientField& field, double d, double alpha, double anchor, double tol,
                   const EigenOptions& options = {});

/// Far-field critical length pi*sqrt(d / (mean(beta_inf - gamma_inf) - alpha^2/(4d))).
double far_field_h_star(const CoefficientField& field, double d, double alpha);

struct FrontR0Series {
  std::vector<double> taus;
  std::vector<double> values;
  std::vector<Interval> intervals;
};

inline constexpr double kFrontMonotoneSlack = 1e-6;

FrontR0Series r0_front(const SimulationTrace& trace, const CoefficientField& field, double d, double alpha,
                       std::span<const double> taus, const EigenOptions& options = {});

}  // namespace frontlab
