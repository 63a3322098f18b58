#pragma once

// Fixed-domain 1-D parabolic engine: u_t = d u_xx - alpha u_x + reaction,
// homogeneous (or prescribed) Dirichlet ends. Diffusion and advection are
// implicit, reaction explicit, one tridiagonal solve per step.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "frontlab/coeffs.hpp"
#include "frontlab/tridiagonal.hpp"

namespace frontlab {

struct Grid1D {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n = 3;

  static Grid1D make(double x_lo, double x_hi, int n);
  double dx() const { return (x_hi - x_lo) / (n - 1); }
  double x(int i) const { return i == n - 1 ? x_hi : x_lo + i * dx(); }
  std::vector<double> nodes() const;
};

struct FieldOnGrid {
  Grid1D grid;
  std::vector<double> values;
  double time = 0.0;

  static FieldOnGrid zeros(const Grid1D& grid, double time = 0.0);
  static FieldOnGrid sample(const Grid1D& grid, const std::function<double(double)>& f, double time = 0.0);
  double sup_norm() const;
};

/// u_t - d u_xx + alpha u_x = c(x,t) u.
struct LinearProblemSpec {
  double d = 1.0;
  double alpha = 0.0;
  std::function<double(double, double)> potential;
};

/// Implicit operator I + dt*A for A u = -D u_xx + v u_x on the interior of an
/// n-node grid. Central differences for advection while the cell Peclet
/// number |v| dx / (2D) is at most one, first-order upwind beyond; either way
/// the matrix is an M-matrix.
Tridiagonal implicit_transport_matrix(int n, double dx, double diffusivity, std::span<const double> velocity,
                                      double dt);

/// Solves (I + dt*A) u_new = rhs. `u` holds the right-hand side on interior
/// nodes and the new Dirichlet values at u[0], u[n-1]; it is overwritten by
/// the solution. `velocity` has one entry per node, or a single entry.
void implicit_transport_solve(std::span<double> u, double dx, double diffusivity,
                              std::span<const double> velocity, double dt);

/// Principal (smallest) eigenvalue of the constant-coefficient interior
/// operator A; exact for the tridiagonal Toeplitz matrix.
double transport_principal_eigenvalue(int n, double dx, double diffusivity, double velocity);

/// dt <= min(0.25/|beta-gamma|_inf, 1/|beta+gamma|_inf, dx/max(|alpha|, 1e-8)).
double max_stable_dt(const CoefficientField& field, double dx, double alpha);

FieldOnGrid step_linear(const FieldOnGrid& u, const LinearProblemSpec& spec, double dt);

/// Relative slack allowed on 0 <= u <= N* after a logistic step.
inline constexpr double kBoundSlack = 1e-6;

FieldOnGrid step_logistic(const FieldOnGrid& u, const CoefficientField& field, double d, double alpha,
                          double n_star, double dt);

/// Period map U(t0+T, t0) composed from step_linear.
FieldOnGrid monodromy_apply(const FieldOnGrid& u0, const LinearProblemSpec& spec, double period,
                            int steps_per_period);

/// Potential samples c(x_i, t_j) on one period, stored as a*primary + b*secondary + shift
/// so that families of potentials (beta/mu - gamma, beta - gamma + lambda) share tables.
struct PotentialTables {
  Grid1D grid;
  double period = 1.0;
  int steps = 0;
  std::vector<double> primary;    // steps * n
  std::vector<double> secondary;  // steps * n, may be empty

  static std::shared_ptr<const PotentialTables> from_field(const CoefficientField& field, const Grid1D& grid,
                                                           int steps_per_period);
  static std::shared_ptr<const PotentialTables> from_function(const std::function<double(double, double)>& c,
                                                              const Grid1D& grid, double period,
                                                              int steps_per_period);
};

/// Linear period map with potential primary_scale*P + secondary_scale*S + shift,
/// evaluated at the start of each step. Each step is multiplied by exp(-log_scale_per_step)
/// so repeated application neither underflows nor overflows; the true multiplier is
/// exp(steps*log_scale_per_step) times that of the scaled map.
class LinearPeriodMap {
 public:
  LinearPeriodMap(std::shared_ptr<const PotentialTables> tables, double d, double alpha,
                  double primary_scale, double secondary_scale, double shift, bool rescale = true);

  /// out = scaled period map applied to in (both full-grid vectors, ends zero).
  void apply(std::span<const double> in, std::span<double> out) const;

  double log_scale_per_period() const { return log_scale_ * tables_->steps; }
  const Grid1D& grid() const { return tables_->grid; }
  int size() const { return tables_->grid.n; }

 private:
  std::shared_ptr<const PotentialTables> tables_;
  double primary_scale_, secondary_scale_, shift_;
  double dt_;
  double log_scale_ = 0.0;
  TridiagonalFactor factor_;
};

struct PeriodicOrbitOptions {
  int grid_n = 1601;
  int steps_per_period = 512;
  int snapshots_per_period = 16;
  int max_periods = 2000;
};

struct PeriodicOrbit {
  std::vector<FieldOnGrid> snapshots;  // one period, t = 0, T/s, ..., T
  double residual = 0.0;
  int periods = 0;

  /// Linear interpolation of the snapshot at phase t (mod T) and position x.
  double value(double x, double t) const;
};

/// Positive T-periodic solution of the logistic problem on [-L, L] with
/// Dirichlet ends, reached by iterating periods from u = N*/2.
PeriodicOrbit periodic_entire_solution(const CoefficientField& field, double d, double alpha, double n_star,
                                       double l_trunc, double tol, const PeriodicOrbitOptions& options = {});

}  // namespace frontlab
