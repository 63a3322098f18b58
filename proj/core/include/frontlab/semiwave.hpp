#pragma once

// Semi-wave problem on the half-line behind a front moving with speed k(t):
//
//   q_t - d q'' + (k(t) - alpha) q' = q (a(t) - b(t) q),   x > 0
//   q(0,t) = 0,  q(inf,t) = V(t),  mu q'(0,t) = k(t),
//
// with V the positive periodic orbit of v' = v (a - b v).

#include <functional>
#include <vector>

#include "frontlab/coeffs.hpp"

namespace frontlab {

struct SemiWaveCoefficients {
  std::function<double(double)> a;
  std::function<double(double)> b;
  double period = 1.0;
  bool constant = false;

  static SemiWaveCoefficients make_constant(double a, double b, double period = 1.0);
  /// a = beta_inf - gamma_inf, b = beta_inf / N*.
  static SemiWaveCoefficients from_field(const CoefficientField& field, double n_star);

  double mean_a() const;
  double mean_b() const;
};

struct SemiWaveSolution {
  double period = 1.0;
  std::vector<double> k_times;
  std::vector<double> k;
  double k_bar = 0.0;
  std::vector<double> xs;
  std::vector<double> q_times;
  std::vector<double> q;  // q[it * xs.size() + ix]
  double residual = 0.0;  // max_t |mu q_x(0,t) - k(t)|
  std::vector<double> history;  // fixed-point residuals, periodic route only
  int iterations = 0;

  double profile(std::size_t it, std::size_t ix) const { return q[it * xs.size() + ix]; }
};

struct SemiWaveOptions {
  double length = 0.0;  // 0 -> 20 sqrt(d / mean a)
  int grid_n = 2001;    // periodic route
  int steps_per_period = 256;
  int snapshots_per_period = 32;
  int profile_points = 401;  // autonomous route output
  double theta = 0.5;
  int max_iterations = 200;
  int max_inner_periods = 5000;
};

/// Default truncation length of the half-line.
double semiwave_length(double d, double mean_a);

/// Positive T-periodic orbit of v' = v (a(t) - b(t) v), sampled at `samples` equally
/// spaced times in [0, T] (closing sample included).
std::vector<double> logistic_orbit(const SemiWaveCoefficients& coeffs, int samples);

SemiWaveSolution semiwave_autonomous(double d, double alpha, double a, double b, double mu, double tol,
                                     const SemiWaveOptions& options = {});

SemiWaveSolution semiwave_periodic(double d, double alpha, const SemiWaveCoefficients& coeffs, double mu, double tol,
                                   const SemiWaveOptions& options = {});

/// Dispatches to the autonomous route for constant coefficients.
SemiWaveSolution semiwave(double d, double alpha, const SemiWaveCoefficients& coeffs, double mu, double tol,
                          const SemiWaveOptions& options = {});

struct SpeedOrdering {
  double k_minus = 0.0;  // k*(-alpha): left front
  double k_zero = 0.0;
  double k_plus = 0.0;   // k*(alpha): right front
};

/// Computes k*(-alpha), k*(0), k*(alpha) concurrently and checks
/// k_minus < k_zero < k_plus (up to 10 tol).
SpeedOrdering speed_ordering(double d, const SemiWaveCoefficients& coeffs, double mu, double alpha, double tol,
                             const SemiWaveOptions& options = {});

}  // namespace frontlab
