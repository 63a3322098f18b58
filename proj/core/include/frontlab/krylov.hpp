#pragma once

#include <functional>
#include <span>
#include <vector>

namespace frontlab {

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct DominantEigenpair {
  double value = 0.0;
  std::vector<double> vector;  // unit 2-norm, oriented to positive sum
  double residual = 0.0;       // ||A y - value*y|| / |value|
  int matvecs = 0;
  int restarts = 0;
  bool converged = false;
  bool stagnated = false;  // residual stopped shrinking before max_restarts
};

/// Dominant eigenpair of a (positive) operator by restarted Arnoldi. Each cycle
/// runs `krylov_dim` matrix-vector products and restarts from the dominant Ritz
/// vector; iteration stops once the relative Ritz residual drops below `tol`,
/// or early when the residual no longer halves over a window of restarts.
DominantEigenpair dominant_eigenpair(const LinearOperator& apply, std::vector<double> start, double tol,
                                     int krylov_dim = 20, int max_restarts = 200);

}  // namespace frontlab
