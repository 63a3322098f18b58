#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "frontlab/error.hpp"

namespace frontlab {

/// Tridiagonal matrix of order m. lower[0] and upper[m-1] are unused.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t m = 0) : lower(m, 0.0), diag(m, 0.0), upper(m, 0.0) {}
  std::size_t size() const { return diag.size(); }
};

/// Thomas-algorithm factorization, reusable across right-hand sides.
class TridiagonalFactor {
 public:
  TridiagonalFactor() = default;
  explicit TridiagonalFactor(const Tridiagonal& a) { factor(a); }

  void factor(const Tridiagonal& a) {
    const std::size_t m = a.size();
    lower_ = a.lower;
    upper_ = a.upper;
    inv_pivot_.assign(m, 0.0);
    modified_upper_.assign(m, 0.0);
    double pivot = a.diag.empty() ? 0.0 : a.diag[0];
    for (std::size_t i = 0; i < m; ++i) {
      if (i > 0) pivot = a.diag[i] - lower_[i] * modified_upper_[i - 1];
      if (pivot == 0.0 || !std::isfinite(pivot)) {
        throw NumericalError("tridiagonal solve hit a zero pivot at row " + std::to_string(i) +
                             "; the dt/dx combination is invalid");
      }
      inv_pivot_[i] = 1.0 / pivot;
      modified_upper_[i] = upper_[i] * inv_pivot_[i];
    }
  }

  /// Solves in place.
  void solve(std::span<double> rhs) const {
    const std::size_t m = inv_pivot_.size();
    if (m == 0) return;
    rhs[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < m; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= modified_upper_[i] * rhs[i + 1];
  }

  std::size_t size() const { return inv_pivot_.size(); }

 private:
  std::vector<double> lower_, upper_, inv_pivot_, modified_upper_;
};

inline void solve_tridiagonal(const Tridiagonal& a, std::span<double> rhs) { TridiagonalFactor(a).solve(rhs); }

}  // namespace frontlab
