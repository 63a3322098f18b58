#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerical kernels.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// beta / (d (pi/L)^2 + alpha^2/(4d) + gamma)
inline double r0_homogeneous(double d, double alpha, double beta, double gamma, double length) {
  return beta / (d * (kPi / length) * (kPi / length) + alpha * alpha / (4.0 * d) + gamma);
}

/// Critical length solving r0_homogeneous(...) = 1.
inline double critical_length(double d, double alpha, double beta, double gamma) {
  return kPi * std::sqrt(d / (beta - gamma - alpha * alpha / (4.0 * d)));
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2048) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Solution of v' = v (a - b v), v(0) = v0.
inline double logistic(double a, double b, double v0, double t) {
  return (a / b) / (1.0 + (a / (b * v0) - 1.0) * std::exp(-a * t));
}

/// Positive periodic orbit of v' = v (a(t) - b(t) v) through w = 1/v, which
/// solves the linear equation w' = -a w + b.
inline double periodic_logistic(const std::function<double(double)>& a, const std::function<double(double)>& b,
                                double period, double t) {
  auto A = [&](double s) { return simpson(a, 0.0, s, 512); };
  auto g = [&](double s) { return b(s) * std::exp(A(s)); };
  const double w0 = simpson(g, 0.0, period, 256) / (std::exp(A(period)) - 1.0);
  const double wt = std::exp(-A(t)) * (w0 + (t > 0.0 ? simpson(g, 0.0, t, 256) : 0.0));
  return 1.0 / wt;
}

/// Dirichlet heat mode sin(pi (x-lo)/L) decays like exp(-d (pi/L)^2 t).
inline double heat_decay(double d, double length, double t) {
  return std::exp(-d * (kPi / length) * (kPi / length) * t);
}

/// Dense finite-difference reproduction number for time-independent rates:
/// after phi = e^{alpha x/(2d)} psi the problem is symmetric,
///   -d psi'' + (alpha^2/(4d) + gamma) psi = (1/R0) beta psi.
/// Solved as a dense generalized eigenproblem.
inline double r0_dense(const std::function<double(double)>& beta, const std::function<double(double)>& gamma,
                       double d, double alpha, double lo, double hi, int n) {
  const int m = n - 2;
  const double dx = (hi - lo) / (n - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double x = lo + (i + 1) * dx;
    A(i, i) = 2.0 * d / (dx * dx) + alpha * alpha / (4.0 * d) + gamma(x);
    if (i > 0) A(i, i - 1) = -d / (dx * dx);
    if (i + 1 < m) A(i, i + 1) = -d / (dx * dx);
    B(i, i) = beta(x);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  return 1.0 / es.eigenvalues().minCoeff();
}

/// Dense principal eigenvalue of -d u'' + alpha u' - (beta - gamma) u (Dirichlet).
inline double lambda0_dense(const std::function<double(double)>& net, double d, double alpha, double lo, double hi,
                            int n) {
  const int m = n - 2;
  const double dx = (hi - lo) / (n - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double x = lo + (i + 1) * dx;
    A(i, i) = 2.0 * d / (dx * dx) + alpha * alpha / (4.0 * d) - net(x);
    if (i > 0) A(i, i - 1) = -d / (dx * dx);
    if (i + 1 < m) A(i, i + 1) = -d / (dx * dx);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.eigenvalues().minCoeff();
}

/// Largest-modulus eigenvalue of a dense matrix.
inline double dominant_dense(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  double best = 0.0, value = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev) > best) {
      best = std::abs(ev);
      value = ev.real();
    }
  }
  return value;
}

/// Initial slope of the semi-wave d q'' + q (a - b q) = 0 (zero drift),
/// from the first integral d p^2/2 + F(q) = F(a/b).
inline double semiwave_slope_zero_drift(double d, double a, double b) {
  return std::sqrt(a * a * a / (3.0 * b * b * d));
}

}  // namespace oracle
