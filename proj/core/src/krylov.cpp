#include "frontlab/krylov.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "frontlab/error.hpp"

namespace frontlab {

namespace {

// restarts over which the residual must at least halve
constexpr std::size_t kStagnationWindow = 25;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void normalize(std::vector<double>& v) {
  const double nrm = std::sqrt(dot(v, v));
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("Krylov iteration lost its start vector");
  for (double& x : v) x /= nrm;
}

}  // namespace

DominantEigenpair dominant_eigenpair(const LinearOperator& apply, std::vector<double> start, double tol,
                                     int krylov_dim, int max_restarts) {
  const std::size_t n = start.size();
  krylov_dim = std::max(1, std::min<int>(krylov_dim, static_cast<int>(n)));
  normalize(start);

  DominantEigenpair out;
  std::vector<double> v = std::move(start);
  std::vector<double> history;
  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<std::vector<double>> basis{v};
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(krylov_dim + 1, krylov_dim);
    int m = 0;
    std::vector<double> w(n);
    for (int j = 0; j < krylov_dim; ++j) {
      apply(basis[static_cast<std::size_t>(j)], w);
      ++out.matvecs;
      const double wnorm = std::sqrt(dot(w, w));
      // two passes of modified Gram-Schmidt
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const auto& q = basis[static_cast<std::size_t>(i)];
          const double c = dot(q, w);
          h(i, j) += c;
          for (std::size_t k = 0; k < n; ++k) w[k] -= c * q[k];
        }
      }
      h(j + 1, j) = std::sqrt(dot(w, w));
      m = j + 1;
      if (!(h(j + 1, j) > 1e-14 * wnorm)) break;  // invariant subspace found
      std::vector<double> q = w;
      for (double& x : q) x /= h(j + 1, j);
      basis.push_back(std::move(q));
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(m, m));
    if (es.info() != Eigen::Success) throw NumericalError("Hessenberg eigensolve failed");
    const auto& vals = es.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < vals.size(); ++i) {
      if (std::abs(vals(i)) > std::abs(vals(best))) best = i;
    }
    const double theta = vals(best).real();
    Eigen::VectorXd s = es.eigenvectors().col(best).real();
    s.normalize();

    std::vector<double> y(n, 0.0);
    for (int i = 0; i < m; ++i) {
      const auto& q = basis[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < n; ++k) y[k] += s(i) * q[k];
    }
    if (std::accumulate(y.begin(), y.end(), 0.0) < 0.0) {
      for (double& x : y) x = -x;
    }
    normalize(y);

    out.value = theta;
    out.residual = std::abs(h(m, m - 1) * s(m - 1)) / std::max(std::abs(theta), 1e-300);
    out.restarts = restart + 1;
    out.vector = y;
    if (out.residual < tol) {
      out.converged = true;
      return out;
    }
    history.push_back(out.residual);
    if (history.size() > kStagnationWindow &&
        out.residual > 0.5 * history[history.size() - 1 - kStagnationWindow]) {
      out.stagnated = true;
      return out;
    }
    v = std::move(y);
  }
  return out;
}

}  // namespace frontlab
