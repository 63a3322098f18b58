#include "frontlab/r0.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "frontlab/error.hpp"
#include "frontlab/krylov.hpp"

namespace frontlab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_problem(double d, const Interval& interval) {
  if (!(d > 0.0)) throw ValidationError("d_I must be positive");
  if (!(interval.hi > interval.lo)) throw ValidationError("interval must be nonempty");
}

std::vector<double> sine_profile(int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::sin(kPi * i / (n - 1));
  return v;
}

FieldOnGrid sup_normalized(const Grid1D& grid, std::vector<double> v, double time) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m > 0.0) {
    for (double& x : v) x /= m;
  }
  v.front() = 0.0;
  v.back() = 0.0;
  return {grid, std::move(v), time};
}

struct MultiplierEval {
  double log_rho = 0.0;
  std::vector<double> vec;
  double ritz = 0.0;
};

// Period map of  phi_t - d phi_xx + alpha phi_x = (a*beta + b*gamma + c) phi
// on one interval, with the coefficient tables sampled once.
class FloquetProblem {
 public:
  FloquetProblem(const CoefficientField& field, double d, double alpha, const Interval& interval,
                 const EigenOptions& options, double inner_tol)
      : d_(d), alpha_(alpha), options_(options), inner_tol_(inner_tol), period_(field.period()) {
    if (options.grid_n < 5) throw ValidationError("eigen grid needs at least 5 nodes");
    grid_ = Grid1D::make(interval.lo, interval.hi, options.grid_n);
    tables_ = PotentialTables::from_field(field, grid_, options.steps_per_period);
    warm_ = sine_profile(options.grid_n);
  }

  MultiplierEval eval(double beta_scale, double gamma_scale, double shift) {
    LinearPeriodMap map(tables_, d_, alpha_, beta_scale, gamma_scale, shift);
    auto apply = [&map](std::span<const double> in, std::span<double> out) { map.apply(in, out); };
    auto ep = dominant_eigenpair(apply, warm_, inner_tol_, options_.krylov_dim, options_.max_restarts);
    // long intervals have a small spectral gap; widen the Krylov space before giving up
    const int dim_cap = std::min(8 * options_.krylov_dim, options_.grid_n - 2);
    for (int dim = 2 * options_.krylov_dim; !ep.converged && dim <= dim_cap; dim *= 2) {
      const int spent = ep.matvecs;
      ep = dominant_eigenpair(apply, ep.vector, inner_tol_, dim, options_.max_restarts);
      ep.matvecs += spent;
    }
    ++evaluations_;
    if (!ep.converged) {
      std::ostringstream msg;
      msg << "power iteration stagnated on [" << grid_.x_lo << ", " << grid_.x_hi << "]: Ritz residual "
          << ep.residual << " after " << ep.matvecs << " period maps";
      throw NumericalError(msg.str());
    }
    if (!(ep.value > 0.0)) throw NumericalError("dominant Floquet multiplier is not positive");
    warm_ = ep.vector;
    return {std::log(ep.value) + map.log_scale_per_period(), std::move(ep.vector), ep.residual};
  }

  const Grid1D& grid() const { return grid_; }
  double period() const { return period_; }
  int evaluations() const { return evaluations_; }
  double dt() const { return period_ / options_.steps_per_period; }

 private:
  double d_, alpha_;
  EigenOptions options_;
  double inner_tol_;
  double period_;
  Grid1D grid_;
  std::shared_ptr<const PotentialTables> tables_;
  std::vector<double> warm_;
  int evaluations_ = 0;
};

double inner_tolerance(double tol) { return std::clamp(tol * 1e-2, 1e-12, 1e-6); }

Lambda0Result solve_lambda0(FloquetProblem& prob, const CoefficientField& field, double tol, int max_outer) {
  const double T = prob.period();
  // keep 1 + dt*(beta - gamma + lambda) positive
  const double floor = -1.0 / prob.dt() - (field.bounds(Rate::Beta).lo - field.bounds(Rate::Gamma).hi) + 1e-9;

  double l0 = 0.0;
  MultiplierEval e0 = prob.eval(1.0, -1.0, l0);
  double l1 = std::max(-e0.log_rho / T, floor);
  MultiplierEval e1 = prob.eval(1.0, -1.0, l1);
  int it = 2;
  while (it < max_outer) {
    const double slope = (e1.log_rho - e0.log_rho) / (l1 - l0);
    const double err = std::abs(e1.log_rho) / std::max(std::abs(slope), 1e-300);
    if (err < 0.1 * tol * std::max(1.0, std::abs(l1)) || e1.log_rho == 0.0) break;
    double l2 = l1 - e1.log_rho / slope;
    if (!std::isfinite(l2)) l2 = l1 - e1.log_rho / T;
    l2 = std::max(l2, floor);
    l0 = l1;
    e0 = std::move(e1);
    l1 = l2;
    e1 = prob.eval(1.0, -1.0, l1);
    ++it;
  }
  if (it >= max_outer) throw NumericalError("lambda0 secant iteration did not converge");
  Lambda0Result out;
  out.value = l1;
  out.residual = std::max(std::abs(std::expm1(e1.log_rho)), e1.ritz);
  out.eigenfunction = sup_normalized(prob.grid(), e1.vec, 0.0);
  out.iterations = it;
  return out;
}

// Number of eigenvalues below x of the symmetric tridiagonal (diag, off).
int sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    q = diag[i] - x - (i == 0 ? 0.0 : b2 / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

struct SymmetricEigen {
  double value;
  std::vector<double> vector;
  double residual;
};

// Smallest eigenpair of a symmetric tridiagonal matrix: Sturm bisection for the
// eigenvalue, shifted inverse iteration for the vector, Rayleigh quotient last.
SymmetricEigen smallest_symmetric_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off) {
  const std::size_t m = diag.size();
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < m ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, mid) >= 1) hi = mid; else lo = mid;
  }
  const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
  const double shift = lo - 1e-10 * scale;

  auto multiply = [&](const std::vector<double>& v) {
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = diag[i] * v[i];
      if (i > 0) w[i] += off[i - 1] * v[i - 1];
      if (i + 1 < m) w[i] += off[i] * v[i + 1];
    }
    return w;
  };
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  Tridiagonal shifted(m);
  for (std::size_t i = 0; i < m; ++i) {
    shifted.diag[i] = diag[i] - shift;
    if (i > 0) shifted.lower[i] = off[i - 1];
    if (i + 1 < m) shifted.upper[i] = off[i];
  }
  TridiagonalFactor factor(shifted);
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = std::sin(kPi * (i + 1) / (m + 1));
  double rq = 0.0;
  for (int it = 0; it < 50; ++it) {
    factor.solve(v);
    const double nv = norm(v);
    for (double& x : v) x /= nv;
    const auto w = multiply(v);
    double next = 0.0;
    for (std::size_t i = 0; i < m; ++i) next += v[i] * w[i];
    const bool done = it > 0 && std::abs(next - rq) <= 1e-15 * scale;
    rq = next;
    if (done) break;
  }
  const auto w = multiply(v);
  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) res += (w[i] - rq * v[i]) * (w[i] - rq * v[i]);
  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum < 0.0) {
    for (double& x : v) x = -x;
  }
  return {rq, std::move(v), std::sqrt(res) / scale};
}

void require_time_independent(const CoefficientField& field) {
  if (!field.time_independent()) {
    throw ValidationError("variational route requires time-independent coefficients");
  }
}

}  // namespace

const char* to_string(R0Method method) {
  switch (method) {
    case R0Method::ClosedForm: return "closed_form";
    case R0Method::Floquet: return "floquet";
    case R0Method::Variational: return "variational";
  }
  return "unknown";
}

double r0_closed_form(double d, double alpha, double beta_bar, double gamma_bar, double length) {
  if (!(d > 0.0)) throw ValidationError("d_I must be positive");
  if (!(length > 0.0)) throw ValidationError("interval length must be positive");
  if (!(beta_bar > 0.0) || !(gamma_bar > 0.0)) throw ValidationError("mean rates must be positive");
  const double k = kPi / length;
  return beta_bar / (d * k * k + alpha * alpha / (4.0 * d) + gamma_bar);
}

SandwichBounds sandwich_bounds(const CoefficientField& field, double d, double alpha, const Interval& interval,
                               int grid_n) {
  require_problem(d, interval);
  const Grid1D grid = Grid1D::make(interval.lo, interval.hi, std::max(grid_n, 3));
  const auto xs = grid.nodes();
  auto extreme_mean = [&](Rate which, bool want_max) {
    return periodic_average(
        [&](double t) {
          double best = field.eval(which, xs[0], t);
          for (double x : xs) {
            const double v = field.eval(which, x, t);
            best = want_max ? std::max(best, v) : std::min(best, v);
          }
          return best;
        },
        field.period());
  };
  const double beta_m = extreme_mean(Rate::Beta, false);
  const double beta_M = extreme_mean(Rate::Beta, true);
  const double gamma_m = extreme_mean(Rate::Gamma, false);
  const double gamma_M = extreme_mean(Rate::Gamma, true);
  return {r0_closed_form(d, alpha, beta_m, gamma_M, interval.length()),
          r0_closed_form(d, alpha, beta_M, gamma_m, interval.length())};
}

R0Result r0_floquet(const CoefficientField& field, double d, double alpha, const Interval& interval,
                    const EigenOptions& options) {
  require_problem(d, interval);
  if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");
  FloquetProblem prob(field, d, alpha, interval, options, inner_tolerance(options.tol));

  // Multiplier rho(s) of the potential s*beta - gamma grows with s = 1/mu0.
  const SandwichBounds sb = sandwich_bounds(field, d, alpha, interval, options.grid_n);
  double a = 1.0 / sb.upper;
  double b = 1.0 / sb.lower;
  MultiplierEval ea = prob.eval(a, -1.0, 0.0);
  for (int k = 0; k < 30 && ea.log_rho > 0.0; ++k) {
    a *= 0.5;
    ea = prob.eval(a, -1.0, 0.0);
  }
  MultiplierEval eb = prob.eval(b, -1.0, 0.0);
  for (int k = 0; k < 30 && eb.log_rho < 0.0; ++k) {
    b *= 2.0;
    eb = prob.eval(b, -1.0, 0.0);
  }
  if (ea.log_rho > 0.0 || eb.log_rho < 0.0) {
    std::ostringstream msg;
    msg << "R0 bracket does not straddle 1: multipliers " << std::exp(ea.log_rho) << " at mu=" << 1.0 / a << " and "
        << std::exp(eb.log_rho) << " at mu=" << 1.0 / b;
    throw NumericalError(msg.str());
  }

  // Bracketed secant (Illinois) on log rho(s).
  double fa = ea.log_rho, fb = eb.log_rho;
  double fa_true = fa, fb_true = fb;
  int side = 0;
  double s = 0.5 * (a + b);
  MultiplierEval es = fa == 0.0 ? ea : eb;
  if (fa == 0.0) s = a;
  else if (fb == 0.0) s = b;
  else {
    int it = 0;
    for (; it < options.max_outer; ++it) {
      s = b - fb * (b - a) / (fb - fa);
      if (!(s > a && s < b)) s = 0.5 * (a + b);
      es = prob.eval(s, -1.0, 0.0);
      const double fs = es.log_rho;
      const double slope = (fb_true - fa_true) / (b - a);
      const double est = std::abs(fs) / (std::max(slope, 1e-300) * s);
      if (fs > 0.0) {
        b = s; fb = fb_true = fs;
        if (side == 1) fa *= 0.5;
        side = 1;
      } else {
        a = s; fa = fa_true = fs;
        if (side == -1) fb *= 0.5;
        side = -1;
      }
      if (fs == 0.0 || est < 0.1 * options.tol || (b - a) < 0.1 * options.tol * s) break;
    }
    if (it == options.max_outer) throw NumericalError("R0 root search did not converge");
  }

  R0Result out;
  out.method = R0Method::Floquet;
  out.value = 1.0 / s;
  out.eigenfunction = sup_normalized(prob.grid(), es.vec, 0.0);
  out.residual = std::max(std::abs(std::expm1(es.log_rho)), es.ritz);
  if (options.compute_lambda0) {
    out.lambda0 = solve_lambda0(prob, field, options.tol, options.max_outer).value;
  }
  out.iterations = prob.evaluations();
  return out;
}

Lambda0Result lambda0_detailed(const CoefficientField& field, double d, double alpha, const Interval& interval,
                               const EigenOptions& options) {
  require_problem(d, interval);
  FloquetProblem prob(field, d, alpha, interval, options, inner_tolerance(options.tol));
  return solve_lambda0(prob, field, options.tol, options.max_outer);
}

double lambda0(const CoefficientField& field, double d, double alpha, const Interval& interval,
               const EigenOptions& options) {
  return lambda0_detailed(field, d, alpha, interval, options).value;
}

R0Result r0_variational(const CoefficientField& field, double d, double alpha, const Interval& interval,
                        int grid_n) {
  require_problem(d, interval);
  require_time_independent(field);
  const Grid1D grid = Grid1D::make(interval.lo, interval.hi, grid_n);
  const double dx = grid.dx();
  const auto m = static_cast<std::size_t>(grid_n - 2);
  const double stiff = d / (dx * dx);
  const double drift = alpha * alpha / (4.0 * d);

  // (d K + (alpha^2/4d + gamma) M) psi = (1/R0) beta M psi, symmetrized by beta^{-1/2}.
  std::vector<double> sqrt_beta(m), diag(m), off(m > 0 ? m - 1 : 0);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = grid.x(static_cast<int>(k + 1));
    const double b = field.beta(x, 0.0);
    sqrt_beta[k] = std::sqrt(b);
    diag[k] = (2.0 * stiff + drift + field.gamma(x, 0.0)) / b;
  }
  for (std::size_t k = 0; k + 1 < m; ++k) off[k] = -stiff / (sqrt_beta[k] * sqrt_beta[k + 1]);
  const SymmetricEigen eig = smallest_symmetric_tridiagonal(diag, off);

  // phi = exp(alpha x / 2d) * psi with psi = beta^{-1/2} w
  const double mid = 0.5 * (interval.lo + interval.hi);
  std::vector<double> phi(static_cast<std::size_t>(grid_n), 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = grid.x(static_cast<int>(k + 1));
    phi[k + 1] = std::exp(alpha * (x - mid) / (2.0 * d)) * eig.vector[k] / sqrt_beta[k];
  }
  R0Result out;
  out.method = R0Method::Variational;
  out.value = 1.0 / eig.value;
  out.eigenfunction = sup_normalized(grid, std::move(phi), 0.0);
  out.residual = eig.residual;
  out.lambda0 = lambda0_elliptic(field, d, alpha, interval, grid_n);
  out.iterations = 1;
  return out;
}

double lambda0_elliptic(const CoefficientField& field, double d, double alpha, const Interval& interval,
                        int grid_n) {
  require_problem(d, interval);
  require_time_independent(field);
  const Grid1D grid = Grid1D::make(interval.lo, interval.hi, grid_n);
  const double dx = grid.dx();
  const auto m = static_cast<std::size_t>(grid_n - 2);
  const double stiff = d / (dx * dx);
  std::vector<double> diag(m), off(m > 0 ? m - 1 : 0, -stiff);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = grid.x(static_cast<int>(k + 1));
    diag[k] = 2.0 * stiff + alpha * alpha / (4.0 * d) + field.gamma(x, 0.0) - field.beta(x, 0.0);
  }
  return smallest_symmetric_tridiagonal(diag, off).value;
}

double far_field_h_star(const CoefficientField& field, double d, double alpha) {
  const double net = field.limit_average(Rate::Beta) - field.limit_average(Rate::Gamma) - alpha * alpha / (4.0 * d);
  if (!(net > 0.0)) throw ValidationError("far-field net growth does not exceed alpha^2/(4d); no critical length");
  return kPi * std::sqrt(d / net);
}

double find_h_star(const CoefficientField& field, double d, double alpha, double anchor, double tol,
                   const EigenOptions& options) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  const double probe = std::max(2.0 * field.decay_cutoff(), 50.0);
  const auto report = check_hypotheses(field, d, alpha, probe);
  if (!report.h1_satisfied || !report.h2_satisfied) {
    throw ValidationError("critical length search requires H1 and H2: " + report.notes);
  }
  EigenOptions eo = options;
  eo.tol = std::min(options.tol, 0.1 * tol);
  eo.compute_lambda0 = false;

  // Sign of R0([anchor, anchor+h]) - 1; the sandwich decides clear-cut cases.
  auto above_one = [&](double h) {
    const Interval iv{anchor, anchor + h};
    const auto sb = sandwich_bounds(field, d, alpha, iv, options.grid_n);
    if (sb.upper < 0.5) return -1.0;
    if (sb.lower > 2.0) return 1.0;
    return r0_floquet(field, d, alpha, iv, eo).value - 1.0;
  };

  double lo = 0.0;
  double hi = tol;
  double f_lo = -1.0;
  double f_hi = above_one(hi);
  while (f_hi < 0.0) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    if (hi > kHStarMax) throw NumericalError("R0 limit <= 1; (H2) margin too small numerically");
    f_hi = above_one(hi);
  }
  while (hi - lo > 0.5 * tol) {
    const double mid = 0.5 * (lo + hi);
    const double f = above_one(mid);
    if (f < 0.0) { lo = mid; f_lo = f; } else { hi = mid; f_hi = f; }
  }
  // linear interpolation inside the final bracket when both ends were resolved
  if (f_lo > -0.5 && f_hi < 1.0 && f_hi > f_lo) return lo - f_lo * (hi - lo) / (f_hi - f_lo);
  return 0.5 * (lo + hi);
}

FrontR0Series r0_front(const SimulationTrace& trace, const CoefficientField& field, double d, double alpha,
                       std::span<const double> taus, const EigenOptions& options) {
  if (trace.size() == 0) throw ValidationError("trace is empty");
  FrontR0Series out;
  EigenOptions eo = options;
  eo.compute_lambda0 = false;
  for (double tau : taus) {
    if (tau < trace.t.front() - 1e-12 || tau > trace.t.back() + 1e-12) {
      throw ValidationError("sample time outside the trace");
    }
    auto it = std::lower_bound(trace.t.begin(), trace.t.end(), tau - 1e-9 * std::max(1.0, std::abs(tau)));
    std::size_t k = static_cast<std::size_t>(it - trace.t.begin());
    Interval iv;
    if (k < trace.size() && std::abs(trace.t[k] - tau) <= 1e-9 * std::max(1.0, std::abs(tau))) {
      iv = {trace.g[k], trace.h[k]};
    } else {
      const std::size_t k1 = std::min(k, trace.size() - 1);
      const std::size_t k0 = k1 == 0 ? 0 : k1 - 1;
      const double w = k1 == k0 ? 0.0 : (tau - trace.t[k0]) / (trace.t[k1] - trace.t[k0]);
      iv = {trace.g[k0] + w * (trace.g[k1] - trace.g[k0]), trace.h[k0] + w * (trace.h[k1] - trace.h[k0])};
    }
    out.taus.push_back(tau);
    out.intervals.push_back(iv);
    out.values.push_back(r0_floquet(field, d, alpha, iv, eo).value);
  }
  for (std::size_t i = 1; i < out.values.size(); ++i) {
    if (out.taus[i] > out.taus[i - 1] && out.values[i] < out.values[i - 1] - kFrontMonotoneSlack) {
      std::ostringstream msg;
      msg << "front R0 decreased from " << out.values[i - 1] << " to " << out.values[i] << " between tau="
          << out.taus[i - 1] << " and " << out.taus[i] << "; eigen-solver tolerance too loose";
      throw NumericalError(msg.str());
    }
  }
  return out;
}

}  // namespace frontlab
