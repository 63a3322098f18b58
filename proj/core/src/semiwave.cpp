#include "frontlab/semiwave.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "frontlab/error.hpp"
#include "frontlab/pde.hpp"

namespace frontlab {

namespace {

constexpr int kMeanNodes = 256;

void check_margin(double d, double alpha, double mean_a) {
  if (!(d > 0.0)) throw ValidationError("diffusion rate d must be positive");
  if (!(mean_a > 0.0)) throw ValidationError("semi-wave needs a positive mean growth rate a");
  if (!(2.0 * std::sqrt(d * mean_a) > std::abs(alpha))) {
    throw ValidationError("semi-wave needs |alpha| < 2 sqrt(d * mean a)");
  }
}

// ---- shooting ----

enum class Shot { Overshoot, Turned, Undecided };

struct ShotPath {
  std::vector<double> x;
  std::vector<double> q;
  std::vector<double> p;
};

class Shooter {
 public:
  Shooter(double d, double c, double a, double b, double dx, double reach)
      : d_(d), c_(c), a_(a), b_(b), dx_(dx), steps_(static_cast<long>(std::ceil(reach / dx))) {}

  Shot shoot(double s, ShotPath* path = nullptr) const {
    const double top = a_ / b_;
    double q = 0.0, p = s;
    if (path) {
      path->x.assign(1, 0.0);
      path->q.assign(1, q);
      path->p.assign(1, p);
    }
    for (long i = 1; i <= steps_; ++i) {
      rk4(q, p);
      if (path) {
        path->x.push_back(i * dx_);
        path->q.push_back(q);
        path->p.push_back(p);
      }
      if (q > top) return Shot::Overshoot;
      if (p <= 0.0) return Shot::Turned;
    }
    return Shot::Undecided;
  }

  // Initial slope of the monotone connection from 0 to a/b.
  double slope() const {
    double lo = 0.0;
    double hi = std::sqrt(a_ / d_) * a_ / b_;
    for (int i = 0; shoot(hi) != Shot::Overshoot; ++i) {
      if (i > 60) throw NumericalError("semi-wave shooting: no overshooting slope found");
      lo = hi;
      hi *= 2.0;
    }
    while (hi - lo > 1e-14 * hi) {
      const double mid = 0.5 * (lo + hi);
      const Shot shot = shoot(mid);
      if (shot == Shot::Undecided) return mid;
      if (shot == Shot::Overshoot) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  void rhs(double q, double p, double& dq, double& dp) const {
    dq = p;
    dp = (c_ * p - q * (a_ - b_ * q)) / d_;
  }

  void rk4(double& q, double& p) const {
    double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
    rhs(q, p, k1q, k1p);
    rhs(q + 0.5 * dx_ * k1q, p + 0.5 * dx_ * k1p, k2q, k2p);
    rhs(q + 0.5 * dx_ * k2q, p + 0.5 * dx_ * k2p, k3q, k3p);
    rhs(q + dx_ * k3q, p + dx_ * k3p, k4q, k4p);
    q += dx_ / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += dx_ / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  }

  double d_, c_, a_, b_, dx_;
  long steps_;
};

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto k = static_cast<std::size_t>(it - xs.begin());
  const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return (1.0 - w) * ys[k - 1] + w * ys[k];
}

}  // namespace

// ---- coefficients ----

SemiWaveCoefficients SemiWaveCoefficients::make_constant(double a, double b, double period) {
  if (!(b > 0.0)) throw ValidationError("semi-wave coefficient b must be positive");
  if (!(period > 0.0)) throw ValidationError("period must be positive");
  SemiWaveCoefficients c;
  c.a = [a](double) { return a; };
  c.b = [b](double) { return b; };
  c.period = period;
  c.constant = true;
  return c;
}

SemiWaveCoefficients SemiWaveCoefficients::from_field(const CoefficientField& field, double n_star) {
  if (!(n_star > 0.0)) throw ValidationError("N* must be positive");
  SemiWaveCoefficients c;
  c.a = [field](double t) { return field.limit(Rate::Beta, t) - field.limit(Rate::Gamma, t); };
  c.b = [field, n_star](double t) { return field.limit(Rate::Beta, t) / n_star; };
  c.period = field.period();
  double lo_a = c.a(0.0), hi_a = lo_a, lo_b = c.b(0.0), hi_b = lo_b;
  for (int i = 1; i < 64; ++i) {
    const double t = c.period * i / 64.0;
    lo_a = std::min(lo_a, c.a(t));
    hi_a = std::max(hi_a, c.a(t));
    lo_b = std::min(lo_b, c.b(t));
    hi_b = std::max(hi_b, c.b(t));
  }
  if (!(lo_b > 0.0)) throw ValidationError("far-field beta must be positive");
  c.constant = hi_a - lo_a <= 1e-14 * std::max(1.0, std::abs(hi_a)) && hi_b - lo_b <= 1e-14 * hi_b;
  if (c.constant) {
    const double a = c.a(0.0), b = c.b(0.0);
    c.a = [a](double) { return a; };
    c.b = [b](double) { return b; };
  }
  return c;
}

double SemiWaveCoefficients::mean_a() const { return periodic_average(a, period, kMeanNodes); }
double SemiWaveCoefficients::mean_b() const { return periodic_average(b, period, kMeanNodes); }

double semiwave_length(double d, double mean_a) { return 20.0 * std::sqrt(d / mean_a); }

std::vector<double> logistic_orbit(const SemiWaveCoefficients& coeffs, int samples) {
  if (samples < 2) throw ValidationError("logistic orbit needs at least two samples");
  const int steps = samples - 1;
  const double T = coeffs.period;
  const double h = T / steps;
  auto f = [&](double t, double v) { return v * (coeffs.a(t) - coeffs.b(t) * v); };
  std::vector<double> v(static_cast<std::size_t>(samples));
  v[0] = coeffs.mean_a() / coeffs.mean_b();
  if (!(v[0] > 0.0)) throw ValidationError("logistic orbit needs a positive mean growth rate");
  for (int period = 0; period < 100000; ++period) {
    for (int j = 0; j < steps; ++j) {
      const double t = j * h;
      const double y = v[static_cast<std::size_t>(j)];
      const double k1 = f(t, y);
      const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
      const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
      const double k4 = f(t + h, y + h * k3);
      v[static_cast<std::size_t>(j + 1)] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double drift = std::abs(v.back() - v.front());
    v.front() = v.back();
    if (drift <= 1e-14 * v.front()) return v;
  }
  throw NumericalError("logistic orbit did not become periodic");
}

// ---- autonomous route ----

SemiWaveSolution semiwave_autonomous(double d, double alpha, double a, double b, double mu, double tol,
                                     const SemiWaveOptions& options) {
  check_margin(d, alpha, a);
  if (!(b > 0.0)) throw ValidationError("semi-wave coefficient b must be positive");
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  const double L = options.length > 0.0 ? options.length : semiwave_length(d, a);
  const double dx = 1e-3 * L;
  const double reach = 4.0 * L;

  auto excess = [&](double k) { return mu * Shooter(d, k - alpha, a, b, dx, reach).slope() - k; };
  double k_lo = 0.0;
  double k_hi = 2.0 * std::sqrt(d * a) + alpha;  // slope vanishes at the minimal wave speed
  if (!(excess(k_lo) > 0.0)) throw NumericalError("no semi-wave speed in the admissible bracket");
  for (int i = 0; i < 200 && k_hi - k_lo > 1e-4 * tol; ++i) {
    const double mid = 0.5 * (k_lo + k_hi);
    if (excess(mid) > 0.0) k_lo = mid; else k_hi = mid;
  }
  const double k = 0.5 * (k_lo + k_hi);
  const double c = k - alpha;
  const Shooter shooter(d, c, a, b, dx, reach);
  const double s = shooter.slope();

  SemiWaveSolution out;
  out.period = 1.0;
  out.k_bar = k;
  out.residual = std::abs(mu * s - k);
  const int nk = std::max(2, options.steps_per_period);
  for (int j = 0; j < nk; ++j) {
    out.k_times.push_back(out.period * j / nk);
    out.k.push_back(k);
  }

  // Monotone part from the shot, then the linearized approach to a/b.
  ShotPath path;
  shooter.shoot(s, &path);
  const double top = a / b;
  std::size_t e = 0;
  while (e + 1 < path.x.size() && path.p[e + 1] > 0.0 && path.q[e + 1] < top) {
    ++e;
    if (top - path.q[e] < 1e-8 * top) break;
  }
  const double xe = path.x[e];
  const double w = top - path.q[e];
  const double r = (c - std::sqrt(c * c + 4.0 * a * d)) / (2.0 * d);
  path.x.resize(e + 1);
  path.q.resize(e + 1);

  const int nx = std::max(3, options.profile_points);
  for (int i = 0; i < nx; ++i) out.xs.push_back(L * i / (nx - 1));
  std::vector<double> row(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) {
    const double x = out.xs[static_cast<std::size_t>(i)];
    row[static_cast<std::size_t>(i)] = x <= xe ? interp(path.x, path.q, x) : top - w * std::exp(r * (x - xe));
  }
  const int nt = std::max(1, options.snapshots_per_period);
  for (int j = 0; j < nt; ++j) {
    out.q_times.push_back(out.period * j / nt);
    out.q.insert(out.q.end(), row.begin(), row.end());
  }
  return out;
}

// ---- periodic route ----

SemiWaveSolution semiwave_periodic(double d, double alpha, const SemiWaveCoefficients& coeffs, double mu, double tol,
                                   const SemiWaveOptions& options) {
  const double a_bar = coeffs.mean_a();
  const double b_bar = coeffs.mean_b();
  check_margin(d, alpha, a_bar);
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (!(options.theta > 0.0 && options.theta <= 1.0)) throw ValidationError("damping theta must lie in (0, 1]");
  if (options.grid_n < 101) throw ValidationError("semi-wave grid needs at least 101 nodes");
  if (options.snapshots_per_period < 1 || options.steps_per_period % options.snapshots_per_period != 0) {
    throw ValidationError("steps_per_period must be a multiple of snapshots_per_period");
  }

  const double T = coeffs.period;
  const double L = options.length > 0.0 ? options.length : semiwave_length(d, a_bar);
  const int n = options.grid_n;
  const double dx = L / (n - 1);

  // Explicit logistic reaction stays monotone while dt (2 b V - a) <= 1.
  int steps = options.steps_per_period;
  std::vector<double> orbit;
  for (;;) {
    orbit = logistic_orbit(coeffs, steps + 1);
    double worst = 0.0;
    for (int j = 0; j < steps; ++j) {
      const double t = T * j / steps;
      const double v = *std::max_element(orbit.begin(), orbit.end());
      worst = std::max({worst, 2.0 * coeffs.b(t) * v - coeffs.a(t), std::abs(coeffs.a(t))});
    }
    if (T / steps * worst <= 1.0) break;
    steps *= 2;
  }
  const double dt = T / steps;
  const double v_max = *std::max_element(orbit.begin(), orbit.end());
  const int stride = steps / options.snapshots_per_period;

  std::vector<double> a_t(static_cast<std::size_t>(steps)), b_t(static_cast<std::size_t>(steps));
  for (int j = 0; j < steps; ++j) {
    a_t[static_cast<std::size_t>(j)] = coeffs.a(T * j / steps);
    b_t[static_cast<std::size_t>(j)] = coeffs.b(T * j / steps);
  }

  // Start from the averaged autonomous semi-wave.
  SemiWaveOptions auto_opts = options;
  auto_opts.length = L;
  auto_opts.profile_points = n;
  auto_opts.snapshots_per_period = 1;
  const auto start = semiwave_autonomous(d, alpha, a_bar, b_bar, mu, tol, auto_opts);
  std::vector<double> q(start.q.begin(), start.q.begin() + n);
  const double scale = orbit.front() / (a_bar / b_bar);
  for (double& v : q) v *= scale;
  std::vector<double> k(static_cast<std::size_t>(steps), start.k_bar);
  std::vector<double> flux(static_cast<std::size_t>(steps));
  std::vector<double> snapshots(static_cast<std::size_t>(options.snapshots_per_period) * n);

  const double k_cap = 2.0 * std::sqrt(d * a_bar) + alpha;
  const double inner_tol = 1e-2 * tol;
  double theta = options.theta;
  double prev = std::numeric_limits<double>::infinity();

  SemiWaveSolution out;
  out.period = T;
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    bool periodic = false;
    for (int period = 0; period < options.max_inner_periods && !periodic; ++period) {
      const std::vector<double> q0 = q;
      for (int j = 0; j < steps; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (j % stride == 0) {
          std::copy(q.begin(), q.end(), snapshots.begin() + static_cast<std::ptrdiff_t>(j / stride) * n);
        }
        for (int i = 1; i < n - 1; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          u[ii] = q[ii] + dt * q[ii] * (a_t[jj] - b_t[jj] * q[ii]);
        }
        u.front() = 0.0;
        u.back() = orbit[jj + 1];
        const double v = k[jj] - alpha;
        implicit_transport_solve(u, dx, d, std::span<const double>(&v, 1), dt);
        q.swap(u);
        flux[(jj + 1) % static_cast<std::size_t>(steps)] = mu * (4.0 * q[1] - q[2]) / (2.0 * dx);
      }
      double change = 0.0;
      for (int i = 0; i < n; ++i) {
        change = std::max(change, std::abs(q[static_cast<std::size_t>(i)] - q0[static_cast<std::size_t>(i)]));
      }
      periodic = change <= inner_tol * v_max;
    }
    if (!periodic) throw NumericalError("semi-wave profile did not become time-periodic");

    double resid = 0.0;
    for (int j = 0; j < steps; ++j) {
      resid = std::max(resid, std::abs(flux[static_cast<std::size_t>(j)] - k[static_cast<std::size_t>(j)]));
    }
    out.history.push_back(resid);
    out.iterations = iter;
    if (resid <= tol) {
      out.residual = resid;
      for (int j = 0; j < steps; ++j) out.k_times.push_back(T * j / steps);
      out.k = k;
      double sum = 0.0;
      for (double kj : k) sum += kj;
      out.k_bar = sum / steps;
      for (int i = 0; i < n; ++i) out.xs.push_back(dx * i);
      for (int m = 0; m < options.snapshots_per_period; ++m) out.q_times.push_back(T * m / options.snapshots_per_period);
      out.q = std::move(snapshots);
      return out;
    }
    if (resid > prev) theta *= 0.5;
    prev = resid;
    double k_mean = 0.0;
    for (int j = 0; j < steps; ++j) {
      auto& kj = k[static_cast<std::size_t>(j)];
      kj = (1.0 - theta) * kj + theta * flux[static_cast<std::size_t>(j)];
      k_mean += kj / steps;
    }
    if (!std::isfinite(k_mean) || !(k_mean > 0.0) || !(k_mean < k_cap)) {
      throw NumericalError("semi-wave speed left the admissible bracket; use a smaller damping theta");
    }
  }
  std::ostringstream msg;
  msg << "semi-wave fixed point not converged after " << options.max_iterations
      << " iterations (residual " << prev << "); use a smaller damping theta";
  throw NumericalError(msg.str());
}

SemiWaveSolution semiwave(double d, double alpha, const SemiWaveCoefficients& coeffs, double mu, double tol,
                          const SemiWaveOptions& options) {
  if (coeffs.constant) {
    auto out = semiwave_autonomous(d, alpha, coeffs.a(0.0), coeffs.b(0.0), mu, tol, options);
    out.period = coeffs.period;
    for (auto& t : out.k_times) t *= coeffs.period;
    for (auto& t : out.q_times) t *= coeffs.period;
    return out;
  }
  return semiwave_periodic(d, alpha, coeffs, mu, tol, options);
}

SpeedOrdering speed_ordering(double d, const SemiWaveCoefficients& coeffs, double mu, double alpha, double tol,
                             const SemiWaveOptions& options) {
  if (alpha < 0.0) throw ValidationError("speed ordering expects alpha >= 0");
  auto run = [&](double signed_alpha) { return semiwave(d, signed_alpha, coeffs, mu, tol, options).k_bar; };
  auto minus = std::async(std::launch::async, run, -alpha);
  auto zero = std::async(std::launch::async, run, 0.0);
  auto plus = std::async(std::launch::async, run, alpha);
  SpeedOrdering out{minus.get(), zero.get(), plus.get()};
  if (out.k_minus - out.k_zero > 10.0 * tol || out.k_zero - out.k_plus > 10.0 * tol) {
    std::ostringstream msg;
    msg << "speed ordering violated: k(-alpha)=" << out.k_minus << ", k(0)=" << out.k_zero
        << ", k(alpha)=" << out.k_plus;
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace frontlab
