#include "frontlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frontlab/error.hpp"

namespace frontlab {

namespace {

constexpr double kAdvectionFloor = 1e-8;

struct StencilCoefficients {
  double lower, diag, upper;
};

// Row of A u = -D u_xx + v u_x at one interior node.
StencilCoefficients transport_stencil(double dx, double diffusivity, double v) {
  const double diff = diffusivity / (dx * dx);
  if (std::abs(v) * dx <= 2.0 * diffusivity) {
    const double adv = v / (2.0 * dx);
    return {-diff - adv, 2.0 * diff, -diff + adv};
  }
  if (v > 0.0) return {-diff - v / dx, 2.0 * diff + v / dx, -diff};
  return {-diff, 2.0 * diff - v / dx, -diff + v / dx};
}

double velocity_at(std::span<const double> velocity, int i) {
  return velocity.size() == 1 ? velocity[0] : velocity[static_cast<std::size_t>(i)];
}

void require_grid(const Grid1D& g) {
  if (g.n < 3) throw ValidationError("grid needs at least 3 nodes");
  if (!(g.x_lo < g.x_hi)) throw ValidationError("grid needs x_lo < x_hi");
}

}  // namespace

Grid1D Grid1D::make(double x_lo, double x_hi, int n) {
  Grid1D g{x_lo, x_hi, n};
  require_grid(g);
  return g;
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = x(i);
  return xs;
}

FieldOnGrid FieldOnGrid::zeros(const Grid1D& grid, double time) {
  return {grid, std::vector<double>(static_cast<std::size_t>(grid.n), 0.0), time};
}

FieldOnGrid FieldOnGrid::sample(const Grid1D& grid, const std::function<double(double)>& f, double time) {
  FieldOnGrid u = zeros(grid, time);
  for (int i = 0; i < grid.n; ++i) u.values[static_cast<std::size_t>(i)] = f(grid.x(i));
  return u;
}

double FieldOnGrid::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Tridiagonal implicit_transport_matrix(int n, double dx, double diffusivity, std::span<const double> velocity,
                                      double dt) {
  if (!(diffusivity > 0.0)) throw ValidationError("diffusivity must be positive");
  const auto m = static_cast<std::size_t>(n - 2);
  Tridiagonal a(m);
  for (int i = 1; i <= n - 2; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    const auto s = transport_stencil(dx, diffusivity, velocity_at(velocity, i));
    a.lower[k] = dt * s.lower;
    a.diag[k] = 1.0 + dt * s.diag;
    a.upper[k] = dt * s.upper;
  }
  return a;
}

void implicit_transport_solve(std::span<double> u, double dx, double diffusivity, std::span<const double> velocity,
                              double dt) {
  const int n = static_cast<int>(u.size());
  const Tridiagonal a = implicit_transport_matrix(n, dx, diffusivity, velocity, dt);
  const std::size_t m = a.size();
  std::span<double> interior = u.subspan(1, m);
  interior[0] -= a.lower[0] * u[0];
  interior[m - 1] -= a.upper[m - 1] * u[u.size() - 1];
  solve_tridiagonal(a, interior);
}

double transport_principal_eigenvalue(int n, double dx, double diffusivity, double velocity) {
  const auto s = transport_stencil(dx, diffusivity, velocity);
  const int m = n - 2;
  return s.diag - 2.0 * std::sqrt(std::max(0.0, s.lower * s.upper)) * std::cos(M_PI / (m + 1));
}

double max_stable_dt(const CoefficientField& field, double dx, double alpha) {
  const auto b = field.bounds(Rate::Beta);
  const auto g = field.bounds(Rate::Gamma);
  const double net = std::max(std::abs(b.hi - g.lo), std::abs(b.lo - g.hi));
  const double total = b.hi + g.hi;
  double dt = 1.0 / total;
  if (net > 0.0) dt = std::min(dt, 0.25 / net);
  dt = std::min(dt, dx / std::max(std::abs(alpha), kAdvectionFloor));
  return dt;
}

FieldOnGrid step_linear(const FieldOnGrid& u, const LinearProblemSpec& spec, double dt) {
  require_grid(u.grid);
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(spec.d > 0.0)) throw ValidationError("diffusivity must be positive");
  if (u.values.size() != static_cast<std::size_t>(u.grid.n)) throw ValidationError("field length does not match grid");
  const double dx = u.grid.dx();
  if (dt > dx / std::max(std::abs(spec.alpha), kAdvectionFloor)) {
    throw ValidationError("dt exceeds the advective limit dx/|alpha|");
  }
  FieldOnGrid out{u.grid, u.values, u.time + dt};
  const int n = u.grid.n;
  out.values.front() = 0.0;
  out.values.back() = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double c = spec.potential ? spec.potential(u.grid.x(i), u.time) : 0.0;
    out.values[static_cast<std::size_t>(i)] *= 1.0 + dt * c;
  }
  const double v[] = {spec.alpha};
  implicit_transport_solve(out.values, dx, spec.d, v, dt);
  return out;
}

FieldOnGrid step_logistic(const FieldOnGrid& u, const CoefficientField& field, double d, double alpha,
                          double n_star, double dt) {
  require_grid(u.grid);
  if (!(n_star > 0.0)) throw ValidationError("N* must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  const double dx = u.grid.dx();
  const double dt_max = max_stable_dt(field, dx, alpha);
  if (dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt=" << dt << " exceeds the stability limit " << dt_max;
    throw ValidationError(msg.str());
  }
  FieldOnGrid out{u.grid, u.values, u.time + dt};
  const int n = u.grid.n;
  out.values.front() = 0.0;
  out.values.back() = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double x = u.grid.x(i);
    const double b = field.beta(x, u.time);
    const double g = field.gamma(x, u.time);
    double& v = out.values[static_cast<std::size_t>(i)];
    v += dt * ((b - g) * v - (b / n_star) * v * v);
  }
  const double vel[] = {alpha};
  implicit_transport_solve(out.values, dx, d, vel, dt);
  for (double v : out.values) {
    if (v > n_star * (1.0 + kBoundSlack) || v < -kBoundSlack * n_star) {
      throw NumericalError("discrete comparison violated; reduce dt");
    }
  }
  return out;
}

FieldOnGrid monodromy_apply(const FieldOnGrid& u0, const LinearProblemSpec& spec, double period,
                            int steps_per_period) {
  if (steps_per_period < 64) throw ValidationError("steps_per_period must be at least 64");
  if (!(period > 0.0)) throw ValidationError("period must be positive");
  const double dt = period / steps_per_period;
  FieldOnGrid u = u0;
  for (int j = 0; j < steps_per_period; ++j) {
    const double t = u0.time + j * dt;
    u.time = t;
    u = step_linear(u, spec, dt);
  }
  u.time = u0.time + period;
  return u;
}

std::shared_ptr<const PotentialTables> PotentialTables::from_field(const CoefficientField& field,
                                                                   const Grid1D& grid, int steps_per_period) {
  auto tab = std::make_shared<PotentialTables>();
  tab->grid = grid;
  tab->period = field.period();
  tab->steps = steps_per_period;
  const auto n = static_cast<std::size_t>(grid.n);
  tab->primary.resize(n * static_cast<std::size_t>(steps_per_period));
  tab->secondary.resize(tab->primary.size());
  const double dt = field.period() / steps_per_period;
  const auto xs = grid.nodes();
  for (int j = 0; j < steps_per_period; ++j) {
    const double t = j * dt;
    for (std::size_t i = 0; i < n; ++i) {
      tab->primary[static_cast<std::size_t>(j) * n + i] = field.beta(xs[i], t);
      tab->secondary[static_cast<std::size_t>(j) * n + i] = field.gamma(xs[i], t);
    }
  }
  return tab;
}

std::shared_ptr<const PotentialTables> PotentialTables::from_function(
    const std::function<double(double, double)>& c, const Grid1D& grid, double period, int steps_per_period) {
  auto tab = std::make_shared<PotentialTables>();
  tab->grid = grid;
  tab->period = period;
  tab->steps = steps_per_period;
  const auto n = static_cast<std::size_t>(grid.n);
  tab->primary.resize(n * static_cast<std::size_t>(steps_per_period));
  const double dt = period / steps_per_period;
  const auto xs = grid.nodes();
  for (int j = 0; j < steps_per_period; ++j) {
    for (std::size_t i = 0; i < n; ++i) tab->primary[static_cast<std::size_t>(j) * n + i] = c(xs[i], j * dt);
  }
  return tab;
}

LinearPeriodMap::LinearPeriodMap(std::shared_ptr<const PotentialTables> tables, double d, double alpha,
                                 double primary_scale, double secondary_scale, double shift, bool rescale)
    : tables_(std::move(tables)),
      primary_scale_(primary_scale),
      secondary_scale_(secondary_scale),
      shift_(shift) {
  if (tables_->steps < 64) throw ValidationError("steps_per_period must be at least 64");
  const Grid1D& g = tables_->grid;
  require_grid(g);
  dt_ = tables_->period / tables_->steps;
  const double vel[] = {alpha};
  factor_.factor(implicit_transport_matrix(g.n, g.dx(), d, vel, dt_));

  const auto n = static_cast<std::size_t>(g.n);
  double mean = 0.0;
  double min_factor = 1.0;
  for (int j = 0; j < tables_->steps; ++j) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * n + i;
      double c = primary_scale_ * tables_->primary[k] + shift_;
      if (!tables_->secondary.empty()) c += secondary_scale_ * tables_->secondary[k];
      mean += c;
      min_factor = std::min(min_factor, 1.0 + dt_ * c);
    }
  }
  if (!(min_factor > 0.0)) {
    throw NumericalError("explicit reaction factor 1 + dt*c is not positive; increase steps_per_period");
  }
  mean /= static_cast<double>(tables_->steps) * static_cast<double>(n - 2);
  if (rescale) {
    const double lam = transport_principal_eigenvalue(g.n, g.dx(), d, alpha);
    log_scale_ = std::log1p(dt_ * mean) - std::log1p(dt_ * lam);
  }
}

void LinearPeriodMap::apply(std::span<const double> in, std::span<double> out) const {
  const auto n = static_cast<std::size_t>(tables_->grid.n);
  std::copy(in.begin(), in.end(), out.begin());
  out[0] = 0.0;
  out[n - 1] = 0.0;
  const double damp = std::exp(-log_scale_);
  std::span<double> interior = out.subspan(1, n - 2);
  const bool has_secondary = !tables_->secondary.empty();
  for (int j = 0; j < tables_->steps; ++j) {
    const double* p = tables_->primary.data() + static_cast<std::size_t>(j) * n;
    const double* s = has_secondary ? tables_->secondary.data() + static_cast<std::size_t>(j) * n : nullptr;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double c = primary_scale_ * p[i] + shift_;
      if (s) c += secondary_scale_ * s[i];
      out[i] *= 1.0 + dt_ * c;
    }
    factor_.solve(interior);
    for (double& v : interior) v *= damp;
  }
}

double PeriodicOrbit::value(double x, double t) const {
  const double period = snapshots.back().time - snapshots.front().time;
  double phase = std::fmod(t - snapshots.front().time, period);
  if (phase < 0.0) phase += period;
  const int s = static_cast<int>(snapshots.size()) - 1;
  const double pos = phase / period * s;
  const int k = std::min(static_cast<int>(pos), s - 1);
  const double w = pos - k;
  auto at = [&](const FieldOnGrid& f) {
    const Grid1D& g = f.grid;
    const double xi = std::clamp((x - g.x_lo) / g.dx(), 0.0, static_cast<double>(g.n - 1));
    const int i = std::min(static_cast<int>(xi), g.n - 2);
    const double wx = xi - i;
    return (1.0 - wx) * f.values[static_cast<std::size_t>(i)] + wx * f.values[static_cast<std::size_t>(i + 1)];
  };
  return (1.0 - w) * at(snapshots[static_cast<std::size_t>(k)]) + w * at(snapshots[static_cast<std::size_t>(k + 1)]);
}

PeriodicOrbit periodic_entire_solution(const CoefficientField& field, double d, double alpha, double n_star,
                                       double l_trunc, double tol, const PeriodicOrbitOptions& options) {
  const double T = field.period();
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (!(n_star > 0.0)) throw ValidationError("N* must be positive");
  if (l_trunc < 10.0 * std::max(1.0, std::sqrt(d) * T)) {
    throw ValidationError("truncation half-width must be at least 10*max(1, sqrt(d)*T)");
  }
  const auto report = check_hypotheses(field, d, alpha, l_trunc);
  if (!report.h2_satisfied) throw ValidationError("periodic entire solution requires H2: " + report.notes);
  if (options.snapshots_per_period < 1 || options.steps_per_period % options.snapshots_per_period != 0) {
    throw ValidationError("steps_per_period must be a multiple of snapshots_per_period");
  }

  const Grid1D grid = Grid1D::make(-l_trunc, l_trunc, options.grid_n);
  const double dt = T / options.steps_per_period;
  if (dt > max_stable_dt(field, grid.dx(), alpha)) {
    throw ValidationError("steps_per_period too small for the stability limit");
  }
  const int stride = options.steps_per_period / options.snapshots_per_period;

  FieldOnGrid u = FieldOnGrid::sample(grid, [&](double) { return 0.5 * n_star; });
  u.values.front() = u.values.back() = 0.0;

  PeriodicOrbit orbit;
  for (int p = 1; p <= options.max_periods; ++p) {
    std::vector<FieldOnGrid> snaps{u};
    FieldOnGrid start = u;
    for (int j = 0; j < options.steps_per_period; ++j) {
      u = step_logistic(u, field, d, alpha, n_star, dt);
      if ((j + 1) % stride == 0) snaps.push_back(u);
    }
    double res = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) res = std::max(res, std::abs(u.values[i] - start.values[i]));
    orbit.residual = res;
    orbit.periods = p;
    if (res < tol) {
      orbit.snapshots = std::move(snaps);
      return orbit;
    }
  }
  std::ostringstream msg;
  msg << "periodic entire solution did not converge in " << options.max_periods << " periods; last residual "
      << orbit.residual;
  throw NumericalError(msg.str());
}

}  // namespace frontlab
