#include "frontlab/stefan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "frontlab/error.hpp"
#include "frontlab/pde.hpp"

namespace frontlab {

// ---- FrontState ------------------------------------------------------------

double FrontState::value_at(double xq) const {
  if (xq <= g || xq >= h || I.size() < 2) return 0.0;
  const double pos = (xq - g) / (h - g) * (n() - 1);
  const int i = std::min(static_cast<int>(pos), n() - 2);
  const double w = pos - i;
  return (1.0 - w) * I[static_cast<std::size_t>(i)] + w * I[static_cast<std::size_t>(i + 1)];
}

double FrontState::sup() const {
  double m = 0.0;
  for (double v : I) m = std::max(m, v);
  return m;
}

double FrontState::mass() const {
  if (I.size() < 2) return 0.0;
  double s = 0.5 * (I.front() + I.back());
  for (std::size_t i = 1; i + 1 < I.size(); ++i) s += I[i];
  return s * (h - g) / (n() - 1);
}

// ---- parameters ------------------------------------------------------------

void ModelParams::validate() const {
  if (!(d_I > 0.0)) throw ValidationError("model.d_I must be positive");
  if (!(mu > 0.0)) throw ValidationError("model.mu must be positive");
  if (!(n_star > 0.0)) throw ValidationError("model.N_star must be positive");
  if (!(h0 > 0.0)) throw ValidationError("model.h0 must be positive");
  if (!(left0() < h0)) throw ValidationError("model.g0 must lie left of h0");
  if (grid_n < 101) throw ValidationError("model.grid_n must be at least 101");
  if (!(dt > 0.0)) throw ValidationError("model.dt must be positive");
  if (!std::isfinite(alpha)) throw ValidationError("model.alpha must be finite");
}

const char* to_string(InitialShape shape) {
  switch (shape) {
    case InitialShape::Parabolic: return "parabolic";
    case InitialShape::Cosine: return "cosine";
    case InitialShape::Tabulated: return "tabulated";
  }
  return "unknown";
}

InitialShape parse_initial_shape(const std::string& name) {
  for (auto s : {InitialShape::Parabolic, InitialShape::Cosine, InitialShape::Tabulated}) {
    if (name == to_string(s)) return s;
  }
  throw ValidationError("unknown initial shape '" + name + "'");
}

double InitialDatum::eval(double x, double g0, double h0) const {
  if (x <= g0 || x >= h0) return 0.0;
  const double mid = 0.5 * (g0 + h0);
  const double half = 0.5 * (h0 - g0);
  const double z = (x - mid) / half;
  switch (shape) {
    case InitialShape::Parabolic: return amplitude * (1.0 - z * z);
    case InitialShape::Cosine: return amplitude * std::cos(0.5 * std::numbers::pi * z);
    case InitialShape::Tabulated: {
      auto it = std::upper_bound(table_x.begin(), table_x.end(), x);
      if (it == table_x.begin() || it == table_x.end()) return 0.0;
      const auto k = static_cast<std::size_t>(it - table_x.begin());
      const double w = (x - table_x[k - 1]) / (table_x[k] - table_x[k - 1]);
      return (1.0 - w) * table_values[k - 1] + w * table_values[k];
    }
  }
  return 0.0;
}

void InitialDatum::validate(double n_star, double g0, double h0) const {
  if (shape == InitialShape::Tabulated) {
    if (table_x.size() < 3 || table_x.size() != table_values.size()) {
      throw ValidationError("initial table needs at least three (x, I) rows");
    }
    for (std::size_t i = 1; i < table_x.size(); ++i) {
      if (!(table_x[i] > table_x[i - 1])) throw ValidationError("initial table x must be strictly increasing");
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(h0 - g0));
    if (std::abs(table_x.front() - g0) > tol || std::abs(table_x.back() - h0) > tol) {
      throw ValidationError("initial table must span exactly [g0, h0]");
    }
    if (table_values.front() != 0.0 || table_values.back() != 0.0) {
      throw ValidationError("initial datum must vanish at both fronts");
    }
    for (std::size_t i = 1; i + 1 < table_values.size(); ++i) {
      if (!(table_values[i] > 0.0) || table_values[i] > n_star) {
        throw ValidationError("initial datum must satisfy 0 < I0 <= N* inside the initial interval");
      }
    }
    return;
  }
  if (!(amplitude > 0.0) || amplitude > n_star) throw ValidationError("initial.amplitude must lie in (0, N*]");
}

InitialDatum load_initial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open initial profile '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,I") throw ValidationError("initial profile '" + path + "': expected header 'x,I'");
  InitialDatum datum;
  datum.shape = InitialShape::Tabulated;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x = 0.0, v = 0.0;
    char comma = 0;
    if (!(ss >> x >> comma >> v) || comma != ',') {
      throw ValidationError("initial profile '" + path + "': malformed row '" + line + "'");
    }
    datum.table_x.push_back(x);
    datum.table_values.push_back(v);
  }
  datum.amplitude = datum.table_values.empty()
                        ? 0.0
                        : *std::max_element(datum.table_values.begin(), datum.table_values.end());
  return datum;
}

// ---- simulation ------------------------------------------------------------

namespace {

void record(SimulationTrace& trace, const FrontState& s, bool keep_profile) {
  trace.t.push_back(s.t);
  trace.g.push_back(s.g);
  trace.h.push_back(s.h);
  trace.sup_I.push_back(s.sup());
  trace.mass.push_back(s.mass());
  trace.r0f.emplace_back();
  if (keep_profile) trace.profiles.push_back(s);
}

}  // namespace

SimulationTrace simulate(const ModelParams& params, const CoefficientField& field, const InitialDatum& initial,
                         double horizon, const SimulateOptions& options) {
  params.validate();
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  const double g0 = params.left0();
  const double h0 = params.h0;
  initial.validate(params.n_star, g0, h0);

  const double T = field.period();
  const double sample = options.sample_interval > 0.0 ? options.sample_interval : T / 8.0;
  const int steps_per_sample = std::max(1, static_cast<int>(std::ceil(sample / params.dt - 1e-9)));
  const double dt = sample / steps_per_sample;
  const int n = params.grid_n;
  const double dy = 1.0 / (n - 1);
  const double dt_max = max_stable_dt(field, (h0 - g0) * dy, params.alpha);
  if (params.dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt=" << params.dt << " exceeds the stability limit " << dt_max << " for this grid";
    throw ValidationError(msg.str());
  }
  const double min_width = 2.0 * params.h0 * 1e-3;
  const double d = params.d_I;
  const double mu = params.mu;
  const double n_star = params.n_star;

  FrontState s;
  s.t = 0.0;
  s.g = g0;
  s.h = h0;
  s.I.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.I[static_cast<std::size_t>(i)] = initial.eval(s.x(i), g0, h0);
  s.I.front() = s.I.back() = 0.0;

  SimulationTrace trace;
  trace.period = T;
  record(trace, s, options.keep_profiles);

  const auto samples = static_cast<long>(std::floor(horizon / sample + 1e-9));
  std::vector<double> velocity(static_cast<std::size_t>(n));
  std::vector<double> u(static_cast<std::size_t>(n));
  for (long k = 1; k <= samples; ++k) {
    for (int j = 0; j < steps_per_sample; ++j) {
      const double L = s.h - s.g;
      // second-order one-sided derivatives, I = 0 at the fronts
      const double ix_left = (4.0 * s.I[1] - s.I[2]) / (2.0 * dy * L);
      const double ix_right = (-4.0 * s.I[static_cast<std::size_t>(n - 2)] + s.I[static_cast<std::size_t>(n - 3)]) /
                              (2.0 * dy * L);
      const double g_dot = -mu * ix_left;
      const double h_dot = -mu * ix_right;

      // explicit reaction at the old geometry
      for (int i = 1; i < n - 1; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double x = s.x(i);
        const double b = field.beta(x, s.t);
        const double gm = field.gamma(x, s.t);
        const double v = s.I[ii];
        u[ii] = v + dt * ((b - gm) * v - (b / n_star) * v * v);
      }
      u.front() = u.back() = 0.0;

      s.g += dt * g_dot;
      s.h += dt * h_dot;
      const double L_new = s.h - s.g;
      if (!(L_new > min_width)) throw NumericalError("domain width collapsed below 2*h0*1e-3");

      // I_t = (d/L^2) I_yy - ([alpha - ((1-y) g' + y h')]/L) I_y + f
      for (int i = 0; i < n; ++i) {
        const double y = i * dy;
        velocity[static_cast<std::size_t>(i)] = (params.alpha - ((1.0 - y) * g_dot + y * h_dot)) / L_new;
      }
      implicit_transport_solve(u, dy, d / (L_new * L_new), velocity, dt);
      s.t += dt;
      for (double v : u) {
        if (v > n_star * (1.0 + kBoundSlack) || v < -kBoundSlack * n_star) {
          throw NumericalError("invariant 0 <= I <= N* violated at t=" + std::to_string(s.t) + "; reduce dt");
        }
      }
      s.I.swap(u);
    }
    s.t = k * sample;
    record(trace, s, options.keep_profiles);
  }
  trace.final_state = s;
  return trace;
}

// ---- classification --------------------------------------------------------

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Spreading: return "Spreading";
    case Outcome::Vanishing: return "Vanishing";
    case Outcome::Undecided: return "Undecided";
  }
  return "unknown";
}

const char* to_string(Trigger trigger) {
  switch (trigger) {
    case Trigger::InitialR0: return "initial_r0";
    case Trigger::LaterR0: return "later_r0";
    case Trigger::WidthExceeded: return "width_exceeded";
    case Trigger::Decayed: return "decayed";
    case Trigger::None: return "none";
  }
  return "unknown";
}

Classification classify(const SimulationTrace& trace, const CoefficientField& field, const ModelParams& params,
                        const ClassifyCriteria& criteria, std::optional<double> r0_initial) {
  if (trace.size() == 0) throw ValidationError("cannot classify an empty trace");
  EigenOptions eo = criteria.eigen;
  eo.compute_lambda0 = false;
  const double d = params.d_I;
  const double alpha = params.alpha;

  Classification c;
  c.r0_initial = r0_initial ? *r0_initial : r0_floquet(field, d, alpha, {trace.g.front(), trace.h.front()}, eo).value;
  if (c.r0_initial >= 1.0) {
    c.outcome = Outcome::Spreading;
    c.trigger = Trigger::InitialR0;
    c.tau = trace.t.front();
    c.reason = "R0 on the initial interval is at least 1";
    return c;
  }

  const double eps = criteria.eps_vanish * params.n_star;
  double width_spread = std::numeric_limits<double>::infinity();
  if (criteria.width_spread) {
    width_spread = *criteria.width_spread;
  } else {
    try {
      width_spread = 20.0 * far_field_h_star(field, d, alpha);
    } catch (const ValidationError&) {
      // no finite critical length: the width criterion never fires
    }
  }

  const std::size_t last = trace.size() - 1;
  const double w_end = trace.width(last);
  const double sup_end = trace.sup_I[last];
  if (w_end > width_spread && sup_end > eps) {
    std::size_t k = 0;
    while (trace.width(k) <= width_spread) ++k;
    c.outcome = Outcome::Spreading;
    c.trigger = Trigger::WidthExceeded;
    c.tau = trace.t[k];
    c.reason = "width exceeds the spreading threshold while the density stays positive";
    return c;
  }

  c.r0_final = r0_floquet(field, d, alpha, {trace.g[last], trace.h[last]}, eo).value;
  if (c.r0_final >= 1.0) {
    c.outcome = Outcome::Spreading;
    c.trigger = Trigger::LaterR0;
    c.tau = trace.t[last];
    c.reason = "R0 on the current interval reached 1";
    return c;
  }

  const double t_cut = trace.t.front() + 0.8 * (trace.t[last] - trace.t.front());
  std::size_t k0 = 0;
  while (k0 < last && trace.t[k0] < t_cut) ++k0;
  const double growth = (w_end - trace.width(k0)) / trace.width(k0);
  const bool plateau = growth < criteria.plateau_growth;
  if (sup_end < eps && plateau && c.r0_final <= 1.0 + criteria.r0_slack) {
    c.outcome = Outcome::Vanishing;
    c.trigger = Trigger::Decayed;
    c.tau = trace.t[last];
    c.reason = "density decayed below threshold with bounded fronts and R0 <= 1 on the final interval";
    return c;
  }
  c.outcome = Outcome::Undecided;
  c.trigger = Trigger::None;
  c.tau = trace.t[last];
  std::ostringstream msg;
  msg << "no criterion fired: sup_I=" << sup_end << ", width growth over last 20%=" << growth
      << ", R0(final)=" << c.r0_final;
  c.reason = msg.str();
  return c;
}

MuStarResult find_mu_star(const ModelParams& params, const CoefficientField& field, const InitialDatum& initial,
                          double mu_lo, double mu_hi, const MuStarOptions& options) {
  params.validate();
  if (!(mu_lo > 0.0) || !(mu_hi > mu_lo)) throw ValidationError("mu bracket must satisfy 0 < mu_lo < mu_hi");
  if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");

  EigenOptions eo = options.criteria.eigen;
  eo.compute_lambda0 = false;
  MuStarResult out;
  out.r0_initial = r0_floquet(field, params.d_I, params.alpha, {params.left0(), params.h0}, eo).value;
  if (out.r0_initial >= 1.0) {
    out.spreading_for_all = true;
    out.mu_star = 0.0;
    out.lo = out.hi = 0.0;
    return out;
  }

  const double base_horizon = options.criteria.horizon > 0.0 ? options.criteria.horizon : 100.0 * field.period();
  auto probe = [&](double mu) {
    ModelParams p = params;
    p.mu = mu;
    double horizon = base_horizon;
    for (int k = 0; k <= options.max_horizon_doublings; ++k, horizon *= 2.0) {
      ++out.probes;
      const auto trace = simulate(p, field, initial, horizon, options.simulate);
      const auto c = classify(trace, field, p, options.criteria, out.r0_initial);
      if (c.outcome != Outcome::Undecided) return c.outcome;
    }
    std::ostringstream msg;
    msg << "classification stays Undecided at mu=" << mu << " up to horizon " << horizon / 2.0;
    throw NumericalError(msg.str());
  };

  if (probe(mu_lo) != Outcome::Vanishing) {
    throw ValidationError("mu bracket: lower end mu=" + std::to_string(mu_lo) + " does not classify as Vanishing");
  }
  if (probe(mu_hi) != Outcome::Spreading) {
    throw ValidationError("mu bracket: upper end mu=" + std::to_string(mu_hi) + " does not classify as Spreading");
  }
  double lo = mu_lo, hi = mu_hi;
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) == Outcome::Spreading) hi = mid; else lo = mid;
  }
  out.lo = lo;
  out.hi = hi;
  out.mu_star = 0.5 * (lo + hi);
  return out;
}

// ---- speeds ----------------------------------------------------------------

namespace {

struct LinearFit {
  double slope = 0.0;
  double residual = 0.0;
};

LinearFit fit_speed(const std::vector<double>& t, const std::vector<double>& pos, std::size_t begin,
                    std::size_t per_period, double period) {
  const std::size_t end = t.size();
  double st = 0.0, sp = 0.0;
  const auto m = static_cast<double>(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    st += t[i];
    sp += pos[i];
  }
  const double tm = st / m, pm = sp / m;
  double num = 0.0, den = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    num += (t[i] - tm) * (pos[i] - pm);
    den += (t[i] - tm) * (t[i] - tm);
  }
  LinearFit fit;
  fit.slope = num / den;
  for (std::size_t i = begin; i + per_period < end; i += per_period) {
    const double v = (pos[i + per_period] - pos[i]) / period;
    fit.residual = std::max(fit.residual, std::abs(v - fit.slope));
  }
  return fit;
}

}  // namespace

FrontSpeeds front_speed_estimate(const SimulationTrace& trace) {
  const double T = trace.period;
  if (trace.size() < 3) throw ValidationError("trace too short for a speed estimate");
  if (trace.horizon() - trace.t.front() < 50.0 * T * (1.0 - 1e-12)) {
    throw ValidationError("speed estimate needs a horizon of at least 50 periods");
  }
  const double spacing = trace.t[1] - trace.t[0];
  const auto per_period = static_cast<std::size_t>(std::max(1.0, std::round(T / spacing)));
  const double t_half = 0.5 * (trace.t.front() + trace.t.back());
  std::size_t begin = 0;
  while (trace.t[begin] < t_half) ++begin;

  std::vector<double> left(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) left[i] = -trace.g[i];
  const double window_period = spacing * static_cast<double>(per_period);
  const auto right_fit = fit_speed(trace.t, trace.h, begin, per_period, window_period);
  const auto left_fit = fit_speed(trace.t, left, begin, per_period, window_period);

  FrontSpeeds out;
  out.speed_right = right_fit.slope;
  out.speed_left = left_fit.slope;
  out.residual_right = right_fit.residual;
  out.residual_left = left_fit.residual;
  out.fit_residual = std::max(right_fit.residual, left_fit.residual);
  if (right_fit.residual > kLinearRegimeTolerance * std::abs(right_fit.slope) ||
      left_fit.residual > kLinearRegimeTolerance * std::abs(left_fit.slope)) {
    throw NumericalError("trace not yet in the linear regime; extend horizon");
  }
  return out;
}

}  // namespace frontlab
