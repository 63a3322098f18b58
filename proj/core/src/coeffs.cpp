#include "frontlab/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "frontlab/error.hpp"

namespace frontlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_time(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  return r;
}

double analytic_value(const RateParams& p, double x, double t, double period) {
  const double theta = kTwoPi * reduce_time(t, period) / period;
  double v = p.b0 + p.b1 * std::cos(theta + p.phase);
  if (p.amplitude != 0.0) {
    const double z = x / p.sigma;
    v += p.amplitude * std::exp(-z * z) * (1.0 + p.rho * std::cos(theta));
  }
  return v;
}

double analytic_limit(const RateParams& p, double t, double period) {
  const double theta = kTwoPi * reduce_time(t, period) / period;
  return p.b0 + p.b1 * std::cos(theta + p.phase);
}

// For fixed Gaussian weight w in [0,1] the profile is
//   b0 + A*w + Re[(b1*e^{i*phase} + A*rho*w) * e^{i*theta}],
// whose range over theta is b0 + A*w -+ |b1*e^{i*phase} + A*rho*w|.
// The upper envelope is convex and the lower one concave in w, so the
// extremes over w sit at w = 0 or w = 1.
RateBounds analytic_bounds(const RateParams& p) {
  const std::complex<double> z0 = std::polar(p.b1, p.phase);
  const std::complex<double> z1 = z0 + p.amplitude * p.rho;
  const double lo0 = p.b0 - std::abs(z0);
  const double hi0 = p.b0 + std::abs(z0);
  const double lo1 = p.b0 + p.amplitude - std::abs(z1);
  const double hi1 = p.b0 + p.amplitude + std::abs(z1);
  return {std::min(lo0, lo1), std::max(hi0, hi1)};
}

bool rows_equal(const RateTable& tab, std::size_t a, std::size_t b, double tol) {
  const std::size_t nx = tab.xs.size();
  for (std::size_t ix = 0; ix < nx; ++ix) {
    if (std::abs(tab.beta[a * nx + ix] - tab.beta[b * nx + ix]) > tol) return false;
    if (std::abs(tab.gamma[a * nx + ix] - tab.gamma[b * nx + ix]) > tol) return false;
  }
  return true;
}

const char* rate_name(Rate which) { return which == Rate::Beta ? "beta" : "gamma"; }

}  // namespace

const char* to_string(FieldFamily family) {
  switch (family) {
    case FieldFamily::Constant: return "constant";
    case FieldFamily::TimePeriodic: return "time_periodic";
    case FieldFamily::SpaceOnly: return "space_only";
    case FieldFamily::SeparableBump: return "separable_bump";
    case FieldFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

FieldFamily parse_family(const std::string& name) {
  for (auto f : {FieldFamily::Constant, FieldFamily::TimePeriodic, FieldFamily::SpaceOnly,
                 FieldFamily::SeparableBump, FieldFamily::Tabulated}) {
    if (name == to_string(f)) return f;
  }
  throw ValidationError("unknown coefficient family '" + name + "'");
}

CoefficientField CoefficientField::constant(double beta, double gamma, double period) {
  CoefficientField f;
  f.family_ = FieldFamily::Constant;
  f.period_ = period;
  f.beta_params_ = RateParams{.b0 = beta};
  f.gamma_params_ = RateParams{.b0 = gamma};
  f.validate_and_bound();
  return f;
}

CoefficientField CoefficientField::time_periodic(double period, const RateParams& beta, const RateParams& gamma) {
  CoefficientField f;
  f.family_ = FieldFamily::TimePeriodic;
  f.period_ = period;
  f.beta_params_ = beta;
  f.gamma_params_ = gamma;
  f.validate_and_bound();
  return f;
}

CoefficientField CoefficientField::space_only(const RateParams& beta, const RateParams& gamma, double period) {
  CoefficientField f;
  f.family_ = FieldFamily::SpaceOnly;
  f.period_ = period;
  f.beta_params_ = beta;
  f.gamma_params_ = gamma;
  f.validate_and_bound();
  return f;
}

CoefficientField CoefficientField::separable_bump(double period, const RateParams& beta, const RateParams& gamma) {
  CoefficientField f;
  f.family_ = FieldFamily::SeparableBump;
  f.period_ = period;
  f.beta_params_ = beta;
  f.gamma_params_ = gamma;
  f.validate_and_bound();
  return f;
}

CoefficientField CoefficientField::tabulated(double period, RateTable table, TableExtension extension) {
  CoefficientField f;
  f.family_ = FieldFamily::Tabulated;
  f.period_ = period;
  f.table_ = std::move(table);
  f.extension_ = extension;
  f.validate_and_bound();
  return f;
}

CoefficientField CoefficientField::load_csv(const std::filesystem::path& path, double period,
                                            TableExtension extension) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open coefficient table '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("coefficient table '" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,t,beta,gamma") {
    throw ValidationError("coefficient table '" + path.string() + "': expected header 'x,t,beta,gamma', got '" +
                          line + "'");
  }
  struct Row { double x, t, beta, gamma; };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    Row r{};
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> r.x >> c1 >> r.t >> c2 >> r.beta >> c3 >> r.gamma) || c1 != ',' || c2 != ',' || c3 != ',') {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
    }
    rows.push_back(r);
  }
  std::vector<double> xs, ts;
  for (const auto& r : rows) {
    xs.push_back(r.x);
    ts.push_back(r.t);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  RateTable tab;
  tab.xs = xs;
  tab.ts = ts;
  tab.beta.assign(xs.size() * ts.size(), std::nan(""));
  tab.gamma.assign(xs.size() * ts.size(), std::nan(""));
  for (const auto& r : rows) {
    const auto ix = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), r.x) - xs.begin());
    const auto it = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), r.t) - ts.begin());
    tab.beta[it * xs.size() + ix] = r.beta;
    tab.gamma[it * xs.size() + ix] = r.gamma;
  }
  for (std::size_t i = 0; i < tab.beta.size(); ++i) {
    if (std::isnan(tab.beta[i])) {
      throw ValidationError("coefficient table '" + path.string() + "' is not a full regular grid: missing (x=" +
                            std::to_string(xs[i % xs.size()]) + ", t=" + std::to_string(ts[i / xs.size()]) + ")");
    }
  }
  return tabulated(period, std::move(tab), extension);
}

void CoefficientField::validate_and_bound() {
  if (!(period_ > 0.0) || !std::isfinite(period_)) throw ValidationError("period must be positive");

  if (family_ == FieldFamily::Tabulated) {
    auto& tab = table_;
    const std::size_t nx = tab.xs.size();
    if (nx < 2) throw ValidationError("tabulated field needs at least two x nodes");
    if (tab.ts.empty()) throw ValidationError("tabulated field needs at least one t node");
    if (tab.beta.size() != nx * tab.ts.size() || tab.gamma.size() != nx * tab.ts.size()) {
      throw ValidationError("tabulated field: value arrays do not match the (x,t) grid");
    }
    for (std::size_t i = 1; i < nx; ++i) {
      if (!(tab.xs[i] > tab.xs[i - 1])) throw ValidationError("tabulated field: x nodes must be strictly increasing");
    }
    for (std::size_t i = 1; i < tab.ts.size(); ++i) {
      if (!(tab.ts[i] > tab.ts[i - 1])) throw ValidationError("tabulated field: t nodes must be strictly increasing");
    }
    // A closing row at t = T must repeat t = 0; it is then dropped.
    if (tab.ts.size() > 1 && std::abs(tab.ts.back() - period_) <= 1e-12 * period_) {
      if (std::abs(tab.ts.front()) > 1e-12 * period_ || !rows_equal(tab, 0, tab.ts.size() - 1, 1e-9)) {
        throw ValidationError("tabulated field: row at t=T must repeat the row at t=0");
      }
      tab.ts.pop_back();
      tab.beta.resize(nx * tab.ts.size());
      tab.gamma.resize(nx * tab.ts.size());
    }
    if (tab.ts.front() < 0.0 || tab.ts.back() >= period_) {
      throw ValidationError("tabulated field: t nodes must lie in [0, T)");
    }
    auto [bmin, bmax] = std::minmax_element(tab.beta.begin(), tab.beta.end());
    auto [gmin, gmax] = std::minmax_element(tab.gamma.begin(), tab.gamma.end());
    beta_bounds_ = {*bmin, *bmax};
    gamma_bounds_ = {*gmin, *gmax};
  } else {
    for (Rate which : {Rate::Beta, Rate::Gamma}) {
      const RateParams& p = params(which);
      const std::string name = rate_name(which);
      if (!(p.sigma > 0.0)) throw ValidationError(name + ".sigma must be positive");
      switch (family_) {
        case FieldFamily::Constant:
          if (p.b1 != 0.0 || p.amplitude != 0.0) {
            throw ValidationError(name + ": constant family takes only b0");
          }
          break;
        case FieldFamily::TimePeriodic:
          if (p.amplitude != 0.0) throw ValidationError(name + ": time_periodic family has no spatial bump");
          break;
        case FieldFamily::SpaceOnly:
          if (p.b1 != 0.0 || p.rho != 0.0) throw ValidationError(name + ": space_only family is time independent");
          break;
        default:
          break;
      }
    }
    beta_bounds_ = analytic_bounds(beta_params_);
    gamma_bounds_ = analytic_bounds(gamma_params_);
  }
  if (!(beta_bounds_.lo > 0.0)) throw ValidationError("beta must be bounded below by a positive constant");
  if (!(gamma_bounds_.lo > 0.0)) throw ValidationError("gamma must be bounded below by a positive constant");
}

double CoefficientField::eval_table(const std::vector<double>& values, double x, double t) const {
  const auto& xs = table_.xs;
  const auto& ts = table_.ts;
  const std::size_t nx = xs.size();
  if (x < xs.front() || x > xs.back()) {
    if (extension_ == TableExtension::None) {
      std::ostringstream msg;
      msg << "tabulated field queried at x=" << x << " outside its table [" << xs.front() << ", " << xs.back()
          << "] and no extension rule is set";
      throw ValidationError(msg.str());
    }
    x = std::clamp(x, xs.front(), xs.back());
  }
  auto hi = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t ix = hi == xs.end() ? nx - 2 : static_cast<std::size_t>(hi - xs.begin()) - 1;
  ix = std::min(ix, nx - 2);
  const double wx = (x - xs[ix]) / (xs[ix + 1] - xs[ix]);

  auto row_value = [&](std::size_t it) {
    return (1.0 - wx) * values[it * nx + ix] + wx * values[it * nx + ix + 1];
  };
  const std::size_t nt = ts.size();
  if (nt == 1) return row_value(0);

  const double tr = reduce_time(t, period_);
  std::size_t it0, it1;
  double t0, t1;
  if (tr < ts.front()) {
    it0 = nt - 1; it1 = 0; t0 = ts.back() - period_; t1 = ts.front();
  } else if (tr >= ts.back()) {
    it0 = nt - 1; it1 = 0; t0 = ts.back(); t1 = ts.front() + period_;
  } else {
    auto up = std::upper_bound(ts.begin(), ts.end(), tr);
    it1 = static_cast<std::size_t>(up - ts.begin());
    it0 = it1 - 1;
    t0 = ts[it0]; t1 = ts[it1];
  }
  const double wt = (tr - t0) / (t1 - t0);
  return (1.0 - wt) * row_value(it0) + wt * row_value(it1);
}

double CoefficientField::eval(Rate which, double x, double t) const {
  if (family_ == FieldFamily::Tabulated) {
    return eval_table(which == Rate::Beta ? table_.beta : table_.gamma, x, t);
  }
  return analytic_value(params(which), x, t, period_);
}

double CoefficientField::limit(Rate which, double t) const {
  if (family_ == FieldFamily::Tabulated) {
    // The right table edge carries the far-field value; the hypothesis check
    // compares it with the left edge.
    const auto& values = which == Rate::Beta ? table_.beta : table_.gamma;
    CoefficientField clamped = *this;
    clamped.extension_ = TableExtension::Constant;
    return clamped.eval_table(values, table_.xs.back(), t);
  }
  return analytic_limit(params(which), t, period_);
}

double CoefficientField::limit_average(Rate which) const {
  return periodic_average([&](double t) { return limit(which, t); }, period_);
}

double CoefficientField::decay_cutoff() const {
  if (family_ == FieldFamily::Tabulated) return std::max(std::abs(table_.xs.front()), std::abs(table_.xs.back()));
  return 0.0;
}

bool CoefficientField::time_independent() const {
  if (family_ == FieldFamily::Tabulated) {
    for (std::size_t it = 1; it < table_.ts.size(); ++it) {
      if (!rows_equal(table_, 0, it, 0.0)) return false;
    }
    return true;
  }
  for (const RateParams* p : {&beta_params_, &gamma_params_}) {
    if (p->b1 != 0.0) return false;
    if (p->amplitude != 0.0 && p->rho != 0.0) return false;
  }
  return true;
}

bool CoefficientField::spatially_homogeneous() const {
  if (family_ == FieldFamily::Tabulated) {
    const std::size_t nx = table_.xs.size();
    for (std::size_t it = 0; it < table_.ts.size(); ++it) {
      for (std::size_t ix = 1; ix < nx; ++ix) {
        if (table_.beta[it * nx + ix] != table_.beta[it * nx]) return false;
        if (table_.gamma[it * nx + ix] != table_.gamma[it * nx]) return false;
      }
    }
    return true;
  }
  return beta_params_.amplitude == 0.0 && gamma_params_.amplitude == 0.0;
}

CoefficientField CoefficientField::scaled(double beta_factor, double gamma_factor) const {
  if (!(beta_factor > 0.0) || !(gamma_factor > 0.0)) throw ValidationError("scale factors must be positive");
  CoefficientField out = *this;
  if (family_ == FieldFamily::Tabulated) {
    for (auto& v : out.table_.beta) v *= beta_factor;
    for (auto& v : out.table_.gamma) v *= gamma_factor;
  } else {
    for (auto [p, s] : {std::pair{&out.beta_params_, beta_factor}, std::pair{&out.gamma_params_, gamma_factor}}) {
      p->b0 *= s;
      p->b1 *= s;
      p->amplitude *= s;
    }
  }
  out.validate_and_bound();
  return out;
}

double periodic_average(const std::function<double(double)>& f, double period, int nodes) {
  if (nodes < 1) throw ValidationError("quadrature needs at least one node");
  // For a periodic integrand the composite trapezoid rule reduces to the
  // plain mean over equispaced nodes.
  double sum = 0.0;
  for (int j = 0; j < nodes; ++j) sum += f(period * j / nodes);
  return sum / nodes;
}

HypothesisReport check_hypotheses(const CoefficientField& field, double d, double alpha, double probe) {
  if (!(d > 0.0)) throw ValidationError("d_I must be positive");
  if (!(probe > 0.0)) throw ValidationError("probe distance must be positive");

  HypothesisReport report;
  std::ostringstream notes;
  const double T = field.period();

  report.mean_net_growth = periodic_average(
      [&](double t) { return field.limit(Rate::Beta, t) - field.limit(Rate::Gamma, t); }, T);
  if (report.mean_net_growth > 0.0) {
    report.h2_margin = 2.0 * std::sqrt(d * report.mean_net_growth) - std::abs(alpha);
    report.h2_satisfied = report.h2_margin > 0.0;
    if (!report.h2_satisfied) notes << "H2 fails: advection too strong for the far-field net growth. ";
  } else {
    report.h2_margin = -std::abs(alpha);
    report.h2_satisfied = false;
    notes << "H2 fails: mean far-field net growth " << report.mean_net_growth << " is not positive. ";
  }

  const double scale = std::max(field.bounds(Rate::Beta).hi, field.bounds(Rate::Gamma).hi);
  try {
    double residual = 0.0;
    constexpr int kNodes = 256;
    for (int j = 0; j < kNodes; ++j) {
      const double t = T * j / kNodes;
      for (Rate which : {Rate::Beta, Rate::Gamma}) {
        const double lim = field.limit(which, t);
        residual = std::max(residual, std::abs(field.eval(which, probe, t) - lim));
        residual = std::max(residual, std::abs(field.eval(which, -probe, t) - lim));
      }
    }
    report.h1_residual = residual;
    report.h1_satisfied = residual <= kH1RelativeTolerance * scale;
    if (!report.h1_satisfied) notes << "H1 fails at probe " << probe << ": residual " << residual << ". ";
  } catch (const ValidationError& e) {
    report.h1_residual = std::numeric_limits<double>::infinity();
    report.h1_satisfied = false;
    notes << "H1 not checkable: " << e.what() << ". ";
  }
  report.notes = notes.str();
  return report;
}

}  // namespace frontlab
