#pragma once

// Time-periodic, spatially heterogeneous transmission (beta) and recovery
// (gamma) rates, plus checks of the far-field and small-advection hypotheses.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace frontlab {

enum class FieldFamily { Constant, TimePeriodic, SpaceOnly, SeparableBump, Tabulated };

enum class Rate { Beta, Gamma };

const char* to_string(FieldFamily family);
FieldFamily parse_family(const std::string& name);

/// Parameters of the analytic rate profile
///
///   r(x,t) = b0 + b1*cos(2*pi*t/T + phase)
///              + amplitude*exp(-(x/sigma)^2)*(1 + rho*cos(2*pi*t/T)).
///
/// Every analytic family is a restriction of this form: Constant has
/// b1 = amplitude = 0, TimePeriodic has amplitude = 0, SpaceOnly has
/// b1 = rho = 0. The far-field limit is r_inf(t) = b0 + b1*cos(2*pi*t/T + phase).
struct RateParams {
  double b0 = 1.0;
  double b1 = 0.0;
  double phase = 0.0;
  double amplitude = 0.0;
  double sigma = 1.0;
  double rho = 0.0;
};

struct RateBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// How a Tabulated field answers queries beyond its x-range.
enum class TableExtension { Constant, None };

/// Regular (x, t) table for both rates. Rows are time levels covering one
/// period [0, T); interpolation is bilinear and wraps periodically in t.
struct RateTable {
  std::vector<double> xs;
  std::vector<double> ts;
  std::vector<double> beta;   // row-major: beta[it * xs.size() + ix]
  std::vector<double> gamma;  // same layout
};

class CoefficientField {
 public:
  static CoefficientField constant(double beta, double gamma, double period = 1.0);
  static CoefficientField time_periodic(double period, const RateParams& beta, const RateParams& gamma);
  static CoefficientField space_only(const RateParams& beta, const RateParams& gamma, double period = 1.0);
  static CoefficientField separable_bump(double period, const RateParams& beta, const RateParams& gamma);
  static CoefficientField tabulated(double period, RateTable table,
                                    TableExtension extension = TableExtension::Constant);

  /// Loads a CSV with header `x,t,beta,gamma` on a full regular grid (any row order).
  static CoefficientField load_csv(const std::filesystem::path& path, double period,
                                   TableExtension extension = TableExtension::Constant);

  double eval(Rate which, double x, double t) const;
  double beta(double x, double t) const { return eval(Rate::Beta, x, t); }
  double gamma(double x, double t) const { return eval(Rate::Gamma, x, t); }

  /// Far-field limit beta_inf(t) or gamma_inf(t).
  double limit(Rate which, double t) const;

  /// (1/T) * integral over one period of the far-field limit.
  double limit_average(Rate which) const;

  FieldFamily family() const { return family_; }
  double period() const { return period_; }
  RateBounds bounds(Rate which) const { return which == Rate::Beta ? beta_bounds_ : gamma_bounds_; }

  /// Beyond this |x| the distance to the far-field limit decreases monotonically.
  double decay_cutoff() const;

  bool time_independent() const;
  bool spatially_homogeneous() const;

  /// Pointwise rescaling of both rates (used by comparison / monotonicity studies).
  CoefficientField scaled(double beta_factor, double gamma_factor) const;

  const RateParams& params(Rate which) const { return which == Rate::Beta ? beta_params_ : gamma_params_; }
  const RateTable* table() const { return family_ == FieldFamily::Tabulated ? &table_ : nullptr; }
  TableExtension extension() const { return extension_; }

 private:
  CoefficientField() = default;
  void validate_and_bound();
  double eval_table(const std::vector<double>& values, double x, double t) const;

  FieldFamily family_ = FieldFamily::Constant;
  double period_ = 1.0;
  RateParams beta_params_{};
  RateParams gamma_params_{};
  RateTable table_{};
  TableExtension extension_ = TableExtension::Constant;
  RateBounds beta_bounds_{};
  RateBounds gamma_bounds_{};
};

/// Composite trapezoid average (1/T) * int_0^T f(t) dt with `nodes` equal panels.
double periodic_average(const std::function<double(double)>& f, double period, int nodes = 256);

struct HypothesisReport {
  bool h1_satisfied = false;
  double h1_residual = 0.0;  // max over t of |r(+-X,t) - r_inf(t)| for both rates
  bool h2_satisfied = false;
  double h2_margin = 0.0;    // 2*sqrt(d * mean(beta_inf - gamma_inf)) - alpha
  double mean_net_growth = 0.0;
  std::string notes;
};

/// Default tolerance for the sampled far-field residual, relative to max(beta2, gamma2).
inline constexpr double kH1RelativeTolerance = 1e-3;

HypothesisReport check_hypotheses(const CoefficientField& field, double d, double alpha, double probe);

}  // namespace frontlab
