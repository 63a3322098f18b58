#include "frontlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "frontlab/csv.hpp"
#include "frontlab/error.hpp"
#include "frontlab/sweep.hpp"
#include "json.hpp"

#ifndef FRONTLAB_VERSION
#define FRONTLAB_VERSION "0.0.0"
#endif

namespace frontlab {

using nlohmann::json;

const char* version() { return FRONTLAB_VERSION; }

namespace {

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const RunOptions& opts)
      : cfg_(cfg), opts_(opts), out_dir_(opts.output_dir ? *opts.output_dir : cfg.output_dir),
        field_(cfg.field.build()) {
    report_.task = cfg.task;
  }

  RunReport go() {
    const auto start = std::chrono::steady_clock::now();
    prepare_output();
    check_hypotheses_up_front();
    switch (cfg_.task) {
      case Task::R0: task_r0(); break;
      case Task::Simulate: task_simulate(); break;
      case Task::HStar: task_hstar(); break;
      case Task::MuStar: task_mustar(); break;
      case Task::SemiWave: task_semiwave(); break;
      case Task::Sweep: task_sweep(); break;
    }
    report_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_summary();
    write_manifest();
    return report_;
  }

 private:
  double d() const { return cfg_.model.d_I; }
  double alpha() const { return cfg_.model.alpha; }
  double horizon(double configured) const {
    if (configured > 0.0) return configured;
    return cfg_.classify.horizon > 0.0 ? cfg_.classify.horizon : 100.0 * field_.period();
  }
  std::filesystem::path file(const std::string& name) {
    report_.files.push_back(name);
    return out_dir_ / name;
  }

  void prepare_output() {
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    const auto probe = out_dir_ / ".write_test";
    std::ofstream test(probe);
    if (ec || !test) throw ValidationError("output_dir '" + out_dir_.string() + "' is not writable");
    test.close();
    std::filesystem::remove(probe, ec);
  }

  void check_hypotheses_up_front() {
    const double probe = std::max(2.0 * field_.decay_cutoff(), 50.0);
    try {
      hyp_ = check_hypotheses(field_, d(), alpha(), probe);
    } catch (const ValidationError& e) {
      hyp_.notes = e.what();
    }
    if (!hyp_.h1_satisfied) report_.warnings.push_back("(H1) not satisfied: " + hyp_.notes);
    if (!hyp_.h2_satisfied) report_.warnings.push_back("(H2) not satisfied: " + hyp_.notes);
  }

  void task_r0() {
    const Interval iv = cfg_.r0.interval ? *cfg_.r0.interval : Interval{cfg_.model.left0(), cfg_.model.h0};
    bool first = true;
    bool have_eigenfunction = false;
    for (R0Method m : cfg_.r0.methods) {
      R0Result r;
      if (m == R0Method::ClosedForm) {
        if (!field_.spatially_homogeneous()) throw ValidationError("closed_form needs spatially homogeneous rates");
        r.value = r0_closed_form(d(), alpha(), field_.limit_average(Rate::Beta), field_.limit_average(Rate::Gamma),
                                 iv.length());
        r.method = m;
      } else if (m == R0Method::Floquet) {
        r = r0_floquet(field_, d(), alpha(), iv, cfg_.eigen);
      } else {
        r = r0_variational(field_, d(), alpha(), iv, cfg_.eigen.grid_n);
      }
      const std::string key = std::string("R0_") + to_string(m);
      report_.values[key] = r.value;
      report_.residuals[key] = r.residual;
      if (first) report_.values["R0"] = r.value;
      first = false;
      if (!have_eigenfunction && !r.eigenfunction.values.empty()) {
        write_eigenfunction_csv(file("eigenfunction.csv"), r.eigenfunction);
        have_eigenfunction = true;
      }
      if (!std::isnan(r.lambda0) && !report_.values.count("lambda0")) report_.values["lambda0"] = r.lambda0;
    }
    const auto sb = sandwich_bounds(field_, d(), alpha(), iv, cfg_.eigen.grid_n);
    report_.values["sandwich_lower"] = sb.lower;
    report_.values["sandwich_upper"] = sb.upper;
    report_.values["interval_lo"] = iv.lo;
    report_.values["interval_hi"] = iv.hi;
  }

  void task_simulate() {
    const auto& s = cfg_.simulate;
    const double H = horizon(s.horizon);
    SimulationTrace trace = simulate(cfg_.model, field_, cfg_.initial, H, s.options);
    std::optional<double> r0_initial;
    if (s.r0_series) {
      EigenOptions eo = cfg_.eigen;
      eo.tol = std::min(eo.tol, 1e-8);
      eo.compute_lambda0 = false;
      const std::size_t rows = trace.size();
      const auto count = std::min<std::size_t>(rows, static_cast<std::size_t>(s.r0_samples));
      double prev = -1.0;
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t i = count == 1 ? 0 : j * (rows - 1) / (count - 1);
        const double v = r0_floquet(field_, d(), alpha(), {trace.g[i], trace.h[i]}, eo).value;
        trace.r0f[i] = v;
        if (v < prev - kFrontMonotoneSlack) {
          report_.warnings.push_back("R0F decreased at t=" + format_number(trace.t[i]));
        }
        prev = v;
      }
      r0_initial = trace.r0f.front();
    }
    write_trace_csv(file("trace.csv"), trace);
    if (s.options.keep_profiles) write_profiles_csv(file("profiles.csv"), trace);

    const std::size_t last = trace.size() - 1;
    report_.values["horizon"] = trace.horizon();
    report_.values["g_final"] = trace.g[last];
    report_.values["h_final"] = trace.h[last];
    report_.values["width_final"] = trace.width(last);
    report_.values["sup_I_final"] = trace.sup_I[last];
    if (s.classify) {
      const auto c = classify(trace, field_, cfg_.model, cfg_.classify, r0_initial);
      report_.labels["classification"] = to_string(c.outcome);
      report_.labels["trigger"] = to_string(c.trigger);
      report_.labels["reason"] = c.reason;
      report_.values["R0F0"] = c.r0_initial;
      if (!std::isnan(c.r0_final)) report_.values["R0F_final"] = c.r0_final;
      report_.values["tau"] = c.tau;
      if (s.speeds && c.outcome == Outcome::Spreading && trace.horizon() >= 50.0 * field_.period()) {
        try {
          const auto sp = front_speed_estimate(trace);
          report_.values["speed_right"] = sp.speed_right;
          report_.values["speed_left"] = sp.speed_left;
          report_.residuals["speed_fit"] = sp.fit_residual;
        } catch (const NumericalError& e) {
          report_.warnings.push_back(e.what());
        }
      }
    }
  }

  void task_hstar() {
    const double h = find_h_star(field_, d(), alpha(), cfg_.hstar.anchor, cfg_.hstar.tol, cfg_.eigen);
    report_.values["h_star"] = h;
    try {
      report_.values["far_field_h_star"] = far_field_h_star(field_, d(), alpha());
    } catch (const ValidationError& e) {
      report_.warnings.push_back(e.what());
    }
    EigenOptions eo = cfg_.eigen;
    eo.compute_lambda0 = false;
    const auto r = r0_floquet(field_, d(), alpha(), {cfg_.hstar.anchor, cfg_.hstar.anchor + h}, eo);
    report_.residuals["R0_minus_1"] = std::abs(r.value - 1.0);
  }

  void task_mustar() {
    MuStarOptions mo;
    mo.tol = cfg_.mustar.tol;
    mo.max_horizon_doublings = cfg_.mustar.max_horizon_doublings;
    mo.criteria = cfg_.classify;
    mo.simulate = cfg_.simulate.options;
    const auto r = find_mu_star(cfg_.model, field_, cfg_.initial, cfg_.mustar.mu_lo, cfg_.mustar.mu_hi, mo);
    report_.values["mu_star"] = r.mu_star;
    report_.values["mu_lo"] = r.lo;
    report_.values["mu_hi"] = r.hi;
    report_.values["probes"] = r.probes;
    report_.values["R0F0"] = r.r0_initial;
    report_.labels["spreading_for_all"] = r.spreading_for_all ? "true" : "false";
    report_.residuals["bracket"] = r.hi - r.lo;
  }

  void task_semiwave() {
    const auto coeffs = SemiWaveCoefficients::from_field(field_, cfg_.model.n_star);
    const auto& sw = cfg_.semiwave;
    const double mu = cfg_.model.mu;
    const auto right = semiwave(d(), alpha(), coeffs, mu, sw.tol, sw.options);
    write_semiwave_profile_csv(file("semiwave_profile.csv"), right);
    write_semiwave_speed_csv(file("semiwave_speed.csv"), right);
    report_.values["k_bar"] = right.k_bar;
    report_.residuals["compatibility"] = right.residual;
    report_.values["iterations"] = right.iterations;
    if (sw.ordering) {
      const double a = std::abs(alpha());
      const auto o = speed_ordering(d(), coeffs, mu, a, sw.tol, sw.options);
      report_.values["k_minus"] = o.k_minus;
      report_.values["k_zero"] = o.k_zero;
      report_.values["k_plus"] = o.k_plus;
      const double cap = 2.0 * std::sqrt(d() * coeffs.mean_a());
      report_.values["cap_plus"] = cap + a;
      report_.values["cap_minus"] = cap - a;
    }
  }

  void task_sweep() {
    const auto result = run_sweep(cfg_, opts_.workers);
    write_sweep_csv(file("sweep.csv"), result);
    int spreading = 0, vanishing = 0, undecided = 0, errors = 0;
    for (const auto& c : result.cells) {
      if (!c.error.empty()) ++errors;
      if (c.outcome == Outcome::Spreading) ++spreading;
      else if (c.outcome == Outcome::Vanishing) ++vanishing;
      else ++undecided;
    }
    report_.values["cells"] = static_cast<double>(result.cells.size());
    report_.values["spreading"] = spreading;
    report_.values["vanishing"] = vanishing;
    report_.values["undecided"] = undecided;
    report_.values["errors"] = errors;
    if (auto mu = mu_boundary(result)) report_.values["mu_boundary"] = *mu;
    if (errors > 0) report_.warnings.push_back(std::to_string(errors) + " sweep cell(s) failed; see the error column");
  }

  static json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

  void write_json(const std::string& name, const json& j) {
    std::ofstream out(file(name), std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + (out_dir_ / name).string() + "'");
    out << j.dump(2) << '\n';
  }

  void write_summary() {
    json j;
    j["task"] = to_string(report_.task);
    j["values"] = json::object();
    for (const auto& [k, v] : report_.values) j["values"][k] = number_or_null(v);
    j["residuals"] = json::object();
    for (const auto& [k, v] : report_.residuals) j["residuals"][k] = number_or_null(v);
    j["labels"] = report_.labels;
    j["warnings"] = report_.warnings;
    j["wall_time_s"] = report_.wall_time_s;
    write_json("summary.json", j);
  }

  void write_manifest() {
    json j;
    j["version"] = version();
    j["task"] = to_string(cfg_.task);
    j["seed"] = cfg_.seed;
    j["config"] = json::parse(cfg_.source, nullptr, false);
    const auto& m = cfg_.model;
    j["resolved"]["model"] = {{"d_I", m.d_I}, {"alpha", m.alpha}, {"mu", m.mu}, {"N_star", m.n_star},
                              {"h0", m.h0}, {"g0", m.left0()}, {"grid_n", m.grid_n}, {"dt", m.dt}};
    const auto& e = cfg_.eigen;
    j["resolved"]["eigen"] = {{"grid_n", e.grid_n}, {"steps_per_period", e.steps_per_period}, {"tol", e.tol},
                              {"krylov_dim", e.krylov_dim}, {"max_restarts", e.max_restarts}};
    const auto& c = cfg_.classify;
    j["resolved"]["classify"] = {{"eps_vanish", c.eps_vanish}, {"plateau_growth", c.plateau_growth},
                                 {"r0_slack", c.r0_slack}, {"horizon", horizon(0.0)}};
    if (c.width_spread) j["resolved"]["classify"]["width_spread"] = *c.width_spread;
    j["resolved"]["tolerances"] = {{"hstar", cfg_.hstar.tol}, {"mustar", cfg_.mustar.tol},
                                   {"semiwave", cfg_.semiwave.tol}, {"bound_slack", kBoundSlack},
                                   {"h1_relative", kH1RelativeTolerance},
                                   {"linear_regime", kLinearRegimeTolerance}};
    j["resolved"]["semiwave"] = {{"length", cfg_.semiwave.options.length},
                                 {"grid_n", cfg_.semiwave.options.grid_n},
                                 {"steps_per_period", cfg_.semiwave.options.steps_per_period},
                                 {"theta", cfg_.semiwave.options.theta}};
    j["hypotheses"] = {{"h1_satisfied", hyp_.h1_satisfied}, {"h1_residual", number_or_null(hyp_.h1_residual)},
                       {"h2_satisfied", hyp_.h2_satisfied}, {"h2_margin", number_or_null(hyp_.h2_margin)}};
    j["workers"] = opts_.workers;
    j["wall_time_s"] = report_.wall_time_s;
    report_.files.push_back("manifest.json");
    j["files"] = report_.files;
    report_.files.pop_back();
    write_json("manifest.json", j);
  }

  const ExperimentConfig& cfg_;
  RunOptions opts_;
  std::filesystem::path out_dir_;
  CoefficientField field_;
  HypothesisReport hyp_{};
  RunReport report_{};
};

}  // namespace

RunReport run(const ExperimentConfig& config, const RunOptions& options) {
  if (options.workers < 1) throw ValidationError("workers must be at least 1");
  return Runner(config, options).go();
}

}  // namespace frontlab
