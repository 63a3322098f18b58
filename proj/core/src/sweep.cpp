#include "frontlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "frontlab/csv.hpp"
#include "frontlab/error.hpp"

namespace frontlab {

namespace {

SweepCell evaluate(const ExperimentConfig& cfg, const CoefficientField& field, const std::vector<double>& values) {
  SweepCell cell;
  cell.params = values;
  try {
    ModelParams model = cfg.model;
    InitialDatum initial = cfg.initial;
    for (std::size_t a = 0; a < values.size(); ++a) {
      const auto& name = cfg.sweep.axes[a].name;
      if (name == "mu") model.mu = values[a];
      else if (name == "alpha") model.alpha = values[a];
      else if (name == "h0") model.h0 = values[a];
      else if (name == "amplitude") {
        if (initial.shape == InitialShape::Tabulated) throw ValidationError("amplitude axis needs an analytic initial shape");
        initial.amplitude = values[a];
      }
    }
    const double T = field.period();
    double horizon = cfg.sweep.horizon;
    if (!(horizon > 0.0)) horizon = cfg.classify.horizon > 0.0 ? cfg.classify.horizon : 100.0 * T;
    const auto trace = simulate(model, field, initial, horizon);
    const auto c = classify(trace, field, model, cfg.classify);
    cell.outcome = c.outcome;
    cell.trigger = c.trigger;
    cell.r0f0 = c.r0_initial;
    cell.tau = c.tau;
    if (cfg.sweep.speeds && c.outcome == Outcome::Spreading && horizon >= 50.0 * T) {
      try {
        const auto speeds = front_speed_estimate(trace);
        cell.speed_right = speeds.speed_right;
        cell.speed_left = speeds.speed_left;
      } catch (const NumericalError&) {
        // not yet linear: speeds stay empty
      }
    }
    if (cfg.sweep.h_star) {
      cell.h_star = find_h_star(field, model.d_I, model.alpha, model.left0(), cfg.hstar.tol, cfg.eigen);
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, int workers) {
  if (cfg.sweep.axes.empty()) throw ValidationError("sweep grid is empty");
  SweepResult result;
  result.axes = cfg.sweep.axes;
  std::size_t cells = 1;
  for (const auto& axis : result.axes) {
    if (axis.values.empty()) throw ValidationError("sweep axis '" + axis.name + "' is empty");
    cells *= axis.values.size();
  }
  if (cells > kMaxSweepCells) throw ValidationError("sweep has more than 10000 cells");
  const CoefficientField field = cfg.field.build();

  std::vector<std::vector<double>> grid(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    std::size_t rest = k;
    grid[k].resize(result.axes.size());
    for (std::size_t a = result.axes.size(); a-- > 0;) {
      const auto& vals = result.axes[a].values;
      grid[k][a] = vals[rest % vals.size()];
      rest /= vals.size();
    }
  }

  result.cells.resize(cells);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < cells; k = next++) result.cells[k] = evaluate(cfg, field, grid[k]);
  };
  const auto n = static_cast<std::size_t>(std::clamp(workers, 1, 256));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < std::min(n, cells); ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return result;
}

std::optional<double> mu_boundary(const SweepResult& result) {
  if (result.axes.size() != 1 || result.axes[0].name != "mu") return std::nullopt;
  std::vector<std::pair<double, Outcome>> pts;
  for (const auto& c : result.cells) {
    if (c.error.empty() && c.outcome != Outcome::Undecided) pts.emplace_back(c.params[0], c.outcome);
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i - 1].second == Outcome::Vanishing && pts[i].second == Outcome::Spreading) {
      return 0.5 * (pts[i - 1].first + pts[i].first);
    }
  }
  return std::nullopt;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  for (const auto& axis : result.axes) out << axis.name << ',';
  out << "classification,trigger,R0F0,tau,speed_right,speed_left,h_star,error\n";
  for (const auto& c : result.cells) {
    for (double v : c.params) out << format_number(v) << ',';
    std::string err = c.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out << to_string(c.outcome) << ',' << to_string(c.trigger)
        << ',' << format_number(c.r0f0) << ',' << format_number(c.tau) << ',' << format_number(c.speed_right) << ','
        << format_number(c.speed_left) << ',' << format_number(c.h_star) << ','
        << (err.empty() ? "" : "\"" + err + "\"") << '\n';
  }
}

}  // namespace frontlab
