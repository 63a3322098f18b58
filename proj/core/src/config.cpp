#include "frontlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "frontlab/error.hpp"
#include "json.hpp"

namespace frontlab {

using nlohmann::json;

const char* to_string(Task task) {
  switch (task) {
    case Task::R0: return "r0";
    case Task::Simulate: return "simulate";
    case Task::HStar: return "hstar";
    case Task::MuStar: return "mustar";
    case Task::SemiWave: return "semiwave";
    case Task::Sweep: return "sweep";
  }
  return "unknown";
}

Task parse_task(const std::string& name) {
  for (auto t : {Task::R0, Task::Simulate, Task::HStar, Task::MuStar, Task::SemiWave, Task::Sweep}) {
    if (name == to_string(t)) return t;
  }
  throw ValidationError("unknown task '" + name + "'");
}

CoefficientField FieldSpec::build() const {
  switch (family) {
    case FieldFamily::Constant: return CoefficientField::constant(beta.b0, gamma.b0, period);
    case FieldFamily::TimePeriodic: return CoefficientField::time_periodic(period, beta, gamma);
    case FieldFamily::SpaceOnly: return CoefficientField::space_only(beta, gamma, period);
    case FieldFamily::SeparableBump: return CoefficientField::separable_bump(period, beta, gamma);
    case FieldFamily::Tabulated: return CoefficientField::load_csv(table, period, extension);
  }
  throw ValidationError("unknown field family");
}

namespace {

const char* type_name(const json& j) { return j.type_name(); }

// Object view that tracks consumed keys so leftovers can be rejected.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected object, got " + std::string(type_name(j_)));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    return as_number(*v, at(key));
  }

  std::optional<double> opt_number(const std::string& key) {
    const json* v = raw(key);
    if (!v || v->is_null()) return std::nullopt;
    return as_number(*v, at(key));
  }

  int integer(const std::string& key, int fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(at(key), "expected integer, got " + std::string(type_name(*v)));
    return v->get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(at(key), "expected boolean, got " + std::string(type_name(*v)));
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(at(key), "expected string, got " + std::string(type_name(*v)));
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = raw(key);
    if (!v) return {};
    return as_numbers(*v, at(key));
  }

  std::optional<Node> child(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    return Node(*v, at(key));
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }
  }

  const json& value() const { return j_; }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ValidationError("config key '" + path + "': " + what);
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected number, got " + std::string(type_name(v)));
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  static std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected array of numbers, got " + std::string(type_name(v)));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto guarded(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError("config key '" + path + "': " + e.what());
  }
}

RateParams parse_rate(Node& node, RateParams p) {
  p.b0 = node.number("b0", p.b0);
  p.b1 = node.number("b1", p.b1);
  p.phase = node.number("phase", p.phase);
  p.amplitude = node.number("amplitude", p.amplitude);
  p.sigma = node.number("sigma", p.sigma);
  p.rho = node.number("rho", p.rho);
  node.finish();
  return p;
}

void parse_field(Node& node, FieldSpec& f, const std::filesystem::path& base) {
  const auto family = node.string("family", to_string(f.family));
  f.family = guarded(node.at("family"), [&] { return parse_family(family); });
  f.period = node.number("period", f.period);
  if (auto b = node.child("beta")) f.beta = parse_rate(*b, f.beta);
  if (auto g = node.child("gamma")) f.gamma = parse_rate(*g, f.gamma);
  const auto table = node.string("table", "");
  if (!table.empty()) f.table = base / table;
  const auto ext = node.string("extension", "constant");
  if (ext == "constant") f.extension = TableExtension::Constant;
  else if (ext == "none") f.extension = TableExtension::None;
  else Node::fail(node.at("extension"), "expected 'constant' or 'none'");
  if (f.family == FieldFamily::Tabulated && f.table.empty()) Node::fail(node.at("table"), "required for tabulated fields");
  node.finish();
}

void parse_model(Node& node, ModelParams& m) {
  m.d_I = node.number("d_I", m.d_I);
  m.alpha = node.number("alpha", m.alpha);
  m.mu = node.number("mu", m.mu);
  m.n_star = node.number("N_star", m.n_star);
  m.h0 = node.number("h0", m.h0);
  m.g0 = node.opt_number("g0");
  m.grid_n = node.integer("grid_n", m.grid_n);
  m.dt = node.number("dt", m.dt);
  node.finish();
}

void parse_initial(Node& node, InitialDatum& init, const std::filesystem::path& base) {
  const auto shape = node.string("shape", to_string(init.shape));
  init.shape = guarded(node.at("shape"), [&] { return parse_initial_shape(shape); });
  init.amplitude = node.number("amplitude", init.amplitude);
  const auto table = node.string("table", "");
  if (init.shape == InitialShape::Tabulated) {
    if (table.empty()) Node::fail(node.at("table"), "required for tabulated initial data");
    init = guarded(node.at("table"), [&] { return load_initial_csv((base / table).string()); });
  } else if (!table.empty()) {
    Node::fail(node.at("table"), "only valid with shape 'tabulated'");
  }
  node.finish();
}

void parse_eigen(Node& node, EigenOptions& e) {
  e.grid_n = node.integer("grid_n", e.grid_n);
  e.steps_per_period = node.integer("steps_per_period", e.steps_per_period);
  e.tol = node.number("tol", e.tol);
  e.krylov_dim = node.integer("krylov_dim", e.krylov_dim);
  e.max_restarts = node.integer("max_restarts", e.max_restarts);
  e.max_outer = node.integer("max_outer", e.max_outer);
  node.finish();
}

void parse_classify(Node& node, ClassifyCriteria& c) {
  c.eps_vanish = node.number("eps_vanish", c.eps_vanish);
  c.width_spread = node.opt_number("width_spread");
  c.horizon = node.number("horizon", c.horizon);
  c.plateau_growth = node.number("plateau_growth", c.plateau_growth);
  c.r0_slack = node.number("r0_slack", c.r0_slack);
  node.finish();
}

void parse_r0(Node& node, R0Settings& r) {
  if (node.has("interval")) {
    const auto iv = node.numbers("interval");
    if (iv.size() != 2) Node::fail(node.at("interval"), "expected [lo, hi]");
    r.interval = Interval{iv[0], iv[1]};
  }
  if (const json* m = node.raw("methods")) {
    if (!m->is_array() || m->empty()) Node::fail(node.at("methods"), "expected non-empty array of method names");
    r.methods.clear();
    for (std::size_t i = 0; i < m->size(); ++i) {
      const auto path = node.at("methods") + "[" + std::to_string(i) + "]";
      if (!(*m)[i].is_string()) Node::fail(path, "expected string");
      const auto name = (*m)[i].get<std::string>();
      if (name == "closed_form") r.methods.push_back(R0Method::ClosedForm);
      else if (name == "floquet") r.methods.push_back(R0Method::Floquet);
      else if (name == "variational") r.methods.push_back(R0Method::Variational);
      else Node::fail(path, "unknown method '" + name + "'");
    }
  }
  node.finish();
}

void parse_simulate(Node& node, SimulateSettings& s) {
  s.horizon = node.number("horizon", s.horizon);
  s.options.sample_interval = node.number("sample_interval", s.options.sample_interval);
  s.options.keep_profiles = node.boolean("keep_profiles", s.options.keep_profiles);
  s.classify = node.boolean("classify", s.classify);
  s.r0_series = node.boolean("r0_series", s.r0_series);
  s.r0_samples = node.integer("r0_samples", s.r0_samples);
  s.speeds = node.boolean("speeds", s.speeds);
  node.finish();
}

void parse_semiwave(Node& node, SemiWaveSettings& s) {
  s.tol = node.number("tol", s.tol);
  s.ordering = node.boolean("ordering", s.ordering);
  s.options.length = node.number("length", s.options.length);
  s.options.grid_n = node.integer("grid_n", s.options.grid_n);
  s.options.steps_per_period = node.integer("steps_per_period", s.options.steps_per_period);
  s.options.snapshots_per_period = node.integer("snapshots_per_period", s.options.snapshots_per_period);
  s.options.profile_points = node.integer("profile_points", s.options.profile_points);
  s.options.theta = node.number("theta", s.options.theta);
  s.options.max_iterations = node.integer("max_iterations", s.options.max_iterations);
  node.finish();
}

std::vector<double> parse_axis_values(const json& v, const std::string& path) {
  if (v.is_array()) return Node::as_numbers(v, path);
  Node range(v, path);
  const double from = range.number("from", std::nan(""));
  const double to = range.number("to", std::nan(""));
  const int count = range.integer("count", 0);
  range.finish();
  if (std::isnan(from) || std::isnan(to)) Node::fail(path, "range needs 'from' and 'to'");
  if (count < 1) Node::fail(path + ".count", "expected a positive integer");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
  return out;
}

void parse_sweep(Node& node, SweepSettings& s) {
  if (auto axes = node.child("axes")) {
    for (const char* name : {"mu", "alpha", "h0", "amplitude"}) {
      if (const json* v = axes->raw(name)) s.axes.push_back({name, parse_axis_values(*v, axes->at(name))});
    }
    axes->finish();
  }
  s.horizon = node.number("horizon", s.horizon);
  s.speeds = node.boolean("speeds", s.speeds);
  s.h_star = node.boolean("h_star", s.h_star);
  node.finish();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              std::optional<Task> expected) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.source = text;
  Node node(root, "");
  if (!node.has("task") && !expected) Node::fail("task", "required");
  const auto task = node.string("task", expected ? to_string(*expected) : "");
  cfg.task = guarded("task", [&] { return parse_task(task); });
  if (expected && cfg.task != *expected) {
    Node::fail("task", "'" + task + "' does not match the requested task '" + to_string(*expected) + "'");
  }
  cfg.output_dir = node.string("output_dir", cfg.output_dir.string());
  if (const json* seed = node.raw("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0)) {
      Node::fail("seed", "expected non-negative integer, got " + std::string(type_name(*seed)));
    }
    cfg.seed = seed->get<unsigned long long>();
  }
  if (auto n = node.child("model")) parse_model(*n, cfg.model);
  if (auto n = node.child("field")) parse_field(*n, cfg.field, base_dir);
  if (auto n = node.child("initial")) parse_initial(*n, cfg.initial, base_dir);
  if (auto n = node.child("eigen")) parse_eigen(*n, cfg.eigen);
  if (auto n = node.child("classify")) parse_classify(*n, cfg.classify);
  if (auto n = node.child("r0")) parse_r0(*n, cfg.r0);
  if (auto n = node.child("simulate")) parse_simulate(*n, cfg.simulate);
  if (auto n = node.child("hstar")) {
    cfg.hstar.anchor = n->number("anchor", cfg.hstar.anchor);
    cfg.hstar.tol = n->number("tol", cfg.hstar.tol);
    n->finish();
  }
  if (auto n = node.child("mustar")) {
    cfg.mustar.mu_lo = n->number("mu_lo", cfg.mustar.mu_lo);
    cfg.mustar.mu_hi = n->number("mu_hi", cfg.mustar.mu_hi);
    cfg.mustar.tol = n->number("tol", cfg.mustar.tol);
    cfg.mustar.max_horizon_doublings = n->integer("max_horizon_doublings", cfg.mustar.max_horizon_doublings);
    n->finish();
  }
  if (auto n = node.child("semiwave")) parse_semiwave(*n, cfg.semiwave);
  if (auto n = node.child("sweep")) parse_sweep(*n, cfg.sweep);
  node.finish();
  cfg.classify.eigen = cfg.eigen;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Task> expected) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path(), expected);
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) Node::fail(key, "must be positive");
  };
  guarded("model", [&] { model.validate(); return 0; });
  positive(field.period, "field.period");
  guarded("initial", [&] { initial.validate(model.n_star, model.left0(), model.h0); return 0; });
  positive(eigen.tol, "eigen.tol");
  if (eigen.grid_n < 21) Node::fail("eigen.grid_n", "must be at least 21");
  if (eigen.steps_per_period < 64) Node::fail("eigen.steps_per_period", "must be at least 64");
  if (eigen.krylov_dim < 2) Node::fail("eigen.krylov_dim", "must be at least 2");
  positive(classify.eps_vanish, "classify.eps_vanish");
  positive(classify.plateau_growth, "classify.plateau_growth");
  positive(classify.r0_slack, "classify.r0_slack");
  if (classify.width_spread) positive(*classify.width_spread, "classify.width_spread");
  if (classify.horizon < 0.0) Node::fail("classify.horizon", "must be non-negative");
  if (r0.interval && !(r0.interval->hi > r0.interval->lo)) Node::fail("r0.interval", "expected lo < hi");
  if (simulate.horizon < 0.0) Node::fail("simulate.horizon", "must be non-negative");
  if (simulate.r0_samples < 2) Node::fail("simulate.r0_samples", "must be at least 2");
  if (simulate.options.sample_interval < 0.0) Node::fail("simulate.sample_interval", "must be non-negative");
  positive(hstar.tol, "hstar.tol");
  positive(mustar.tol, "mustar.tol");
  positive(mustar.mu_lo, "mustar.mu_lo");
  if (!(mustar.mu_hi > mustar.mu_lo)) Node::fail("mustar.mu_hi", "must exceed mustar.mu_lo");
  positive(semiwave.tol, "semiwave.tol");
  if (!(semiwave.options.theta > 0.0 && semiwave.options.theta <= 1.0)) Node::fail("semiwave.theta", "must lie in (0, 1]");
  if (task == Task::Sweep) {
    if (sweep.axes.empty()) Node::fail("sweep.axes", "sweep grid is empty");
    std::size_t cells = 1;
    for (const auto& axis : sweep.axes) {
      if (axis.values.empty()) Node::fail("sweep.axes." + axis.name, "sweep grid is empty");
      cells *= axis.values.size();
      if (cells > kMaxSweepCells) Node::fail("sweep.axes", "more than 10000 grid cells");
    }
    if (sweep.horizon < 0.0) Node::fail("sweep.horizon", "must be non-negative");
  }
}

}  // namespace frontlab
