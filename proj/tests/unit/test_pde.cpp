#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "frontlab/error.hpp"
#include "frontlab/krylov.hpp"
#include "frontlab/pde.hpp"
#include "frontlab/tridiagonal.hpp"
#include "oracles.hpp"

using namespace frontlab;
using doctest::Approx;

namespace {

LinearProblemSpec heat(double d, double alpha, double c = 0.0) {
  return LinearProblemSpec{d, alpha, [c](double, double) { return c; }};
}

double heat_mode_error(int n, double dt, double tau) {
  const auto grid = Grid1D::make(0.0, 1.0, n);
  auto u = FieldOnGrid::sample(grid, [](double x) { return std::sin(oracle::kPi * x); });
  const int steps = static_cast<int>(std::lround(tau / dt));
  const auto spec = heat(1.0, 0.0);
  for (int k = 0; k < steps; ++k) u = step_linear(u, spec, dt);
  const double exact = oracle::heat_decay(1.0, 1.0, tau);
  return std::abs(u.values[static_cast<std::size_t>(n / 2)] - exact) / exact;
}

}  // namespace

TEST_CASE("tridiagonal solve matches a dense solve") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int n = 30;
  Tridiagonal T;
  T.lower.resize(n);
  T.diag.resize(n);
  T.upper.resize(n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    T.lower[i] = i > 0 ? U(rng) : 0.0;
    T.upper[i] = i + 1 < n ? U(rng) : 0.0;
    T.diag[i] = 3.0 + U(rng);
    M(i, i) = T.diag[i];
    if (i > 0) M(i, i - 1) = T.lower[i];
    if (i + 1 < n) M(i, i + 1) = T.upper[i];
    b(i) = U(rng);
  }
  std::vector<double> x(b.data(), b.data() + n);
  solve_tridiagonal(T, x);
  const Eigen::VectorXd ref = M.partialPivLu().solve(b);
  for (int i = 0; i < n; ++i) CHECK(x[i] == Approx(ref(i)).epsilon(1e-12));

  Tridiagonal singular(2);
  singular.lower = {0.0, 1.0};
  singular.diag = {0.0, 1.0};
  singular.upper = {1.0, 0.0};
  std::vector<double> y{1.0, 1.0};
  CHECK_THROWS_AS(solve_tridiagonal(singular, y), NumericalError);
}

TEST_CASE("grid basics") {
  const auto g = Grid1D::make(-1.0, 1.0, 5);
  CHECK(g.dx() == Approx(0.5));
  CHECK(g.x(4) == 1.0);
  CHECK_THROWS_AS(Grid1D::make(1.0, 0.0, 5), ValidationError);
  CHECK_THROWS_AS(Grid1D::make(0.0, 1.0, 2), ValidationError);
}

TEST_CASE("zero is a fixed point of the linear step") {
  const auto grid = Grid1D::make(0.0, 1.0, 51);
  const auto u = step_linear(FieldOnGrid::zeros(grid), heat(1.0, 0.3, 0.0), 1e-3);
  CHECK(u.sup_norm() == 0.0);
}

TEST_CASE("heat eigenmode decay") {
  CHECK(heat_mode_error(401, 1e-4, 0.1) <= 1e-3);
}

TEST_CASE("combined refinement: quartering dx and dt cuts the error by at least 3.5") {
  const double coarse = heat_mode_error(26, 4e-3, 0.1);
  const double fine = heat_mode_error(101, 1e-3, 0.1);
  CHECK(coarse / fine >= 3.5);
}

TEST_CASE("discrete maximum principle with advection") {
  const auto grid = Grid1D::make(0.0, 1.0, 201);
  auto u = FieldOnGrid::sample(grid, [](double x) { return x * (1.0 - x) * std::exp(3.0 * x); });
  double prev = u.sup_norm();
  for (int k = 0; k < 400; ++k) {
    u = step_linear(u, heat(1.0, 1.0, -0.2), 2.5e-3);
    CHECK(u.sup_norm() <= prev * (1.0 + 1e-14));
    prev = u.sup_norm();
  }
}

TEST_CASE("mass is non-increasing for pure Dirichlet diffusion") {
  const auto grid = Grid1D::make(0.0, 2.0, 101);
  auto u = FieldOnGrid::sample(grid, [](double x) { return x < 1.0 ? x : 2.0 - x; });
  auto mass = [&] {
    double s = 0.0;
    for (double v : u.values) s += v;
    return s * grid.dx();
  };
  double prev = mass();
  for (int k = 0; k < 100; ++k) {
    u = step_linear(u, heat(1.0, 0.0), 1e-3);
    CHECK(mass() <= prev + 1e-15);
    prev = mass();
  }
}

TEST_CASE("step_linear rejects advective CFL violations") {
  const auto grid = Grid1D::make(0.0, 1.0, 101);
  CHECK_THROWS_AS(step_linear(FieldOnGrid::zeros(grid), heat(1.0, 5.0), 0.1), ValidationError);
}

TEST_CASE("logistic step: disease-free state and saturation") {
  const auto field = CoefficientField::constant(2.0, 1.0);
  const auto grid = Grid1D::make(0.0, 40.0, 401);
  CHECK(step_logistic(FieldOnGrid::zeros(grid), field, 1.0, 0.0, 1.0, 0.01).sup_norm() == 0.0);

  auto u = FieldOnGrid::sample(grid, [](double) { return 1.0; });
  u.values.front() = u.values.back() = 0.0;
  const double dt = 0.01;
  for (int k = 1; k <= 300; ++k) {
    u = step_logistic(u, field, 1.0, 0.7, 1.0, dt);
    CHECK(u.sup_norm() <= 1.0 + 1e-12);
  }
  // interior far from the ends follows the logistic ODE u' = u - 2u^2
  const double expected = oracle::logistic(1.0, 2.0, 1.0, 3.0);
  CHECK(u.values[200] == Approx(expected).epsilon(5e-3));
  CHECK(u.values[200] > 0.5);
}

TEST_CASE("spatially constant data stays flat away from the boundary layers") {
  const auto field = CoefficientField::constant(2.0, 1.0);
  const auto grid = Grid1D::make(-30.0, 30.0, 601);
  auto u = FieldOnGrid::sample(grid, [](double) { return 0.1; });
  u.values.front() = u.values.back() = 0.0;
  for (int k = 0; k < 200; ++k) u = step_logistic(u, field, 1.0, 1.0, 1.0, 0.01);
  const double center = u.values[300];
  CHECK(center == Approx(oracle::logistic(1.0, 2.0, 0.1, 2.0)).epsilon(1e-2));
  for (int i = 200; i <= 400; ++i) CHECK(u.values[static_cast<std::size_t>(i)] == Approx(center).epsilon(1e-9));
}

TEST_CASE("discrete comparison on 50 random ordered pairs") {
  const auto field = CoefficientField::separable_bump(1.0, RateParams{2.0, 0.5, 0.0, 1.0, 1.5, 0.5}, RateParams{1.0, 0.2, 1.0, 0.0, 1.0, 0.0});
  const auto grid = Grid1D::make(-10.0, 10.0, 201);
  const double dt = std::min(0.01, max_stable_dt(field, grid.dx(), 0.8));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int pair = 0; pair < 50; ++pair) {
    auto u = FieldOnGrid::zeros(grid), v = FieldOnGrid::zeros(grid);
    for (int i = 1; i < grid.n - 1; ++i) {
      const double a = U(rng), b = U(rng);
      u.values[static_cast<std::size_t>(i)] = std::min(a, b);
      v.values[static_cast<std::size_t>(i)] = std::max(a, b);
    }
    bool ordered = true;
    for (int k = 0; k < 50; ++k) {
      u = step_logistic(u, field, 1.0, 0.8, 1.0, dt);
      v = step_logistic(v, field, 1.0, 0.8, 1.0, dt);
      for (int i = 0; i < grid.n; ++i) ordered = ordered && u.values[static_cast<std::size_t>(i)] <= v.values[static_cast<std::size_t>(i)] + 1e-15;
    }
    CHECK(ordered);
  }
}

TEST_CASE("logistic step validates dt") {
  const auto field = CoefficientField::constant(2.0, 1.0);
  const auto grid = Grid1D::make(0.0, 1.0, 11);
  CHECK_THROWS_AS(step_logistic(FieldOnGrid::zeros(grid), field, 1.0, 0.0, 1.0, 0.5), ValidationError);
}

TEST_CASE("monodromy: linearity and the principal mode") {
  const auto grid = Grid1D::make(0.0, oracle::kPi, 401);
  const auto spec = heat(1.0, 0.0, -1.0);
  CHECK(monodromy_apply(FieldOnGrid::zeros(grid), spec, 1.0, 512).sup_norm() == 0.0);
  CHECK_THROWS_AS(monodromy_apply(FieldOnGrid::zeros(grid), spec, 1.0, 32), ValidationError);

  auto u = FieldOnGrid::sample(grid, [](double x) { return x * (oracle::kPi - x); });
  auto v = FieldOnGrid::sample(grid, [](double x) { return std::sin(3.0 * x) + std::sin(x); });
  auto w = u;
  for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] = 2.5 * u.values[i] - 0.7 * v.values[i];
  const auto Mu = monodromy_apply(u, spec, 1.0, 512);
  const auto Mv = monodromy_apply(v, spec, 1.0, 512);
  const auto Mw = monodromy_apply(w, spec, 1.0, 512);
  const double scale = Mw.sup_norm();
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    CHECK(std::abs(Mw.values[i] - (2.5 * Mu.values[i] - 0.7 * Mv.values[i])) <= 1e-10 * scale);
  }

  const auto n = static_cast<std::size_t>(grid.n);
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    FieldOnGrid f{grid, std::vector<double>(in.begin(), in.end()), 0.0};
    const auto r = monodromy_apply(f, spec, 1.0, 512);
    std::copy(r.values.begin(), r.values.end(), out.begin());
  };
  std::vector<double> start(n, 1.0);
  start.front() = start.back() = 0.0;
  const auto eig = dominant_eigenpair(apply, start, 1e-10);
  CHECK(eig.converged);
  CHECK(eig.value == Approx(std::exp(-2.0)).epsilon(1e-3));
}

TEST_CASE("rescaled period map reproduces the true multiplier") {
  const auto grid = Grid1D::make(0.0, 2.0, 101);
  auto tables = PotentialTables::from_function([](double x, double t) { return 0.5 + 0.3 * std::cos(6.283185307179586 * t) * x; }, grid, 1.0, 256);
  const LinearPeriodMap scaled(tables, 0.7, 0.4, 1.0, 0.0, 0.0, true);
  const LinearPeriodMap raw(tables, 0.7, 0.4, 1.0, 0.0, 0.0, false);
  std::vector<double> u(101), a(101), b(101);
  for (int i = 1; i < 100; ++i) u[static_cast<std::size_t>(i)] = std::sin(oracle::kPi * i / 100.0);
  scaled.apply(u, a);
  raw.apply(u, b);
  const double factor = std::exp(scaled.log_scale_per_period());
  for (int i = 0; i < 101; ++i) CHECK(a[static_cast<std::size_t>(i)] * factor == Approx(b[static_cast<std::size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("periodic entire solution: constant plateau") {
  const auto field = CoefficientField::constant(2.0, 1.0);
  const auto orbit = periodic_entire_solution(field, 1.0, 0.0, 1.0, 40.0, 1e-8);
  CHECK(orbit.residual < 1e-8);
  CHECK(orbit.value(0.0, 0.3) == Approx(0.5).epsilon(1e-2));

  const auto shifted = periodic_entire_solution(field, 1.0, 0.5, 1.0, 40.0, 1e-8);
  CHECK(shifted.value(0.0, 0.0) == Approx(orbit.value(0.0, 0.0)).epsilon(1e-2));
}

TEST_CASE("periodic entire solution: oscillating transmission") {
  const auto field = CoefficientField::time_periodic(1.0, RateParams{2.0, 1.0}, RateParams{1.0});
  const auto orbit = periodic_entire_solution(field, 1.0, 0.0, 1.0, 40.0, 1e-8);
  CHECK(orbit.residual < 1e-8);
  CHECK(orbit.snapshots.front().values[800] == Approx(orbit.snapshots.back().values[800]).epsilon(1e-6));
  // interior follows the scalar periodic logistic orbit v' = v((1 + cos) - (2 + cos) v)
  const auto a = [](double t) { return 1.0 + std::cos(2.0 * oracle::kPi * t); };
  const auto b = [](double t) { return 2.0 + std::cos(2.0 * oracle::kPi * t); };
  for (double t : {0.0, 0.25, 0.5, 0.75}) {
    CHECK(orbit.value(0.0, t) == Approx(oracle::periodic_logistic(a, b, 1.0, t)).epsilon(1e-2));
  }
}

TEST_CASE("periodic entire solution: preconditions") {
  const auto field = CoefficientField::constant(2.0, 1.0);
  CHECK_THROWS_AS(periodic_entire_solution(field, 1.0, 0.0, 1.0, 5.0, 1e-8), ValidationError);
  CHECK_THROWS_AS(periodic_entire_solution(field, 1.0, 3.0, 1.0, 40.0, 1e-8), ValidationError);
}
