#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "frontlab/error.hpp"
#include "frontlab/stefan.hpp"
#include "oracles.hpp"

using namespace frontlab;
using doctest::Approx;

namespace {

const auto kField = CoefficientField::constant(2.0, 1.0);

ModelParams coarse(double h0, double mu, double alpha = 0.0) {
  ModelParams p;
  p.h0 = h0;
  p.mu = mu;
  p.alpha = alpha;
  p.grid_n = 201;
  p.dt = 0.02;
  return p;
}

InitialDatum cosine(double amplitude) {
  InitialDatum i;
  i.amplitude = amplitude;
  return i;
}

}  // namespace

TEST_CASE("parameter and initial-datum validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = ModelParams{};
  p.grid_n = 50;
  CHECK_THROWS_AS(p.validate(), ValidationError);

  CHECK_THROWS_AS(cosine(1.5).validate(1.0, -1.0, 1.0), ValidationError);
  CHECK_NOTHROW(cosine(1.0).validate(1.0, -1.0, 1.0));
  CHECK(parse_initial_shape("parabolic") == InitialShape::Parabolic);
  CHECK_THROWS_AS(parse_initial_shape("gaussian"), ValidationError);

  InitialDatum par;
  par.shape = InitialShape::Parabolic;
  par.amplitude = 0.8;
  CHECK(par.eval(0.0, -2.0, 2.0) == Approx(0.8));
  CHECK(par.eval(1.0, -2.0, 2.0) == Approx(0.6));
  CHECK(par.eval(2.0, -2.0, 2.0) == 0.0);
  CHECK(cosine(0.5).eval(0.0, -1.0, 1.0) == Approx(0.5));
}

TEST_CASE("tabulated initial profile") {
  const auto path = std::filesystem::temp_directory_path() / "frontlab_initial.csv";
  std::ofstream(path) << "x,I\n-1,0\n0,0.4\n1,0\n";
  const auto init = load_initial_csv(path.string());
  CHECK(init.shape == InitialShape::Tabulated);
  CHECK(init.eval(-0.5, -1.0, 1.0) == Approx(0.2));
  CHECK_NOTHROW(init.validate(1.0, -1.0, 1.0));
  CHECK_THROWS_AS(init.validate(1.0, -2.0, 2.0), ValidationError);
  std::ofstream(path) << "x,J\n";
  CHECK_THROWS_AS(load_initial_csv(path.string()), ValidationError);
}

TEST_CASE("tiny expanding capability barely moves the fronts") {
  ModelParams p;
  p.mu = 1e-8;
  const auto trace = simulate(p, kField, InitialDatum{}, 1.0);
  CHECK(std::abs(trace.h.back() - 1.0) < 1e-4);
  CHECK(std::abs(trace.g.back() + 1.0) < 1e-4);
}

TEST_CASE("trace is sampled every T/8 and the fronts move monotonically") {
  const auto trace = simulate(coarse(1.0, 2.0, 0.5), kField, cosine(0.5), 10.0);
  CHECK(trace.size() == 81);
  CHECK(trace.t[1] == Approx(0.125));
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace.h[i] > trace.h[i - 1]);
    CHECK(trace.g[i] < trace.g[i - 1]);
    CHECK(trace.sup_I[i] <= 1.0 + 1e-6);
  }
  for (double v : trace.final_state.I) CHECK(v >= -1e-6);
}

TEST_CASE("vanishing run") {
  ModelParams p;
  p.h0 = 1.0;
  p.mu = 0.05;
  const auto trace = simulate(p, kField, cosine(0.01), 100.0);
  std::size_t at50 = 0;
  while (trace.t[at50] < 50.0) ++at50;
  CHECK(trace.sup_I[at50] < 1e-4);
  const auto c = classify(trace, kField, p);
  CHECK(c.outcome == Outcome::Vanishing);
  CHECK(c.trigger == Trigger::Decayed);
  CHECK(c.r0_final <= 1.0 + 1e-3);
}

TEST_CASE("spreading run from a supercritical habitat") {
  ModelParams p;
  p.h0 = 2.0 * oracle::kPi;
  p.mu = 1.0;
  const auto trace = simulate(p, kField, InitialDatum{}, 100.0);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace.width(i) > trace.width(i - 1));
  CHECK(trace.sup_I.back() == Approx(0.5).epsilon(0.05));
  const auto c = classify(trace, kField, p);
  CHECK(c.outcome == Outcome::Spreading);
  CHECK(c.trigger == Trigger::InitialR0);
  CHECK(c.tau == 0.0);
  CHECK(c.r0_initial > 1.0);
}

TEST_CASE("short horizon on a borderline run stays undecided") {
  const auto p = coarse(1.0, 1.0);
  const auto trace = simulate(p, kField, cosine(0.5), 0.5);
  CHECK(classify(trace, kField, p).outcome == Outcome::Undecided);
}

TEST_CASE("invalid step sizes are rejected up front") {
  ModelParams p;
  p.dt = 0.5;
  CHECK_THROWS_AS(simulate(p, kField, InitialDatum{}, 1.0), ValidationError);
  CHECK_THROWS_AS(simulate(ModelParams{}, kField, InitialDatum{}, 0.0), ValidationError);
}

TEST_CASE("expanding capability orders the fronts") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(0.05, 3.0);
  for (int k = 0; k < 4; ++k) {
    double m1 = U(rng), m2 = U(rng);
    if (m1 > m2) std::swap(m1, m2);
    const auto a = simulate(coarse(1.0, m1, 0.3), kField, cosine(0.5), 20.0, {0.0, true});
    const auto b = simulate(coarse(1.0, m2, 0.3), kField, cosine(0.5), 20.0, {0.0, true});
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.h[i] <= b.h[i] + 1e-12);
      CHECK(b.g[i] <= a.g[i] + 1e-12);
    }
    const auto& sa = a.profiles.back();
    const auto& sb = b.profiles.back();
    for (int i = 0; i < sa.n(); ++i) CHECK(sa.I[static_cast<std::size_t>(i)] <= sb.value_at(sa.x(i)) + 1e-6);
  }
}

TEST_CASE("larger transmission gives wider fronts") {
  const auto f = CoefficientField::separable_bump(1.0, RateParams{1.6, 0.3, 0.0, 0.5, 1.0, 0.5}, RateParams{1.0});
  const auto a = simulate(coarse(1.0, 1.5, 0.4), f, cosine(0.5), 20.0);
  const auto b = simulate(coarse(1.0, 1.5, 0.4), f.scaled(1.1, 1.0), cosine(0.5), 20.0);
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(a.h[i] <= b.h[i]);
    CHECK(b.g[i] <= a.g[i]);
  }
}

TEST_CASE("grid refinement of h(horizon) contracts") {
  std::vector<double> hs;
  for (int n : {101, 201, 401}) {
    ModelParams p = coarse(1.0, 2.0, 0.5);
    p.grid_n = n;
    p.dt = 0.04 * 100.0 / (n - 1);
    hs.push_back(simulate(p, kField, cosine(0.5), 10.0).h.back());
  }
  const double d1 = std::abs(hs[1] - hs[0]), d2 = std::abs(hs[2] - hs[1]);
  CHECK(d2 < 3.0 * d1);
  CHECK(d2 < d1);
}

TEST_CASE("front speeds") {
  const auto sym = simulate(coarse(2.0, 1.0), kField, InitialDatum{}, 60.0);
  const auto s0 = front_speed_estimate(sym);
  CHECK(s0.speed_right == Approx(s0.speed_left).epsilon(0.02));

  const auto drift = simulate(coarse(2.0, 1.0, 0.5), kField, InitialDatum{}, 60.0);
  const auto s1 = front_speed_estimate(drift);
  CHECK(s1.speed_right > s1.speed_left);
  CHECK(s1.speed_right < 2.0 + 0.5);
  CHECK(s1.fit_residual <= kLinearRegimeTolerance * s1.speed_left);

  CHECK_THROWS_AS(front_speed_estimate(simulate(coarse(2.0, 1.0), kField, InitialDatum{}, 10.0)), ValidationError);
}

TEST_CASE("critical expanding capability") {
  MuStarOptions mo;
  mo.tol = 0.05;
  const auto r = find_mu_star(coarse(1.0, 1.0), kField, cosine(0.5), 0.05, 5.0, mo);
  CHECK_FALSE(r.spreading_for_all);
  CHECK(r.mu_star > 0.0);
  CHECK(r.hi - r.lo <= 0.05);

  const auto big = find_mu_star(coarse(4.0, 1.0), kField, cosine(0.5), 0.05, 5.0, mo);
  CHECK(big.spreading_for_all);
  CHECK(big.mu_star == 0.0);

  CHECK_THROWS_AS(find_mu_star(coarse(1.0, 1.0), kField, cosine(0.5), 3.0, 5.0, mo), ValidationError);
}
