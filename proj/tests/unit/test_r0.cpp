#include <cmath>
#include <random>

#include "doctest.h"
#include "frontlab/error.hpp"
#include "frontlab/r0.hpp"
#include "frontlab/stefan.hpp"
#include "oracles.hpp"

using namespace frontlab;
using doctest::Approx;

namespace {

const double kPi = oracle::kPi;

EigenOptions quiet() {
  EigenOptions eo;
  eo.compute_lambda0 = false;
  return eo;
}

void check_in_sandwich(const CoefficientField& f, double d, double alpha, const Interval& iv, double value) {
  const auto sb = sandwich_bounds(f, d, alpha, iv);
  // discretization slack; the bracket is a single point for constant rates
  CHECK(value >= sb.lower * (1.0 - 1e-3));
  CHECK(value <= sb.upper * (1.0 + 1e-3));
}

}  // namespace

TEST_CASE("closed form examples") {
  CHECK(r0_closed_form(1.0, 0.0, 2.0, 1.0, kPi) == Approx(1.0));
  CHECK(r0_closed_form(1.0, 2.0, 3.0, 1.0, kPi) == Approx(1.0));
  CHECK(r0_closed_form(1.0, 0.0, 2.0, 1.0, 1e-3) == Approx(2.0 / (kPi * kPi * 1e6 + 1.0)).epsilon(1e-12));
  CHECK(r0_closed_form(1.0, 0.0, 2.0, 1.0, 1e-3) == Approx(2.03e-7).epsilon(1e-2));
  CHECK_THROWS_AS(r0_closed_form(1.0, 0.0, 2.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("Floquet route examples") {
  const auto c = CoefficientField::constant(2.0, 1.0);
  const auto r = r0_floquet(c, 1.0, 0.0, {0.0, kPi});
  CHECK(r.value == Approx(1.0).epsilon(1e-3));
  CHECK(r.method == R0Method::Floquet);
  check_in_sandwich(c, 1.0, 0.0, {0.0, kPi}, r.value);

  const auto p = CoefficientField::time_periodic(1.0, RateParams{2.0, 1.0}, RateParams{1.0});
  const auto rp = r0_floquet(p, 1.0, 0.0, {0.0, kPi}, quiet());
  CHECK(rp.value == Approx(1.0).epsilon(1e-3));
  check_in_sandwich(p, 1.0, 0.0, {0.0, kPi}, rp.value);

  const auto ra = r0_floquet(c, 1.0, 1.0, {0.0, kPi}, quiet());
  CHECK(ra.value == Approx(2.0 / 2.25).epsilon(1e-3));
}

TEST_CASE("eigenfunction is positive, vanishes at the ends and is sup-normalized") {
  const auto f = CoefficientField::separable_bump(1.0, RateParams{2.0, 0.3, 0.0, 0.5, 1.0, 0.5}, RateParams{1.0});
  const auto r = r0_floquet(f, 1.0, 0.5, {-2.0, 2.5}, quiet());
  const auto& v = r.eigenfunction.values;
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 0.0);
  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    CHECK(v[i] > 0.0);
    sup = std::max(sup, v[i]);
  }
  CHECK(sup == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("variational route examples") {
  const auto c = CoefficientField::constant(2.0, 1.0);
  CHECK(r0_variational(c, 1.0, 0.0, {0.0, kPi}).value == Approx(1.0).epsilon(1e-3));
  CHECK(r0_variational(c, 1.0, 1.0, {0.0, kPi}).value == Approx(2.0 / 2.25).epsilon(1e-3));

  const auto bump = CoefficientField::space_only(RateParams{2.0, 0.0, 0.0, 1.0}, RateParams{1.0});
  CHECK(r0_variational(bump, 1.0, 0.0, {0.0, kPi}).value >= r0_variational(c, 1.0, 0.0, {0.0, kPi}).value);

  const auto p = CoefficientField::time_periodic(1.0, RateParams{2.0, 1.0}, RateParams{1.0});
  CHECK_THROWS_WITH_AS(r0_variational(p, 1.0, 0.0, {0.0, kPi}),
                       "variational route requires time-independent coefficients", ValidationError);
}

TEST_CASE("heterogeneous rates against the dense generalized eigenproblem") {
  auto beta = [](double x) { return 1.5 + std::exp(-x * x); };
  auto gamma = [](double x) { return 1.0 - 0.4 * std::exp(-(x / 2.0) * (x / 2.0)); };
  const auto f = CoefficientField::space_only(RateParams{1.5, 0.0, 0.0, 1.0, 1.0}, RateParams{1.0, 0.0, 0.0, -0.4, 2.0});
  for (double alpha : {0.0, 0.7}) {
    const double ref = oracle::r0_dense(beta, gamma, 0.9, alpha, -3.0, 4.0, 801);
    CHECK(r0_variational(f, 0.9, alpha, {-3.0, 4.0}, 801).value == Approx(ref).epsilon(1e-6));
    CHECK(r0_floquet(f, 0.9, alpha, {-3.0, 4.0}, quiet()).value == Approx(ref).epsilon(1e-3));
  }
}

TEST_CASE("lambda0 examples and sign relation") {
  const auto same = CoefficientField::constant(1.5, 1.5);
  CHECK(lambda0(same, 1.0, 0.0, {0.0, 2.0}) == Approx(kPi * kPi / 4.0).epsilon(1e-3));
  const auto c = CoefficientField::constant(2.0, 1.0);
  CHECK(std::abs(lambda0(c, 1.0, 0.0, {0.0, kPi})) <= 1e-3);

  const auto f = CoefficientField::space_only(RateParams{1.5, 0.0, 0.0, 1.0, 1.0}, RateParams{1.0});
  auto net = [](double x) { return 0.5 + std::exp(-x * x); };
  CHECK(lambda0(f, 1.0, 0.5, {-2.0, 2.0}) == Approx(oracle::lambda0_dense(net, 1.0, 0.5, -2.0, 2.0, 401)).epsilon(2e-3));
  CHECK(lambda0_elliptic(f, 1.0, 0.5, {-2.0, 2.0}) == Approx(oracle::lambda0_dense(net, 1.0, 0.5, -2.0, 2.0, 401)).epsilon(1e-6));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 6; ++k) {
    const auto g = CoefficientField::separable_bump(1.0, RateParams{1.5 + U(rng), 0.4 * U(rng), 0.0, U(rng), 1.0, 0.5},
                                                    RateParams{1.0, 0.2 * U(rng), 1.0, 0.0, 1.0, 0.0});
    const double L = 1.0 + 4.0 * U(rng);
    const auto r = r0_floquet(g, 1.0, 0.5 * U(rng), {-L / 2, L / 2});
    if (std::abs(1.0 - r.value) > 1e-2) CHECK((1.0 - r.value > 0.0) == (r.lambda0 > 0.0));
  }
}

TEST_CASE("critical length") {
  const auto c = CoefficientField::constant(2.0, 1.0);
  const double h0 = find_h_star(c, 1.0, 0.0, 0.0, 1e-4);
  const double h1 = find_h_star(c, 1.0, 1.0, 0.0, 1e-4);
  CHECK(h0 == Approx(kPi).epsilon(1e-3));
  CHECK(h1 == Approx(kPi / std::sqrt(0.75)).epsilon(1e-3));
  CHECK(h1 > h0);
  CHECK(far_field_h_star(c, 1.0, 1.0) == Approx(oracle::critical_length(1.0, 1.0, 2.0, 1.0)));
  CHECK_THROWS_AS(find_h_star(c, 1.0, 2.5, 0.0, 1e-4), ValidationError);
}

TEST_CASE("monotonicity in beta, gamma, interval and advection") {
  const auto f = CoefficientField::separable_bump(1.0, RateParams{1.8, 0.3, 0.0, 0.6, 1.2, 0.4}, RateParams{1.0, 0.1, 0.5});
  EigenOptions eo = quiet();
  eo.tol = 1e-8;
  const Interval iv{-1.5, 2.0};
  const double base = r0_floquet(f, 1.0, 0.4, iv, eo).value;
  CHECK(r0_floquet(f.scaled(1.1, 1.0), 1.0, 0.4, iv, eo).value > base + 1e-6);
  CHECK(r0_floquet(f.scaled(1.0, 1.1), 1.0, 0.4, iv, eo).value < base - 1e-6);
  CHECK(r0_floquet(f, 1.0, 0.4, {-1.5, 2.1}, eo).value > base + 1e-6);

  const auto s = CoefficientField::space_only(RateParams{1.8, 0.0, 0.0, 0.6}, RateParams{1.0});
  double prev = r0_variational(s, 1.0, 0.0, iv).value;
  for (double alpha : {0.25, 0.5, 1.0}) {
    const double v = r0_variational(s, 1.0, alpha, iv).value;
    CHECK(v < prev - 1e-6);
    prev = v;
  }
}

TEST_CASE("sandwich bounds for homogeneous rates collapse to the closed form") {
  const auto c = CoefficientField::constant(2.0, 1.0);
  const auto sb = sandwich_bounds(c, 1.0, 0.3, {0.0, 3.0});
  CHECK(sb.lower == Approx(oracle::r0_homogeneous(1.0, 0.3, 2.0, 1.0, 3.0)));
  CHECK(sb.upper == Approx(sb.lower));
}

TEST_CASE("front R0 along a spreading run") {
  const auto c = CoefficientField::constant(2.0, 1.0);
  ModelParams mp;
  mp.h0 = 1.0;
  mp.mu = 2.0;
  mp.grid_n = 201;
  mp.dt = 0.02;
  const auto trace = simulate(mp, c, InitialDatum{}, 40.0);
  EigenOptions eo = quiet();
  eo.tol = 1e-9;
  const std::vector<double> taus{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 40.0};
  const auto series = r0_front(trace, c, 1.0, 0.0, taus, eo);
  CHECK(series.values.front() == Approx(r0_floquet(c, 1.0, 0.0, {-1.0, 1.0}, eo).value).epsilon(1e-9));
  for (std::size_t i = 1; i < series.values.size(); ++i) CHECK(series.values[i] > series.values[i - 1]);
  CHECK(series.values.back() >= 0.95 * 2.0 / 1.0);
  CHECK_THROWS_AS(r0_front(trace, c, 1.0, 0.0, std::vector<double>{50.0}, eo), ValidationError);
}
