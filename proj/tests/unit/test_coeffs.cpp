#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "frontlab/coeffs.hpp"
#include "frontlab/error.hpp"
#include "oracles.hpp"

using namespace frontlab;
using doctest::Approx;

namespace {

RateParams rate(double b0, double b1 = 0.0, double phase = 0.0, double amp = 0.0, double sigma = 1.0,
                double rho = 0.0) {
  return RateParams{b0, b1, phase, amp, sigma, rho};
}

std::filesystem::path write_table(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("constant field evaluates to its value everywhere") {
  const auto f = CoefficientField::constant(2.0, 1.0);
  CHECK(f.beta(5.3, 17.2) == 2.0);
  CHECK(f.gamma(-8.0, 0.3) == 1.0);
  CHECK(f.spatially_homogeneous());
  CHECK(f.time_independent());
}

TEST_CASE("time-periodic field") {
  // 2 + sin(2 pi t) written as 2 + cos(2 pi t - pi/2)
  const auto f = CoefficientField::time_periodic(1.0, rate(2.0, 1.0, -std::numbers::pi / 2), rate(1.0));
  CHECK(f.beta(0.0, 0.25) == Approx(3.0).epsilon(1e-14));
  CHECK(f.beta(0.0, 0.75) == Approx(1.0).epsilon(1e-14));
  CHECK(f.limit_average(Rate::Beta) == Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(f.time_independent());
}

TEST_CASE("separable bump peaks on top of the far-field limit") {
  const auto f = CoefficientField::separable_bump(1.0, rate(2.0, 0.0, 0.0, 0.5), rate(1.0));
  CHECK(f.beta(0.0, 0.37) == Approx(2.5).epsilon(1e-14));
  CHECK(f.limit(Rate::Beta, 0.37) == Approx(2.0));
  CHECK(f.beta(30.0, 0.1) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("periodicity and bounds on random samples") {
  const auto f = CoefficientField::separable_bump(2.0, rate(2.0, 0.4, 0.3, 0.7, 1.5, 0.5), rate(1.0, 0.2, 1.1, -0.3, 0.8, 0.9));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> X(-20.0, 20.0), T(-10.0, 10.0);
  const auto bb = f.bounds(Rate::Beta), gb = f.bounds(Rate::Gamma);
  CHECK(bb.lo > 0.0);
  CHECK(gb.lo > 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = X(rng), t = T(rng);
    CHECK(std::abs(f.beta(x, t + 2.0) - f.beta(x, t)) <= 1e-12);
    CHECK(std::abs(f.gamma(x, t + 2.0) - f.gamma(x, t)) <= 1e-12);
    CHECK(f.beta(x, t) >= bb.lo - 1e-12);
    CHECK(f.beta(x, t) <= bb.hi + 1e-12);
    CHECK(f.gamma(x, t) >= gb.lo - 1e-12);
    CHECK(f.gamma(x, t) <= gb.hi + 1e-12);
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(CoefficientField::constant(-1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(CoefficientField::constant(2.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(CoefficientField::time_periodic(1.0, rate(1.0, 1.5), rate(1.0)), ValidationError);
  CHECK_THROWS_AS(parse_family("wavy"), ValidationError);
  CHECK(parse_family("separable_bump") == FieldFamily::SeparableBump);
}

TEST_CASE("hypothesis report margins") {
  const auto f = CoefficientField::constant(2.0, 1.0);
  auto r = check_hypotheses(f, 1.0, 0.0, 50.0);
  CHECK(r.h2_margin == Approx(2.0));
  CHECK(r.h2_satisfied);
  CHECK(r.h1_satisfied);

  r = check_hypotheses(f, 1.0, 2.0, 50.0);
  CHECK(r.h2_margin == Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(r.h2_satisfied);

  const auto p = CoefficientField::time_periodic(1.0, rate(2.0, 1.0, -std::numbers::pi / 2), rate(1.0));
  r = check_hypotheses(p, 1.0, 1.0, 50.0);
  const double mean = oracle::simpson([](double t) { return 1.0 + std::sin(2.0 * oracle::kPi * t); }, 0.0, 1.0);
  CHECK(r.mean_net_growth == Approx(mean).epsilon(1e-10));
  CHECK(r.h2_margin == Approx(1.0).epsilon(1e-10));

  const auto dead = CoefficientField::constant(1.0, 2.0);
  r = check_hypotheses(dead, 1.0, 0.0, 50.0);
  CHECK_FALSE(r.h2_satisfied);
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("far-field residual decays with the probe distance") {
  const auto f = CoefficientField::separable_bump(1.0, rate(2.0, 0.3, 0.0, 0.8, 2.0, 0.5), rate(1.0));
  const auto near = check_hypotheses(f, 1.0, 0.0, 3.0);
  const auto far = check_hypotheses(f, 1.0, 0.0, 6.0);
  CHECK(far.h1_residual < near.h1_residual);
  CHECK_FALSE(near.h1_satisfied);
  CHECK(check_hypotheses(f, 1.0, 0.0, 50.0).h1_satisfied);
}

TEST_CASE("periodic average of a smooth profile") {
  const double avg = periodic_average([](double t) { return std::cos(2.0 * oracle::kPi * t) * std::cos(2.0 * oracle::kPi * t); }, 1.0);
  CHECK(avg == Approx(0.5).epsilon(1e-13));
}

TEST_CASE("tabulated field: bilinear interpolation, periodic in t, extension rules") {
  const auto path = write_table("frontlab_table.csv",
                                "x,t,beta,gamma\n"
                                "0,0,2,1\n1,0,4,1\n0,0.5,3,1\n1,0.5,5,1\n");
  const auto f = CoefficientField::load_csv(path, 1.0);
  CHECK(f.family() == FieldFamily::Tabulated);
  CHECK(f.beta(0.5, 0.0) == Approx(3.0));
  CHECK(f.beta(0.5, 0.25) == Approx(3.5));
  CHECK(f.beta(0.5, 0.75) == Approx(3.5));  // wraps from t = 0.5 back to t = 1 = 0
  CHECK(f.beta(0.25, 1.25) == Approx(f.beta(0.25, 0.25)));
  CHECK(f.beta(7.0, 0.0) == Approx(4.0));  // constant extension
  CHECK(f.limit(Rate::Beta, 0.0) == Approx(4.0));

  const auto strict = CoefficientField::load_csv(path, 1.0, TableExtension::None);
  CHECK_THROWS_WITH_AS(strict.beta(7.0, 0.0), doctest::Contains("outside its table"), ValidationError);
}

TEST_CASE("tabulated loader rejects malformed input") {
  CHECK_THROWS_AS(CoefficientField::load_csv(write_table("frontlab_bad1.csv", "x,t,b,g\n0,0,1,1\n"), 1.0),
                  ValidationError);
  CHECK_THROWS_AS(CoefficientField::load_csv(write_table("frontlab_bad2.csv", "x,t,beta,gamma\n0,0,1,1\n1,0,x,1\n"), 1.0),
                  ValidationError);
  CHECK_THROWS_AS(CoefficientField::load_csv(write_table("frontlab_bad3.csv", "x,t,beta,gamma\n0,0,1,1\n1,0,1,1\n0,0.5,1,1\n"), 1.0),
                  ValidationError);
  CHECK_THROWS_AS(CoefficientField::load_csv("/nonexistent/table.csv", 1.0), ValidationError);
}

TEST_CASE("scaling rates pointwise") {
  const auto f = CoefficientField::space_only(rate(2.0, 0.0, 0.0, 0.5), rate(1.0));
  const auto g = f.scaled(1.1, 0.5);
  CHECK(g.beta(0.3, 0.0) == Approx(1.1 * f.beta(0.3, 0.0)));
  CHECK(g.gamma(0.3, 0.0) == Approx(0.5));
}
