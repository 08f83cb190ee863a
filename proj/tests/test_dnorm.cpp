#include <doctest.h>

#include "hmod/dnorm.hpp"
#include "hmod/errors.hpp"
#include "hmod/experiments.hpp"
#include "oracles.hpp"

using namespace hmod;

namespace {

DNormOptions small_opts() {
  DNormOptions o;
  o.window = Window(4);
  o.angles = 16;
  return o;
}

}  // namespace

TEST_CASE("direction samples") {
  const DirectionSample s = DirectionSample::make();
  CHECK(s.directions.size() == 13u * 32u);
  for (const auto& [x, y] : s.directions) CHECK(std::hypot(x, y) > 0.0);
  CHECK(std::hypot(s.directions.front().first, s.directions.front().second) == doctest::Approx(1e-3));
  CHECK(std::hypot(s.directions.back().first, s.directions.back().second) == doctest::Approx(10.0));
  for (PlaneNorm n : {PlaneNorm::l1, PlaneNorm::linf})
    for (const auto& [x, y] : DirectionSample::make(3, 12, 0.5, 2.0, n).directions) {
      const double r = plane_norm(n, x, y);
      CHECK((std::abs(r - 0.5) < 1e-12 || std::abs(r - 1.0) < 1e-12 || std::abs(r - 2.0) < 1e-12));
    }
  CHECK(s.restricted(0.1).directions.size() == 7u * 32u);  // radii 10^{-3 + k/3}, k <= 6
  CHECK_THROWS_AS(s.restricted(1e-4), InvalidInput);
  CHECK_THROWS_AS(DirectionSample::make(0, 4), InvalidInput);
}

TEST_CASE("connection") {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  CHECK(connection_apply(ctx, 0, 0, g).is_zero());
  const WaveFunction c = connection_apply(ctx, 0, 1, g);
  for (double s : {-0.8, 0.0, 0.6})
    CHECK(std::abs(c.evaluate(s)[0] + 2 * kPi * ctx.eth * s * g.evaluate(s)[0]) < 1e-14);

  Rng rng(11);
  std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
  const double t = 1e-4;
  for (int k = 0; k < 5; ++k) {
    const WaveFunction xi = random_wave(rng, 1, 2);
    const double phi = ang(rng), x = std::cos(phi), y = std::sin(phi);
    const WaveFunction fd = (sigma_act(ctx.eth, t * x, t * y, xi) - xi).scaled(1.0 / t);
    const cplx err2 = oracle::trapezoid([&](double s) {
      const cplx e = fd.evaluate(s)[0] - connection_apply(ctx, x, y, xi).evaluate(s)[0];
      return cplx{std::norm(e), 0.0};
    });
    CHECK(std::sqrt(err2.real()) <= 1e-3);
  }
}

TEST_CASE("D-norm basics") {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const DirectionSample samples = DirectionSample::make(3, 8);
  const DNormOptions opt = small_opts();
  const DNormEstimate z = dnorm_estimate(ctx, WaveFunction(1), samples, opt);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);

  Rng rng(12);
  for (int k = 0; k < 2; ++k) {
    const WaveFunction xi = random_wave(rng, 1, 2);
    const DNormEstimate e = dnorm_estimate(ctx, xi, samples, opt);
    CHECK(e.lower <= e.upper);
    CHECK(e.lower >= e.module_lower);
    CHECK(e.upper >= e.module_upper);
    CHECK(e.quotients.size() == samples.directions.size());
    CHECK(sup_lower_within(e, samples, 10.0) == e.sup_lower);
    CHECK(dnorm_upper(ctx, xi, PlaneNorm::euclid, opt) == doctest::Approx(e.upper).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dnorm_estimate(ctx, ground_gaussian(), DirectionSample{}, opt), InvalidInput);
}

TEST_CASE("gradient operator norm") {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  const DNormOptions opt = small_opts();
  const NormEstimate e = gradient_opnorm(ctx, g, PlaneNorm::euclid, opt);
  CHECK(e.lower <= e.upper);
  // the (1, 0) branch dominates |2 pi s g|_{L^2}
  const double sg = std::sqrt(oracle::trapezoid([&](double s) {
                                return cplx{std::norm(s * g.evaluate(s)[0]), 0.0};
                              }).real());
  CHECK(e.lower >= 2 * kPi * sg / (2 * kPi * ctx.eth) * (1 - 1e-10));

  const NormEstimate c = gradient_opnorm(ctx, g.scaled(cplx{0.0, -3.0}), PlaneNorm::euclid, opt);
  CHECK(std::abs(c.lower - 3.0 * e.lower) < 1e-9 * c.lower);
  CHECK(std::abs(c.upper - 3.0 * e.upper) < 1e-9 * c.upper);

  // eth cancels in the y branch
  double prev = -1.0;
  for (double th : {0.5, 0.3, 0.8}) {
    const auto c2 = HeisenbergContext::make(0, 1, 1, th);
    const double v = l2_norm(connection_apply(c2, 0, 1, g)) / (2 * kPi * c2.eth);
    if (prev >= 0.0) CHECK(std::abs(v - prev) < 1e-12);
    prev = v;
  }
}

TEST_CASE("Leibniz reports") {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  LeibnizOptions lo;
  lo.dnorm = small_opts();
  lo.lhs_samples = DirectionSample::make(2, 8, 1e-3, 1e-1);

  const Report unit = leibniz_report(ctx, TwistedSequence::delta({0, 0}), g, g, lo);
  REQUIRE(unit.size() == 3u);
  CHECK(unit[0].name == "leibniz_inner");
  for (const auto& r : unit) CHECK(r.pass);
  // the unit contributes no L-seminorm term
  CHECK(unit[0].rhs_upper == doctest::Approx(dnorm_upper(ctx, g, PlaneNorm::euclid, lo.dnorm)).epsilon(1e-14));

  for (const auto& r : leibniz_report(ctx, TwistedSequence::delta({1, 0}), g, g, lo)) CHECK(r.pass);

  Rng rng(13);
  const auto c2 = HeisenbergContext::make(1, 2, 2, 0.8);
  for (const auto& r : leibniz_report(c2, random_sequence(rng, 2, 3), random_wave(rng, 2, 2), random_wave(rng, 2, 3), lo))
    CHECK(r.pass);
}
