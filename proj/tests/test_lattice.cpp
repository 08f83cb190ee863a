#include <doctest.h>

#include <random>

#include "hmod/experiments.hpp"
#include "hmod/lattice.hpp"
#include "oracles.hpp"

using namespace hmod;

namespace {

oracle::Dense dense(const TwistedSequence& f) {
  oracle::Dense d;
  for (const auto& [p, c] : f.entries()) d[{p.n, p.m}] = c;
  return d;
}

double diff(const TwistedSequence& f, const oracle::Dense& d) {
  double m = 0.0;
  for (const auto& [p, c] : d) m = std::max(m, std::abs(f.at({p.first, p.second}) - c));
  for (const auto& [p, c] : f.entries())
    if (!d.count({p.n, p.m})) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("cocycle values") {
  CHECK(std::abs(cocycle(0.5, {1, 0}, {0, 1}) - cplx{0.0, -1.0}) < 1e-15);
  CHECK(cocycle(0.37, {0, 0}, {3, -7}) == cplx{1.0, 0.0});
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    std::uniform_int_distribution<long> u(-30, 30);
    const LatticePoint m{u(rng), u(rng)}, n{u(rng), u(rng)};
    const double th = std::uniform_real_distribution<double>(-3, 3)(rng);
    CHECK(std::abs(cocycle(th, m, n) * cocycle(th, n, m) - 1.0) < 1e-12);
    CHECK(std::abs(cocycle(th, m, n) - oracle::sigma(th, m.n, m.m, n.n, n.m)) < 1e-11);
  }
}

TEST_CASE("convolution against the brute-force sum") {
  const double th = 0.3;
  const auto u = TwistedSequence::delta({1, 0}), v = TwistedSequence::delta({0, 1});
  CHECK(std::abs(convolve(th, u, v).at({1, 1}) - std::polar(1.0, -kPi * th)) < 1e-15);
  CHECK(std::abs(convolve(th, v, u).at({1, 1}) - std::polar(1.0, kPi * th)) < 1e-15);

  const TwistedSequence s = u + v;
  const TwistedSequence sq = convolve(0.0, s, s);
  CHECK(sq.size() == 3);
  CHECK(sq.at({2, 0}) == cplx{1.0});
  CHECK(sq.at({1, 1}) == cplx{2.0});
  CHECK(sq.at({0, 2}) == cplx{1.0});

  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const double theta = std::uniform_real_distribution<double>(-2, 2)(rng);
    const TwistedSequence f = random_sequence(rng, 4, 10), g = random_sequence(rng, 4, 10);
    CHECK(diff(convolve(theta, f, g), oracle::twisted(theta, dense(f), dense(g))) < 1e-12);
    CHECK(max_abs_diff(convolve(theta, TwistedSequence::delta({0, 0}), g), g) == 0.0);
    CHECK(l1_norm(convolve(theta, f, g)) <= l1_norm(f) * l1_norm(g) * (1 + 1e-12));
  }
}

TEST_CASE("adjoint and l1") {
  CHECK(adjoint(TwistedSequence::delta({0, 0})) == TwistedSequence::delta({0, 0}));
  const TwistedSequence a = adjoint(TwistedSequence::delta({1, 2}, {0.0, 1.0}));
  CHECK(a.size() == 1);
  CHECK(a.at({-1, -2}) == cplx{0.0, -1.0});
  CHECK(l1_norm(TwistedSequence::delta({3, -2})) == 1.0);
  const TwistedSequence f = TwistedSequence::delta({0, 0}, 2.0) - TwistedSequence::delta({1, 1}, {0.0, 3.0});
  CHECK(l1_norm(f) == doctest::Approx(5.0).epsilon(1e-15));
  Rng rng(2);
  const TwistedSequence g = random_sequence(rng, 3, 6);
  CHECK(adjoint(adjoint(g)) == g);
}

TEST_CASE("canonical form and serialization") {
  TwistedSequence f = TwistedSequence::delta({1, 1}, 2.0);
  f.add({1, 1}, -2.0);
  CHECK(f.empty());
  f.set({2, -1}, {1.5, -0.5});
  f.set({0, 3}, 0.0);
  CHECK(f.size() == 1);
  CHECK(f.radius() == 2);
  CHECK(TwistedSequence::from_json(f.to_json()) == f);
}
