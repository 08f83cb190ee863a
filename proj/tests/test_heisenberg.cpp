#include <doctest.h>

#include "hmod/errors.hpp"
#include "hmod/experiments.hpp"
#include "hmod/heisenberg.hpp"
#include "oracles.hpp"

using namespace hmod;

namespace {

using Mat = Eigen::MatrixXcd;

// clock^n shift^m on C^q with integer powers, written from the matrices
Mat rho_oracle(int p, int q, long n, long m) {
  Mat C = Mat::Zero(q, q), S = Mat::Zero(q, q);
  for (int k = 0; k < q; ++k) {
    C(k, k) = std::exp(cplx{0.0, -2 * oracle::pi * p * k / q});
    S((k + 1) % q, k) = 1.0;
  }
  auto pw = [&](const Mat& A, long e) {
    Mat B = e < 0 ? Mat(A.adjoint()) : A, R = Mat::Identity(q, q);
    for (long i = 0; i < std::abs(e); ++i) R = R * B;
    return R;
  };
  return std::exp(cplx{0.0, oracle::pi * p * n * m / q}) * pw(C, n) * pw(S, m);
}

double max_diff(const WaveFunction& a, const WaveFunction& b) {
  double e = 0.0;
  for (double s : {-1.7, -0.6, 0.0, 0.45, 1.3}) {
    const auto x = a.evaluate(s), y = b.evaluate(s);
    for (std::size_t k = 0; k < x.size(); ++k) e = std::max(e, std::abs(x[k] - y[k]));
  }
  return e;
}

}  // namespace

TEST_CASE("clock and shift") {
  for (auto [p, q, d] : std::vector<std::array<int, 3>>{{1, 2, 2}, {1, 3, 6}, {2, 5, 5}}) {
    const auto ctx = HeisenbergContext::make(p, q, d, double(p) / q + 0.37);
    const Mat I = Mat::Identity(d, d);
    CHECK((ctx.clock * ctx.clock.adjoint() - I).norm() < 1e-12);
    CHECK((ctx.shift * ctx.shift.adjoint() - I).norm() < 1e-12);
    Mat cq = I, sq = I;
    for (int k = 0; k < q; ++k) cq *= ctx.clock, sq *= ctx.shift;
    CHECK((cq - I).norm() < 1e-12);
    CHECK((sq - I).norm() < 1e-12);
    CHECK((ctx.clock * ctx.shift - ctx.clock_ratio() * ctx.shift * ctx.clock).norm() < 1e-12);
    CHECK(std::abs(ctx.clock_ratio() - std::exp(cplx{0.0, -2 * oracle::pi * p / q})) < 1e-14);
  }
  CHECK_THROWS_AS(HeisenbergContext::make(1, 2, 2, 0.5), InvalidInput);
  CHECK_THROWS_AS(HeisenbergContext::make(0, 2, 3, 0.3), InvalidInput);
}

TEST_CASE("rho against the matrix oracle") {
  const auto one = HeisenbergContext::make(0, 1, 3, 0.4);
  for (long n = -2; n <= 2; ++n)
    for (long m = -2; m <= 2; ++m) CHECK((rho(one, n, m) - Mat::Identity(3, 3)).norm() == 0.0);

  const auto ctx = HeisenbergContext::make(1, 2, 2, 0.8);
  CHECK((rho(ctx, 0, 0) - Mat::Identity(2, 2)).norm() < 1e-15);
  // all 16 pairs over Z_2^2, phases from the oracle matrices
  for (long a = 0; a < 4; ++a)
    for (long b = 0; b < 4; ++b) {
      const long n1 = a / 2, m1 = a % 2, n2 = b / 2, m2 = b % 2;
      const Mat lhs = rho(ctx, n1, m1) * rho(ctx, n2, m2), R = rho(ctx, n1 + n2, m1 + m2);
      CHECK((rho(ctx, n1, m1) - rho_oracle(1, 2, n1, m1)).norm() < 1e-14);
      const cplx phase = (R.adjoint() * lhs).trace() / 2.0;
      CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
      CHECK((lhs - phase * R).norm() < 1e-12);
      CHECK(std::abs(phase - oracle::sigma(0.5, n1, m1, n2, m2)) < 1e-12);
    }
  const auto big = HeisenbergContext::make(1, 3, 6, 0.2);
  for (long n = -3; n <= 3; ++n)
    for (long m = -3; m <= 3; ++m) {
      const Mat o = rho_oracle(1, 3, n, m);
      const Mat R = rho(big, n, m);
      CHECK((R * R.adjoint() - Mat::Identity(6, 6)).norm() < 1e-12);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          CHECK(std::abs(R(2 * i, 2 * j) - o(i, j)) < 1e-12);
          CHECK(std::abs(R(2 * i + 1, 2 * j + 1) - o(i, j)) < 1e-12);
          CHECK(std::abs(R(2 * i, 2 * j + 1)) == 0.0);
        }
    }
}

TEST_CASE("module_act_single") {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  CHECK(max_diff(module_act_single(ctx, 0, 0, g), g) < 1e-15);
  for (double s : {-0.8, 0.1, 0.9})
    CHECK(std::abs(std::abs(module_act_single(ctx, 0, 1, g).evaluate(s)[0]) -
                   std::abs(g.evaluate(s + ctx.eth)[0])) < 1e-14);
  CHECK_THROWS_AS(module_act_single(ctx, 1, 0, ground_gaussian(2)), InvalidInput);

  Rng rng(4);
  for (auto [p, q, d, th] : std::vector<std::tuple<int, int, int, double>>{{0, 1, 1, 0.3}, {1, 2, 2, 0.8}, {1, 3, 3, 0.1}}) {
    const auto c = HeisenbergContext::make(p, q, d, th);
    const WaveFunction xi = random_wave(rng, d, 2);
    for (int t = 0; t < 6; ++t) {
      std::uniform_int_distribution<long> u(-2, 2);
      const long n1 = u(rng), m1 = u(rng), n2 = u(rng), m2 = u(rng);
      const auto lhs = module_act_single(c, n1, m1, module_act_single(c, n2, m2, xi));
      const auto rhs = module_act_single(c, n1 + n2, m1 + m2, xi).scaled(oracle::sigma(th, n1, m1, n2, m2));
      CHECK(max_diff(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("gram coefficients of the ground Gaussian") {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  CHECK(std::abs(gram_coefficient(ctx, g, g, 0, 0) - 1.0) < 1e-12);
  for (long n = -3; n <= 3; ++n)
    for (long m = -3; m <= 3; ++m) {
      const double want = std::exp(-oracle::pi * (n * n + 0.25 * m * m) / 2);
      const cplx a = gram_coefficient(ctx, g, g, n, m);
      const cplx o = oracle::trapezoid([&](double s) {
        return module_act_single(ctx, n, m, g).evaluate(s)[0] * g.evaluate(s)[0];
      });
      CHECK(std::abs(std::abs(a) - want) < 1e-12);
      CHECK(std::abs(a - o) < 1e-12);
      CHECK(std::abs(a - gram_coefficient_exact(ctx, g, g, n, m)) < 1e-12);
    }

  const GramResult r = gram(ctx, g, g);
  CHECK(r.n_lo <= -4);
  CHECK(r.n_hi >= 4);
  CHECK(r.m_lo <= -9);
  CHECK(r.m_hi >= 9);
  CHECK(r.tail_bound >= 0.0);
  CHECK(r.tail_bound < 1e-12);
  CHECK_THROWS_AS(gram(ctx, g, g, GramOptions{0.0}), InvalidInput);
  CHECK(r.to_json().contains("tail_bound"));
}

TEST_CASE("gram symmetry, linearity and positivity") {
  Rng rng(5);
  const auto ctx = HeisenbergContext::make(1, 2, 2, 0.7);
  const WaveFunction xi = random_wave(rng, 2, 3), om = random_wave(rng, 2, 2), x2 = random_wave(rng, 2, 2);
  const cplx a{0.3, -1.2};
  for (long n = -2; n <= 2; ++n)
    for (long m = -2; m <= 2; ++m) {
      // <xi, om>^* = <om, xi> in the twisted algebra: f*(k) = conj f(-k)
      const cplx lhs = std::conj(gram_coefficient(ctx, xi, om, -n, -m));
      CHECK(std::abs(lhs - gram_coefficient(ctx, om, xi, n, m)) < 1e-10);
      const cplx lin = gram_coefficient(ctx, xi.scaled(a) + x2, om, n, m);
      CHECK(std::abs(lin - a * gram_coefficient(ctx, xi, om, n, m) - gram_coefficient(ctx, x2, om, n, m)) < 1e-10);
    }
  const GramResult G = gram(ctx, xi, xi);
  CHECK(min_eigenvalue(assemble_pi(ctx.theta, G.coefficients, Window(16))) >= -1e-8);
}

TEST_CASE("gram rectangles are thread independent") {
  Rng rng(6);
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction xi = random_wave(rng, 1, 3);
  const auto s = gram_rect_serial(ctx, xi, xi, -4, 5, -6, 7, {});
  const auto p = gram_rect_parallel(ctx, xi, xi, -4, 5, -6, 7, {});
  CHECK(s == p);
  CHECK(std::abs(s.at({1, -2}) - gram_coefficient(ctx, xi, xi, 1, -2)) < 1e-14);
}

TEST_CASE("module norm") {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  const NormEstimate z = module_norm(ctx, WaveFunction(1));
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);
  const NormEstimate e = module_norm(ctx, g);
  CHECK(e.lower >= 1.0 - 1e-12);
  CHECK(e.lower <= e.upper);
  const NormEstimate c = module_norm(ctx, g.scaled(cplx{0.0, 2.5}));
  CHECK(std::abs(c.lower - 2.5 * e.lower) < 1e-10);
  CHECK(module_norm_upper(ctx, g) >= e.lower);
  CHECK(module_norm_lower(ctx, g, Window(8)) <= e.upper);
}

TEST_CASE("module action") {
  Rng rng(7);
  const auto ctx = HeisenbergContext::make(1, 2, 2, 0.3);
  const WaveFunction xi = random_wave(rng, 2, 2), om = random_wave(rng, 2, 2);
  CHECK(max_diff(module_act(ctx, TwistedSequence::delta({0, 0}), xi), xi) < 1e-15);
  CHECK(max_diff(module_act(ctx, TwistedSequence::delta({1, 0}), xi), module_act_single(ctx, -1, 0, xi)) < 1e-15);

  const TwistedSequence f = random_sequence(rng, 1, 3);
  const TwistedSequence rhs = convolve(ctx.theta, f, gram(ctx, xi, om).coefficients);
  const WaveFunction fx = module_act(ctx, f, xi);
  for (long n = -2; n <= 2; ++n)
    for (long m = -2; m <= 2; ++m) CHECK(std::abs(gram_coefficient(ctx, fx, om, n, m) - rhs.at({n, m})) < 1e-9);

  // the group action does not increase the module norm of f xi past |f|_1 |xi|
  const auto c1 = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = random_wave(rng, 1, 2);
  const WaveFunction moved = heisenberg_act(c1.eth, 0.3, -0.7, 0.2, module_act(c1, f, g));
  ModuleNormOptions mo;
  mo.window = Window(8);
  CHECK(module_norm(c1, moved, mo).lower <= l1_norm(f) * module_norm(c1, g, mo).upper);
}

TEST_CASE("group action covariance") {
  Rng rng(8);
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction xi = random_wave(rng, 1, 2), om = random_wave(rng, 1, 2);
  const double x = 0.4, y = -0.3, u = 0.9, e = ctx.eth;
  const WaveFunction ax = heisenberg_act(e, x, y, u, xi), ao = heisenberg_act(e, x, y, u, om);
  const cplx z1 = std::exp(cplx{0.0, -2 * oracle::pi * e * y}), z2 = std::exp(cplx{0.0, 2 * oracle::pi * e * x});
  const TwistedSequence moved = dual_action(z1, z2, gram(ctx, xi, om).coefficients);
  for (long n = -2; n <= 2; ++n)
    for (long m = -2; m <= 2; ++m) CHECK(std::abs(gram_coefficient(ctx, ax, ao, n, m) - moved.at({n, m})) < 1e-9);
}

TEST_CASE("inner product lemma bound") {
  const auto a = HeisenbergContext::make(0, 1, 1, 0.5);
  const auto b = HeisenbergContext::make(0, 1, 1, 0.51);
  const WaveFunction g = ground_gaussian();
  const IpLemmaBound same = ip_lemma_bound(a, a, g, g, g);
  CHECK(same.total() >= 0.0);
  CHECK(gram_l1_distance(a, a, g, g, g) < 1e-12);

  const double lhs = gram_l1_distance(a, b, g, g, g);
  const double rhs = ip_lemma_bound(a, b, g, g, g).total();
  CHECK(lhs > 0.0);
  CHECK(lhs <= rhs + 1e-6);

  Rng rng(9);
  const WaveFunction xi = random_wave(rng, 1, 2), eta = random_wave(rng, 1, 2);
  const double b1 = ip_lemma_bound(a, b, g, xi, eta).total();
  const double b2 = ip_lemma_bound(a, b, g, xi, eta.scaled(cplx{-1.5, 2.0})).total();
  CHECK(std::abs(b2 - 2.5 * b1) < 1e-10 * b2);
  CHECK_THROWS_AS(ip_lemma_bound(a, HeisenbergContext::make(1, 2, 2, 0.7), g, g, g), InvalidInput);
}
