#include <doctest.h>

#include "hmod/experiments.hpp"
#include "hmod/torus.hpp"

using namespace hmod;

namespace {

std::vector<std::pair<double, double>> circle_directions(int radii, int angles, double r0, double r1) {
  std::vector<std::pair<double, double>> d;
  for (int i = 0; i < radii; ++i) {
    const double r = r0 * std::pow(r1 / r0, double(i) / (radii - 1));
    for (int k = 0; k < angles; ++k) d.emplace_back(r * std::cos(2 * kPi * k / angles), r * std::sin(2 * kPi * k / angles));
  }
  return d;
}

}  // namespace

TEST_CASE("assembled compressions") {
  const Window w(3);
  const auto I = assemble_pi(0.7, TwistedSequence::delta({0, 0}), w);
  CHECK((I.matrix - Eigen::MatrixXcd::Identity(w.dim(), w.dim())).norm() == 0.0);

  // shift at theta = 0: 0/1 entries, a partial isometry
  const auto S = assemble_pi(0.0, TwistedSequence::delta({1, 0}), w).matrix;
  const Eigen::MatrixXcd SS = S.adjoint() * S;
  CHECK((SS - Eigen::MatrixXcd(SS.diagonal().asDiagonal())).norm() == 0.0);
  for (Eigen::Index i = 0; i < SS.rows(); ++i) CHECK((SS(i, i) == cplx{0.0} || SS(i, i) == cplx{1.0}));

  const double th = 0.41;
  const auto U = assemble_pi(th, TwistedSequence::delta({1, 0}), w).matrix;
  const auto V = assemble_pi(th, TwistedSequence::delta({0, 1}), w).matrix;
  const auto UV = assemble_pi(th, TwistedSequence::delta({1, 1}), w).matrix;
  const Eigen::MatrixXcd prod = U * V;
  const cplx ph = cocycle(th, {1, 0}, {0, 1});
  double e = 0.0;
  for (std::size_t i = 0; i < w.dim(); ++i) {
    const LatticePoint p = w.point(i);
    if (std::abs(p.n) >= w.radius || std::abs(p.m) >= w.radius) continue;
    e = std::max(e, (prod.row(i) - ph * UV.row(i)).norm());
  }
  CHECK(e < 1e-12);

  Rng rng(3);
  const TwistedSequence f = random_sequence(rng, 2, 6);
  const auto A = assemble_pi(th, f, w).matrix;
  const auto B = assemble_pi(th, adjoint(f), w).matrix;
  CHECK((A.adjoint() - B).norm() < 1e-14);
}

TEST_CASE("matrix-free application") {
  Rng rng(4);
  const TwistedSequence f = random_sequence(rng, 3, 8);
  const int N = 6;
  const TorusApplier ap(0.29, f, N);
  const auto A = assemble_pi(0.29, f, Window(N)).matrix;
  std::vector<cplx> x(A.cols()), ys, yp;
  for (auto& v : x) v = {std::uniform_real_distribution<double>(-1, 1)(rng), 0.5};
  ap.apply_serial(x, ys);
  ap.apply_parallel(x, yp);
  CHECK(ys == yp);
  const Eigen::VectorXcd y = A * Eigen::Map<Eigen::VectorXcd>(x.data(), x.size());
  double e = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) e = std::max(e, std::abs(y(i) - ys[i]));
  CHECK(e < 1e-13);
}

TEST_CASE("norm estimates on basic elements") {
  for (int r : {1, 4, 16}) {
    const auto c = torus_norm_estimate(0.3, TwistedSequence::delta({0, 0}, {3.0, 4.0}), Window(r));
    CHECK(c.lower == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(c.upper == doctest::Approx(5.0).epsilon(1e-12));
    const auto u = torus_norm_estimate(0.3, TwistedSequence::delta({1, 0}), Window(r));
    CHECK(u.lower == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(u.upper == doctest::Approx(1.0).epsilon(1e-12));
  }
  const TwistedSequence f = TwistedSequence::delta({0, 0}) + TwistedSequence::delta({1, 0});
  const auto e = torus_norm_estimate(0.0, f, Window(128));
  CHECK(e.upper == doctest::Approx(2.0));
  CHECK(std::abs(e.lower - 2.0) / 2.0 <= 0.02);
}

TEST_CASE("power iteration and Lanczos against the dense SVD") {
  Rng rng(8);
  auto top = [](const TwistedSequence& f, int r) {
    return Eigen::BDCSVD<Eigen::MatrixXcd>(assemble_pi(0.77, f, Window(r)).matrix).singularValues()(0);
  };
  for (int t = 0; t < 4; ++t) {
    const TwistedSequence f = random_sequence(rng, 2, 5);
    PowerOptions po;
    po.method = NormMethod::power;
    po.tol = 1e-13;
    po.max_iter = 20000;  // top two singular values sit about 1e-4 apart
    const double a = power_norm(0.77, f, Window(8), po).lower, sa = top(f, 8);
    const double b = lanczos_norm(0.77, f, Window(12)).lower, sb = top(f, 12);
    CHECK(a <= sa * (1 + 1e-12));
    CHECK(b <= sb * (1 + 1e-12));
    CHECK(sa - a < 1e-8 * sa);
    CHECK(sb - b < 1e-7 * sb);
  }
}

TEST_CASE("Fourier sup oracle") {
  CHECK(fourier_sup_oracle(TwistedSequence::delta({0, 0}), 64) == doctest::Approx(1.0));
  CHECK(fourier_sup_oracle(TwistedSequence::delta({0, 0}) + TwistedSequence::delta({1, 0}), 64) ==
        doctest::Approx(2.0));
  CHECK(fourier_sup_oracle(TwistedSequence::delta({1, 0}) - TwistedSequence::delta({-1, 0}), 64) ==
        doctest::Approx(2.0));
}

TEST_CASE("dual action") {
  Rng rng(9);
  const TwistedSequence f = random_sequence(rng, 3, 7);
  CHECK(dual_action(1.0, 1.0, f) == f);
  const cplx z = std::polar(1.0, 0.3), w = std::polar(1.0, -1.1);
  const auto g = dual_action(z, w, TwistedSequence::delta({2, -3}));
  CHECK(std::abs(g.at({2, -3}) - std::pow(z, 2) * std::pow(w, -3)) < 1e-15);
  const Window w8(8);
  CHECK(std::abs(torus_norm_estimate(0.2, dual_action(z, w, f), w8).lower - torus_norm_estimate(0.2, f, w8).lower) <
        1e-12);
}

TEST_CASE("L-seminorm") {
  const auto dirs = circle_directions(12, 64, 1e-3, kPi);
  const Window w(4);
  const auto z = l_seminorm_estimate(0.4, TwistedSequence::delta({0, 0}), dirs, w);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);
  const auto u = l_seminorm_estimate(0.4, TwistedSequence::delta({1, 0}), dirs, w);
  CHECK(std::abs(u.lower - 1.0) < 0.01);
  CHECK(u.upper == doctest::Approx(1.0));
  const auto uv = l_seminorm_estimate(0.4, TwistedSequence::delta({1, 1}), dirs, w);
  CHECK(std::abs(uv.lower - std::sqrt(2.0)) < 0.01 * std::sqrt(2.0));
  CHECK(l_seminorm_cap(TwistedSequence::delta({1, 1}), PlaneNorm::euclid) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("positivity witness") {
  Rng rng(10);
  for (int t = 0; t < 3; ++t) {
    const TwistedSequence g = random_sequence(rng, 3, 6);
    const double th = 0.123 + t;
    CHECK(min_eigenvalue(assemble_pi(th, convolve(th, adjoint(g), g), Window(10))) >= -1e-10);
  }
}
