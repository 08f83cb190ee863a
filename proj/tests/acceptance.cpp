// One PASS/FAIL line per acceptance criterion. `--only N` runs a single one.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hmod/experiments.hpp"
#include "hmod/parallel.hpp"
#include "oracles.hpp"

using namespace hmod;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Folds a report into the outcome and keeps the row closest to its bound,
// lhs / (rhs + slack), for the summary.
struct Tally {
  Outcome out;
  double margin = -INFINITY;
  void add(const CheckRow& r) {
    if (!r.pass) {
      if (out.pass) out.detail = "first failure " + r.name + " lhs=" + num(r.lhs_lower) + " rhs=" + num(r.rhs_upper);
      out.pass = false;
    }
    const double cap = r.rhs_upper + r.slack;
    const double m = cap > 0.0 ? r.lhs_lower / cap : (r.lhs_lower > 0.0 ? INFINITY : -INFINITY);
    if (out.pass && (m > margin || out.detail.empty())) {
      margin = m;
      out.detail = "tightest " + r.name + " lhs=" + num(r.lhs_lower) + " rhs=" + num(r.rhs_upper + r.slack);
    }
  }
  void add(const Report& rows) {
    for (const auto& r : rows) add(r);
  }
  void expect(const std::string& name, double lhs, double rhs) { add(make_check(name, lhs, rhs)); }
  static std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
  }
};

oracle::Dense dense(const TwistedSequence& f) {
  oracle::Dense d;
  for (const auto& [k, v] : f.entries()) d[{k.n, k.m}] = v;
  return d;
}

double dense_diff(const oracle::Dense& a, const TwistedSequence& b) {
  double e = 0.0;
  for (const auto& [k, v] : a) e = std::max(e, std::abs(v - b.at({k.first, k.second})));
  for (const auto& [k, v] : b.entries())
    if (!a.count({k.n, k.m})) e = std::max(e, std::abs(v));
  return e;
}

// sup over the g x g grid of |sum f(n, m) e^{2 i pi (n a + m b)}|, by rows of
// precomputed powers
double grid_sup(const TwistedSequence& f, int g) {
  std::vector<std::pair<LatticePoint, cplx>> terms(f.entries().begin(), f.entries().end());
  std::vector<std::vector<cplx>> col(terms.size(), std::vector<cplx>(g));
  for (std::size_t t = 0; t < terms.size(); ++t)
    for (int j = 0; j < g; ++j) col[t][j] = std::exp(cplx{0.0, 2 * oracle::pi * j / g * double(terms[t].first.m)});
  double best = 0.0;
  std::vector<cplx> row(terms.size());
  for (int i = 0; i < g; ++i) {
    for (std::size_t t = 0; t < terms.size(); ++t)
      row[t] = terms[t].second * std::exp(cplx{0.0, 2 * oracle::pi * i / g * double(terms[t].first.n)});
    for (int j = 0; j < g; ++j) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < terms.size(); ++t) s += row[t] * col[t][j];
      best = std::max(best, std::abs(s));
    }
  }
  return best;
}

Outcome algebra() {
  Tally t;
  t.add(check_algebra(101, 20));
  Rng rng(11);
  for (int k = 0; k < 5; ++k) {
    const double th = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const TwistedSequence f = random_sequence(rng, 4, 10), g = random_sequence(rng, 4, 10), h = random_sequence(rng, 4, 10);
    t.expect("oracle_convolution", dense_diff(oracle::twisted(th, dense(f), dense(g)), convolve(th, f, g)), 1e-12);
    const auto left = oracle::twisted(th, oracle::twisted(th, dense(f), dense(g)), dense(h));
    t.expect("oracle_associativity", dense_diff(left, convolve(th, f, convolve(th, g, h))), 1e-12);
    // uv = e^{-2 i pi theta} vu read off the brute-force product
    const oracle::Dense u{{{1, 0}, 1.0}}, v{{{0, 1}, 1.0}};
    const cplx r = oracle::twisted(th, u, v).at({1, 1}) / oracle::twisted(th, v, u).at({1, 1});
    const cplx lib = convolve(th, TwistedSequence::delta({1, 0}), TwistedSequence::delta({0, 1})).at({1, 1}) /
                     convolve(th, TwistedSequence::delta({0, 1}), TwistedSequence::delta({1, 0})).at({1, 1});
    t.expect("uv_phase_sign", std::abs(r - lib), 1e-12);
  }
  return t.out;
}

Outcome torus() {
  Tally t;
  Rng rng(12);
  for (int k = 0; k < 3; ++k) {
    const TwistedSequence f = random_sequence(rng, 4, 6);
    const double sup = grid_sup(f, 2048);
    const double lib = fourier_sup_oracle(f, 2048);
    t.expect("grid_oracle_agreement", std::abs(sup - lib), 1e-12 * sup);
    const double lower = torus_norm_estimate(0.0, f, Window(128)).lower;
    t.add(make_check("fourier_oracle_rel", std::abs(lower - sup) / sup, 0.0, 0.02));
  }
  for (int k = 0; k < 50; ++k) {
    const double th = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const TwistedSequence f = random_sequence(rng, 2, 5);
    double l1 = 0.0;
    for (const auto& [p, c] : f.entries()) l1 += std::abs(c);
    double prev = 0.0;
    for (int r : {2, 4, 8, 16}) {
      const NormEstimate e = torus_norm_estimate(th, f, Window(r));
      t.add(make_check("window_monotone", prev, e.lower, 1e-12 * l1));
      t.add(make_check("l1_domination", e.lower, l1, 1e-12 * l1));
      t.add(make_check("upper_is_l1", std::abs(e.upper - l1), 1e-12 * l1));
      prev = e.lower;
    }
  }
  return t.out;
}

Outcome gaussian_gram() {
  Tally t;
  t.add(check_gaussian_gram(16));
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const double e = ctx.eth;
  const GramResult G = gram(ctx, ground_gaussian(), ground_gaussian());
  // sigma^{n,m} g(s) = e^{i pi e n m} e^{2 i pi n s} g(s + e m), integrated on a grid
  auto g = [](double s) { return std::pow(2.0, 0.25) * std::exp(-oracle::pi * s * s); };
  double err = 0.0, quad = 0.0;
  for (long n = -5; n <= 5; ++n)
    for (long m = -9; m <= 9; ++m) {
      const double want = std::exp(-oracle::pi * (n * n + e * e * m * m) / 2);
      const cplx c = G.coefficients.at({n, m});
      err = std::max(err, std::abs(std::abs(c) - want));
      if (std::abs(n) <= 2 && std::abs(m) <= 3) {
        const cplx q = oracle::trapezoid([&](double s) {
          return std::exp(cplx{0.0, oracle::pi * e * n * m + 2 * oracle::pi * n * s}) * g(s + e * m) * g(s);
        });
        quad = std::max(quad, std::abs(std::abs(q) - want));
      }
    }
  t.expect("closed_form", err, 1e-9);
  t.expect("integral_oracle", quad, 1e-9);
  const Eigen::MatrixXcd A = assemble_pi(ctx.theta, G.coefficients, Window(16)).matrix;
  const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
  t.add(make_check("psd_eigen", -Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues().minCoeff(), 1e-8));
  return t.out;
}

Outcome actions() {
  Tally t;
  int i = 0;
  for (auto c : {HeisenbergContext::make(0, 1, 1, 0.5), HeisenbergContext::make(1, 2, 2, 0.8),
                 HeisenbergContext::make(1, 3, 3, 1.0 / 3.0 + 0.25)})
    t.add(check_actions(c, 140 + i++, 20, Window(8)));
  // L^2 isometry by the grid integral
  Rng rng(14);
  const WaveFunction xi = random_wave(rng, 1, 3);
  auto l2 = [](const WaveFunction& w) {
    return std::sqrt(oracle::trapezoid([&](double s) { return cplx{std::norm(w.evaluate(s)[0]), 0.0}; }).real());
  };
  const double n0 = l2(xi);
  for (int k = 0; k < 5; ++k) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    t.expect("l2_isometry_oracle", std::abs(l2(heisenberg_act(0.5, u(rng), u(rng), u(rng), xi)) - n0), 1e-10);
  }
  return t.out;
}

Outcome strong_continuity() {
  Tally t;
  t.add(check_strong_continuity(0.5, 15, 32, 4096, 14));
  return t.out;
}

Outcome dnorm() {
  Tally t;
  DNormOptions opt;
  opt.window = Window(4);
  opt.angles = 16;
  t.add(check_dnorm(16, 20, DirectionSample::make(5, 16, 1e-3, 10.0), opt));
  return t.out;
}

Outcome leibniz() {
  Tally t;
  LeibnizOptions lo;
  lo.dnorm.window = Window(4);
  lo.dnorm.angles = 16;
  lo.lhs_samples = DirectionSample::make(2, 8, 1e-3, 1e-1);
  const Report r = check_leibniz(17, 100, lo);
  t.add(r);
  return t.out;
}

Outcome ip_lemma() {
  Tally t;
  t.add(check_ip_lemma({0.1, 0.01, 0.001}));
  return t.out;
}

Outcome weyl() {
  Tally t;
  t.add(check_weyl(0.5, 19, 20, 3, 1.0));
  // the plane integral of psi^0 by composite Simpson on [0, 20]
  const double e = 0.5;
  auto fr = [&](double r) { return e * std::exp(-oracle::pi * e * r * r / 2) * r; };
  const int n = 20000;
  const double R = 20.0, h = R / n;
  double s = fr(0.0) + fr(R);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * fr(i * h);
  s *= h / 3;
  t.expect("psi0_integral_oracle", std::abs(2 * oracle::pi * s - 2.0), 1e-10);
  return t.out;
}

Outcome smoothing_net() {
  Tally t;
  DNormOptions opt;
  opt.window = Window(4);
  opt.angles = 16;
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  t.add(check_smoothing(ctx, {0.2, 0.1, 0.05}, PlaneNorm::euclid, opt));
  t.add(check_net(ctx, 20, 0.2, PlaneNorm::euclid, opt));
  return t.out;
}

Outcome sweep() {
  Tally t;
  t.add(check_sweep(continuity_sweep(0.5, RunConfig{}.sweep_deltas(), Window(8), false), true));
  return t.out;
}

Outcome determinism() {
  Tally t;
  const fs::path dir = fs::temp_directory_path() / "hmod_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunConfig cfg;
  std::string bytes[2];
  bool pass[2];
  for (int k = 0; k < 2; ++k) {
    set_threads(k + 1);
    const VerifyResult r = run_verify(cfg);
    pass[k] = r.pass;
    const fs::path p = dir / ("verify_" + std::to_string(k + 1) + ".csv");
    write_report_csv(p.string(), r.rows);
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    bytes[k] = o.str();
  }
  set_threads(0);
  t.add(CheckRow{"verify_passes", 0.0, 0.0, 0.0, pass[0] && pass[1]});
  t.add(CheckRow{"byte_identical", double(bytes[0] != bytes[1]), 0.0, 0.0, bytes[0] == bytes[1] && !bytes[0].empty()});
  return t.out;
}

struct Criterion {
  const char* title;
  double limit;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {"algebraic exactness", 5, algebra},
      {"torus-norm oracle", 30, torus},
      {"Gaussian gram closed form", 10, gaussian_gram},
      {"action identities", 60, actions},
      {"strong-continuity envelope", 30, strong_continuity},
      {"D-norm consistency", 120, dnorm},
      {"Leibniz suite", 120, leibniz},
      {"inner product lemma bound", 60, ip_lemma},
      {"Weyl/Laguerre machinery", 120, weyl},
      {"smoothing bound and net", 180, smoothing_net},
      {"continuity sweep", 60, sweep},
      {"determinism", 60, determinism},
  };
  bool ok = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && int(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = sec < all[i].limit;
    const bool pass = o.pass && in_time;
    ok = ok && pass;
    std::printf("criterion %2zu %-28s %s  %.1f s (limit %.0f s)  %s%s\n", i + 1, all[i].title, pass ? "PASS" : "FAIL",
                sec, all[i].limit, o.detail.c_str(), in_time ? "" : " [over time]");
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
