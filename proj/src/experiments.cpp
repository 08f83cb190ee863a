#include "hmod/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Core>

#include "hmod/errors.hpp"
#include "hmod/parallel.hpp"

namespace hmod {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = lo + (hi - lo) * i / (n - 1);
  return s;
}

// max over the grid of |a(s) - b(s)|, and of |a(s)|
double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
double max_abs(const std::vector<cplx>& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

std::string tagged(const std::string& name, double v) {
  std::ostringstream o;
  o << name << "@" << v;
  return o.str();
}

Report prefixed(const std::string& area, Report rows) {
  for (auto& r : rows) r.name = area + "." + r.name;
  return rows;
}

void append(Report& to, const Report& from) { to.insert(to.end(), from.begin(), from.end()); }

}  // namespace

TwistedSequence random_sequence(Rng& rng, int radius, int count) {
  TwistedSequence f;
  for (int i = 0; i < count; ++i) {
    const LatticePoint p{uniform_int(rng, -radius, radius), uniform_int(rng, -radius, radius)};
    const double re = uniform(rng, -1.0, 1.0);
    const double im = uniform(rng, -1.0, 1.0);
    f.add(p, {re, im});
  }
  return f;
}

WaveFunction random_wave(Rng& rng, int d, int terms) {
  std::vector<WaveTerm> ts;
  for (int i = 0; i < terms; ++i) {
    WaveTerm t;
    t.amp.resize(d);
    for (auto& a : t.amp) {
      const double re = uniform(rng, -1.0, 1.0);
      a = {re, uniform(rng, -1.0, 1.0)};
    }
    t.k = static_cast<int>(uniform_int(rng, 0, 2));
    t.b = uniform(rng, -0.5, 0.5);
    t.a = uniform(rng, 0.5 * kPi, 2.0 * kPi);
    t.phi = uniform(rng, -0.5, 0.5);
    ts.push_back(std::move(t));
  }
  return WaveFunction(d, std::move(ts));
}

CheckRow worst(const std::string& name, const Report& rows) {
  if (rows.empty()) return {name, 0.0, 0.0, 0.0, true};
  auto it = std::max_element(rows.begin(), rows.end(), [](const CheckRow& a, const CheckRow& b) {
    // failures first, then by margin
    if (a.pass != b.pass) return a.pass;
    return a.lhs_lower - a.rhs_upper - a.slack < b.lhs_lower - b.rhs_upper - b.slack;
  });
  CheckRow r = *it;
  r.name = name;
  return r;
}

// ---------------------------------------------------------------- algebra

Report check_algebra(std::uint64_t seed, int trials) {
  Rng rng(seed);
  Report bich, assoc, star, period, invol, submult, phase;
  auto point = [&](long r) { return LatticePoint{uniform_int(rng, -r, r), uniform_int(rng, -r, r)}; };
  for (int t = 0; t < trials; ++t) {
    const double theta = uniform(rng, -2.0, 2.0);
    const LatticePoint a = point(20), a2 = point(20), b = point(20);
    const double e1 = std::abs(cocycle(theta, a + a2, b) - cocycle(theta, a, b) * cocycle(theta, a2, b));
    const double e2 = std::abs(cocycle(theta, b, a + a2) - cocycle(theta, b, a) * cocycle(theta, b, a2));
    bich.push_back(make_check("", std::max(e1, e2), 1e-12));

    const TwistedSequence f = random_sequence(rng, 4, 8), g = random_sequence(rng, 4, 8),
                          h = random_sequence(rng, 4, 8);
    assoc.push_back(make_check(
        "", max_abs_diff(convolve(theta, convolve(theta, f, g), h), convolve(theta, f, convolve(theta, g, h))),
        1e-12));
    star.push_back(make_check(
        "", max_abs_diff(adjoint(convolve(theta, f, g)), convolve(theta, adjoint(g), adjoint(f))), 1e-12));
    period.push_back(make_check("", max_abs_diff(convolve(theta + 2.0, f, g), convolve(theta, f, g)), 1e-12));
    invol.push_back(make_check("", max_abs_diff(adjoint(adjoint(f)), f), 0.0));
    const double l1 = l1_norm(f) * l1_norm(g);
    submult.push_back(make_check("", l1_norm(convolve(theta, f, g)), l1, 1e-12 * l1));

    // uv against vu from the convolution itself
    const TwistedSequence u = TwistedSequence::delta({1, 0}), v = TwistedSequence::delta({0, 1});
    const cplx ratio = convolve(theta, u, v).at({1, 1}) / convolve(theta, v, u).at({1, 1});
    phase.push_back(make_check("", std::abs(ratio - std::polar(1.0, -2.0 * kPi * theta)), 1e-12));
  }

  Report order, relation;
  for (const auto& [p, q] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 5}, {3, 7}, {4, 9}}) {
    const auto ctx = HeisenbergContext::make(p, q, q, double(p) / q + 0.1);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(q, q);
    Eigen::MatrixXcd uq = I, vq = I;
    for (int k = 0; k < q; ++k) uq = uq * ctx.clock, vq = vq * ctx.shift;
    order.push_back(make_check("", std::max((uq - I).norm(), (vq - I).norm()), 1e-12));
    const cplx z = ctx.clock_ratio();
    relation.push_back(make_check("", (ctx.clock * ctx.shift - z * ctx.shift * ctx.clock).norm(), 1e-12));
    // the clock/shift phase is the convolution phase at theta = p/q
    const double t = double(p) / q;
    const TwistedSequence u = TwistedSequence::delta({1, 0}), v = TwistedSequence::delta({0, 1});
    const cplx ratio = convolve(t, u, v).at({1, 1}) / convolve(t, v, u).at({1, 1});
    phase.push_back(make_check("", std::abs(ratio - z), 1e-12));
  }

  return prefixed("algebra", {worst("cocycle_bicharacter", bich), worst("associativity", assoc),
                              worst("star_law", star), worst("period_two", period), worst("involution", invol),
                              worst("l1_submultiplicative", submult), worst("clock_shift_order", order),
                              worst("clock_shift_relation", relation), worst("uv_phase_oracle", phase)});
}

// ---------------------------------------------------------------- torus

Report check_torus(std::uint64_t seed, int pairs) {
  Rng rng(seed);
  Report mono, dom, adj, dual, pos;
  for (int t = 0; t < pairs; ++t) {
    const double theta = uniform(rng, -1.0, 1.0);
    const TwistedSequence f = random_sequence(rng, 2, 5);
    const double l1 = l1_norm(f);
    double prev = 0.0;
    for (int r : {4, 8, 16}) {
      const NormEstimate e = torus_norm_estimate(theta, f, Window(r));
      mono.push_back(make_check("", prev, e.lower, 1e-12 * l1));
      dom.push_back(make_check("", e.lower, e.upper, 0.0));
      prev = e.lower;
    }
    const Window w8(8);
    const double base = torus_norm_estimate(theta, f, w8).lower;
    adj.push_back(make_check("", std::abs(base - torus_norm_estimate(theta, adjoint(f), w8).lower), 1e-12));
    const cplx z1 = std::polar(1.0, uniform(rng, 0.0, 2.0 * kPi));
    const cplx z2 = std::polar(1.0, uniform(rng, 0.0, 2.0 * kPi));
    dual.push_back(make_check("", std::abs(base - torus_norm_estimate(theta, dual_action(z1, z2, f), w8).lower),
                              1e-12));
    const TwistedSequence h = convolve(theta, adjoint(f), f);
    pos.push_back(make_check("", -min_eigenvalue(assemble_pi(theta, h, w8)), 1e-10));
  }
  return prefixed("torus", {worst("window_monotone", mono), worst("l1_domination", dom),
                            worst("adjoint_symmetry", adj), worst("dual_invariance", dual),
                            worst("positivity_witness", pos)});
}

Report check_torus_oracle(std::uint64_t seed, int polys, int window, int grid_points) {
  Rng rng(seed);
  Report rel;
  for (int t = 0; t < polys; ++t) {
    const TwistedSequence f = random_sequence(rng, 4, 6);
    const double oracle = fourier_sup_oracle(f, grid_points);
    const double lower = torus_norm_estimate(0.0, f, Window(window)).lower;
    rel.push_back(make_check("", std::abs(lower - oracle) / oracle, 0.02));
  }
  return prefixed("torus", {worst("fourier_oracle", rel)});
}

// ---------------------------------------------------------------- catalog

Report check_catalog(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const std::vector<double> s = grid(-3.0, 3.0, 61);
  Report act, law, proj, iso, conn, deriv, mono, closure, env, lin;
  for (int t = 0; t < trials; ++t) {
    const double eth = uniform(rng, 0.3, 1.5) * (t % 2 ? -1.0 : 1.0);
    const WaveFunction xi = random_wave(rng, 2, 3), om = random_wave(rng, 2, 2);
    const double x = uniform(rng, -1, 1), y = uniform(rng, -1, 1), u = uniform(rng, -1, 1);
    const double scale = std::max(1.0, max_abs(xi.evaluate_many(s)));

    // closed-form action against the displayed formula
    const WaveFunction a = heisenberg_act(eth, x, y, u, xi);
    double e = 0.0;
    for (double si : s) {
      const auto lhs = a.evaluate(si);
      const auto rhs = xi.evaluate(si + eth * y);
      const cplx ph = std::polar(1.0, 2.0 * kPi * (eth * u + si * x));
      for (int k = 0; k < 2; ++k) e = std::max(e, std::abs(lhs[k] - ph * rhs[k]));
    }
    act.push_back(make_check("", e / scale, 1e-12));
    closure.push_back(make_check("", std::abs(double(a.terms().size()) - double(xi.terms().size())), 0.0));

    // composition; the displayed action composes with u1 + u2 + x2 y1
    const double x2 = uniform(rng, -1, 1), y2 = uniform(rng, -1, 1), u2 = uniform(rng, -1, 1);
    const WaveFunction lhs = heisenberg_act(eth, x, y, u, heisenberg_act(eth, x2, y2, u2, xi));
    const WaveFunction rhs = heisenberg_act(eth, x + x2, y + y2, u + u2 + x2 * y, xi);
    law.push_back(make_check("", max_diff(lhs.evaluate_many(s), rhs.evaluate_many(s)) / scale, 1e-12));

    const cplx c = std::polar(1.0, kPi * eth * (x2 * y - x * y2));
    const WaveFunction ss = sigma_act(eth, x, y, sigma_act(eth, x2, y2, xi));
    const WaveFunction sp = sigma_act(eth, x + x2, y + y2, xi).scaled(c);
    proj.push_back(make_check("", max_diff(ss.evaluate_many(s), sp.evaluate_many(s)) / scale, 1e-12));

    const double n0 = l2_norm(xi), n1 = l2_norm(a);
    iso.push_back(make_check("", std::abs(n1 * n1 - n0 * n0), 1e-10));

    // connection against the difference quotient at t = 1e-4
    const double phi = uniform(rng, 0.0, 2.0 * kPi);
    const double cx = std::cos(phi), cy = std::sin(phi), h = 1e-4;
    const auto ctx = HeisenbergContext::make(0, 1, 2, eth);
    const auto nab = connection_apply(ctx, cx, cy, xi).evaluate_many(s);
    const auto q = (sigma_act(eth, h * cx, h * cy, xi) - xi).scaled(1.0 / h).evaluate_many(s);
    conn.push_back(make_check("", max_diff(nab, q) / max_abs(nab), 1e-3));

    // derivative against central differences, step 1e-5
    const WaveFunction dxi = derivative(xi);
    const auto dv = dxi.evaluate_many(s);
    std::vector<double> sp1(s), sm1(s);
    for (auto& v : sp1) v += 1e-5;
    for (auto& v : sm1) v -= 1e-5;
    const auto fp = xi.evaluate_many(sp1), fm = xi.evaluate_many(sm1);
    std::vector<cplx> fd(fp.size());
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (fp[i] - fm[i]) / 2e-5;
    deriv.push_back(make_check("", max_diff(dv, fd) / max_abs(dv), 1e-6));
    // (s-b)^k e^{2 i pi phi s} differentiates into degrees k-1, k, k+1
    closure.push_back(make_check("", double(dxi.terms().size()), 3.0 * xi.terms().size()));

    const WaveFunction mxi = monomial_multiply(xi);
    const auto mv = mxi.evaluate_many(s), xv = xi.evaluate_many(s);
    double me = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (int k = 0; k < 2; ++k) me = std::max(me, std::abs(mv[2 * i + k] - s[i] * xv[2 * i + k]));
    mono.push_back(make_check("", me / scale, 1e-12));
    closure.push_back(make_check("", double(mxi.terms().size()), 2.0 * xi.terms().size()));

    // sampled (1 + s^2) |xi^(i)| never exceeds the certified envelope
    const double M = decay_envelope(xi);
    const std::vector<double> fine = grid(-10.0, 10.0, 4001);
    double sampled = 0.0;
    WaveFunction di = xi;
    for (int i = 0; i <= 2; ++i, di = derivative(di)) {
      const auto v = di.evaluate_many(fine);
      for (std::size_t j = 0; j < fine.size(); ++j)
        for (int k = 0; k < 2; ++k)
          sampled = std::max(sampled, (1.0 + fine[j] * fine[j]) * std::abs(v[2 * j + k]));
    }
    env.push_back(make_check("", sampled, M, 1e-12 * M));

    const auto sum = (xi + om).evaluate_many(s), a1 = xi.evaluate_many(s), a2 = om.evaluate_many(s);
    double le = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) le = std::max(le, std::abs(sum[i] - a1[i] - a2[i]));
    lin.push_back(make_check("", le / scale, 1e-14));
  }
  return prefixed("catalog", {worst("action_pointwise", act), worst("group_law", law),
                              worst("sigma_projective", proj), worst("l2_isometry", iso),
                              worst("connection_identity", conn), worst("derivative_fd", deriv),
                              worst("monomial_pointwise", mono), worst("closure_term_counts", closure),
                              worst("decay_envelope", env), worst("evaluate_linearity", lin)});
}

// ---------------------------------------------------------------- module

Report check_gaussian_gram(int window) {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  const GramResult gr = gram(ctx, g, g);
  double e = 0.0;
  for (long n = -5; n <= 5; ++n)
    for (long m = -9; m <= 9; ++m) {
      const double want = std::exp(-0.5 * kPi * (n * n + ctx.eth * ctx.eth * m * m));
      e = std::max(e, std::abs(std::abs(gr.coefficients.at({n, m})) - want));
    }
  const double mineig = min_eigenvalue(assemble_pi(ctx.theta, gr.coefficients, Window(window)));
  return prefixed("module", {make_check("gaussian_gram_closed_form", e, 1e-9),
                             make_check("gaussian_gram_psd", -mineig, 1e-8)});
}

Report check_module(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const std::vector<HeisenbergContext> ctxs{HeisenbergContext::make(0, 1, 1, 0.5),
                                            HeisenbergContext::make(1, 2, 2, 0.5 + 0.1 * std::sqrt(2.0)),
                                            HeisenbergContext::make(1, 3, 3, 1.0 / 3.0 + 0.2)};
  const std::vector<double> s = grid(-3.0, 3.0, 41);
  Report exact, proj, left, conj, pos, corr;
  for (int t = 0; t < trials; ++t) {
    const auto& ctx = ctxs[t % ctxs.size()];
    const WaveFunction xi = random_wave(rng, ctx.d, 1 + t % 3), om = random_wave(rng, ctx.d, 2);
    const GramResult g = gram(ctx, xi, om);
    double e = 0.0;
    for (long n = -2; n <= 2; ++n)
      for (long m = -2; m <= 2; ++m)
        e = std::max(e, std::abs(g.coefficients.at({n, m}) - gram_coefficient_exact(ctx, xi, om, n, m)));
    exact.push_back(make_check("", e, 1e-10));

    const LatticePoint a{uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)};
    const LatticePoint b{uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)};
    const auto lhs = module_act_single(ctx, a.n, a.m, module_act_single(ctx, b.n, b.m, xi)).evaluate_many(s);
    const auto rhs = module_act_single(ctx, a.n + b.n, a.m + b.m, xi).scaled(cocycle(ctx.theta, a, b)).evaluate_many(s);
    proj.push_back(make_check("", max_diff(lhs, rhs), 1e-10));

    const TwistedSequence f = random_sequence(rng, 2, 4);
    const GramResult gl = gram(ctx, module_act(ctx, f, xi), om);
    left.push_back(make_check("", max_abs_diff(gl.coefficients, convolve(ctx.theta, f, g.coefficients)), 1e-10));
    conj.push_back(make_check("", max_abs_diff(gram(ctx, om, xi).coefficients, adjoint(g.coefficients)), 1e-10));

    const GramResult gxx = gram(ctx, xi, xi);
    pos.push_back(make_check("", -min_eigenvalue(assemble_pi(ctx.theta, gxx.coefficients, Window(8))), 1e-10));

    // |alpha(f xi)| <= |f|_1 |xi|
    const WaveFunction act = heisenberg_act(ctx.eth, uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1),
                                            module_act(ctx, f, xi));
    const ModuleNormOptions mo{Window(8), {}, {}};
    const double lhs_n = module_norm(ctx, act, mo).lower;
    const double rhs_n = l1_norm(f) * module_norm_upper(ctx, xi);
    corr.push_back(make_check("", lhs_n, rhs_n, 1e-12 * rhs_n));
  }
  return prefixed("module", {worst("gram_exact_vs_quadrature", exact), worst("projective_representation", proj),
                             worst("left_module", left), worst("conjugate_symmetry", conj),
                             worst("gram_positive", pos), worst("action_norm_bound", corr)});
}

Report check_actions(const HeisenbergContext& ctx, std::uint64_t seed, int elements, const Window& window) {
  Rng rng(seed);
  const WaveFunction xi = random_wave(rng, ctx.d, 2), om = random_wave(rng, ctx.d, 2);
  const TwistedSequence f = random_sequence(rng, 2, 4);
  const GramResult G = gram(ctx, xi, om);
  const ModuleNormOptions mo{window, {}, {}};
  const double N = module_norm(ctx, xi, mo).lower;
  const WaveFunction fxi = module_act(ctx, f, xi);
  const std::vector<double> s = grid(-3.0, 3.0, 41);
  Report cov, iso, morph;
  for (int t = 0; t < elements; ++t) {
    const double x = uniform(rng, -1, 1), y = uniform(rng, -1, 1), u = uniform(rng, -1, 1);
    // with the gram conjugate-linear in its second slot the dual parameter is
    // (exp(-2 i pi eth y), exp(2 i pi eth x))
    const cplx z1 = std::polar(1.0, -2.0 * kPi * ctx.eth * y), z2 = std::polar(1.0, 2.0 * kPi * ctx.eth * x);
    const WaveFunction axi = heisenberg_act(ctx.eth, x, y, u, xi), aom = heisenberg_act(ctx.eth, x, y, u, om);
    cov.push_back(make_check("", max_abs_diff(gram(ctx, axi, aom).coefficients, dual_action(z1, z2, G.coefficients)),
                             1e-9));
    iso.push_back(make_check("", std::abs(module_norm(ctx, axi, mo).lower - N), 1e-8));
    const auto lhs = heisenberg_act(ctx.eth, x, y, u, fxi).evaluate_many(s);
    const auto rhs = module_act(ctx, dual_action(z1, z2, f), axi).evaluate_many(s);
    morph.push_back(make_check("", max_diff(lhs, rhs), 1e-9));
  }
  std::ostringstream tag;
  tag << "[" << ctx.p << "/" << ctx.q << ",d=" << ctx.d << "]";
  return prefixed("actions", {worst("covariance" + tag.str(), cov), worst("isometry" + tag.str(), iso),
                              worst("morphism" + tag.str(), morph)});
}

// ---------------------------------------------------------------- strong continuity

ContinuityFit fit_strong_continuity(double eth, std::uint64_t seed, int elements, int grid_points, int levels) {
  Rng rng(seed);
  const WaveFunction g0 = ground_gaussian(), g1 = derivative(g0), g2 = derivative(g1);
  const std::vector<double> s = grid(-8.0, 8.0, grid_points);
  const std::vector<std::vector<cplx>> base{g0.evaluate_many(s), g1.evaluate_many(s), g2.evaluate_many(s)};
  auto ratio = [&](double x, double y, double u) {
    const double r = std::abs(x) + std::abs(y) + std::abs(u);
    double best = 0.0;
    const WaveFunction* gs[3] = {&g0, &g1, &g2};
    for (int i = 0; i < 3; ++i) {
      const auto v = heisenberg_act(eth, x, y, u, *gs[i]).evaluate_many(s);
      for (std::size_t j = 0; j < s.size(); ++j)
        best = std::max(best, (1.0 + s[j] * s[j]) * std::abs(v[j] - base[i][j]) / r);
    }
    return best;
  };
  auto random_element = [&]() {
    double a = uniform(rng, -1, 1), b = uniform(rng, -1, 1), c = uniform(rng, -1, 1);
    const double n = std::abs(a) + std::abs(b) + std::abs(c);
    const double r = std::pow(10.0, uniform(rng, -3.0, 0.0));
    return std::array<double, 3>{a / n * r, b / n * r, c / n * r};
  };
  ContinuityFit fit;
  // the ratio is sublinear in the direction, so the l1-sphere vertices carry the sup
  for (double r : {1.0, 0.1, 0.01, 0.001})
    for (int axis = 0; axis < 3; ++axis)
      for (double sg : {-1.0, 1.0}) {
        double e[3] = {0.0, 0.0, 0.0};
        e[axis] = sg * r;
        fit.K = std::max(fit.K, ratio(e[0], e[1], e[2]));
      }
  for (int t = 0; t < elements; ++t) {
    const auto e = random_element();
    fit.K = std::max(fit.K, ratio(e[0], e[1], e[2]));
  }
  for (int t = 0; t < elements; ++t) {
    const auto e = random_element();
    fit.validation_ratio = std::max(fit.validation_ratio, ratio(e[0], e[1], e[2]));
  }
  const auto ctx = HeisenbergContext::make(0, 1, 1, eth);
  for (int k = 1; k <= levels; ++k) {
    const double t = std::ldexp(1.0, -k);
    fit.path.push_back(module_norm_upper(ctx, heisenberg_act(eth, t, t, t, g0) - g0));
  }
  return fit;
}

Report check_strong_continuity(double eth, std::uint64_t seed, int elements, int grid_points, int levels) {
  const ContinuityFit fit = fit_strong_continuity(eth, seed, elements, grid_points, levels);
  double rise = -fit.path.front();
  for (std::size_t k = 1; k < fit.path.size(); ++k) rise = std::max(rise, fit.path[k] - fit.path[k - 1]);
  return prefixed("continuity", {make_check("strong_envelope", fit.validation_ratio, fit.K, 0.25 * fit.K),
                                 make_check("module_path_monotone", rise, 0.0),
                                 make_check("module_path_limit", fit.path.back(), 1e-3)});
}

// ---------------------------------------------------------------- D-norm

Report check_dnorm(std::uint64_t seed, int vectors, const DirectionSample& samples, const DNormOptions& opt) {
  Rng rng(seed);
  const double thetas[3] = {0.3, 0.5, 1.0 / std::sqrt(2.0)};
  Report sand, gsand, cons, ball, l2;
  for (int i = 0; i < vectors; ++i) {
    const auto ctx = HeisenbergContext::make(0, 1, 1, thetas[i % 3]);
    const WaveFunction xi = random_wave(rng, 1, 1 + i % 3);
    const DNormEstimate e = dnorm_estimate(ctx, xi, samples, opt);
    const NormEstimate gr = gradient_opnorm(ctx, xi, samples.norm, opt);
    sand.push_back(make_check("", e.lower, e.upper, 1e-9 * e.upper));
    gsand.push_back(make_check("", gr.lower, gr.upper, 1e-9 * gr.upper));
    cons.push_back(make_check("", std::abs(e.sup_lower - gr.lower) / std::max(e.sup_lower, gr.lower), 0.03));
    double lo = INFINITY, hi = 0.0;
    for (double delta : {0.1, 1.0, 10.0}) {
      const double v = sup_lower_within(e, samples, delta);
      lo = std::min(lo, v), hi = std::max(hi, v);
    }
    ball.push_back(make_check("", (hi - lo) / hi, 0.02));

    const double phi = uniform(rng, 0.0, 2.0 * kPi), t = 1e-4;
    const double x = std::cos(phi), y = std::sin(phi);
    const WaveFunction q = (sigma_act(ctx.eth, t * x, t * y, xi) - xi).scaled(1.0 / t);
    l2.push_back(make_check("", l2_norm(q - connection_apply(ctx, x, y, xi)), 1e-3));
  }
  return prefixed("dnorm", {worst("sandwich", sand), worst("gradient_sandwich", gsand),
                            worst("sup_vs_connection", cons), worst("delta_ball", ball),
                            worst("difference_quotient_l2", l2)});
}

Report check_dnorm_refinement(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm) {
  DNormOptions coarse;
  coarse.window = Window(4);
  coarse.gram.threshold = 1e-12;
  coarse.lower_only = true;
  DNormOptions fine = coarse;
  fine.window = Window(6);
  fine.gram.threshold = 1e-14;
  // 3 radii nest inside 5, 4 angles inside 8
  const double lo = dnorm_estimate(ctx, xi, DirectionSample::make(3, 4, 1e-3, 10.0, norm), coarse).lower;
  const double hi = dnorm_estimate(ctx, xi, DirectionSample::make(5, 8, 1e-3, 10.0, norm), fine).lower;
  return prefixed("dnorm", {make_check("refinement_monotone", lo, hi, 1e-12 * hi)});
}

Report check_leibniz(std::uint64_t seed, int triples, const LeibnizOptions& opt) {
  Rng rng(seed);
  const std::vector<HeisenbergContext> ctxs{HeisenbergContext::make(0, 1, 1, 0.5),
                                            HeisenbergContext::make(0, 1, 1, 1.0 / std::sqrt(2.0)),
                                            HeisenbergContext::make(1, 2, 2, 0.5 + 0.1 * std::sqrt(2.0))};
  Report inner, mod, mod2;
  for (int t = 0; t < triples; ++t) {
    const auto& ctx = ctxs[t % ctxs.size()];
    const TwistedSequence f = random_sequence(rng, 2, static_cast<int>(uniform_int(rng, 1, 4)));
    const WaveFunction xi = random_wave(rng, ctx.d, static_cast<int>(uniform_int(rng, 1, 3)));
    const WaveFunction om = random_wave(rng, ctx.d, static_cast<int>(uniform_int(rng, 1, 3)));
    const Report r = leibniz_report(ctx, f, xi, om, opt);
    inner.push_back(r[0]), mod.push_back(r[1]), mod2.push_back(r[2]);
  }
  return prefixed("leibniz", {worst("inner", inner), worst("modular", mod), worst("modular_factor2", mod2)});
}

Report check_ip_lemma(const std::vector<double>& perturbations) {
  const auto a = HeisenbergContext::make(0, 1, 1, 0.5);
  const WaveFunction g = ground_gaussian();
  Report rows;
  for (double d : perturbations) {
    const auto b = HeisenbergContext::make(0, 1, 1, 0.5 + d);
    const double lhs = gram_l1_distance(a, b, g, g, g);
    const double rhs = ip_lemma_bound(a, b, g, g, g).total();
    rows.push_back(make_check(tagged("ip_lemma", d), lhs, rhs, 1e-6));
  }
  return prefixed("module", rows);
}

// ---------------------------------------------------------------- Weyl / Laguerre

Report check_weyl(double eth, std::uint64_t seed, int contraction_pairs, int orthogonality_max, double calibration) {
  Rng rng(seed);
  Report rows;
  rows.push_back(make_check("psi0_integral", std::abs(plane_integral(laguerre_profile(eth, 0)) - 2.0), 1e-10));

  double ne = 0.0;
  for (int n = 0; n <= 8; ++n) {
    const RadialProfile f = laguerre_profile(eth, n);
    const double nn = radial_integral([&](double r) { return f(r) * f(r); }, f.radius);
    ne = std::max(ne, std::abs(nn - eth / (2.0 * kPi)));
  }
  rows.push_back(make_check("laguerre_norms", ne, 1e-12));

  const int jmax = std::max(3, orthogonality_max);
  std::vector<Cubature2D> cubs;
  std::vector<SmoothingOperator> P;
  for (int j = 0; j <= jmax; ++j) {
    cubs.push_back(laguerre_cubature(eth, j));
    P.emplace_back(eth, planar(laguerre_profile(eth, j)), cubs.back(), 1);
  }
  double ce = 0.0;
  for (int j = 0; j <= 3; ++j) ce = std::max(ce, std::abs(projection_calibration(eth, j, cubs[j]) - calibration));
  rows.push_back(make_check("projection_calibration", ce, 1e-6));

  // every integrand below is a Gaussian of width <= sqrt(eth), negligible past |s| = 6
  const double T = 6.0, panel = 0.5;
  const WaveFunction H0 = hermite_vector(eth, 0), H1 = hermite_vector(eth, 1);
  const Evaluator e0 = evaluator_of(H0), e1 = evaluator_of(H1);
  const Evaluator zero = [](const std::vector<double>& s) { return std::vector<cplx>(s.size(), 0.0); };
  rows.push_back(make_check("projection_range_h0", l2_distance(P[0].apply(e0), e0, 1, T, panel), 1e-6));
  rows.push_back(make_check("projection_kills_h1", l2_distance(P[0].apply(e1), zero, 1, T, panel), 1e-6));

  const WaveFunction xi = random_wave(rng, 1, 3);
  const Evaluator Px = P[0].apply(evaluator_of(xi));
  rows.push_back(make_check("idempotency", l2_distance(P[0].apply(Px), Px, 1, T, panel), 1e-6));

  Report orth;
  for (int i = 0; i <= orthogonality_max; ++i)
    for (int j = 0; j <= orthogonality_max; ++j) {
      if (i == j) continue;
      const Evaluator Hj = evaluator_of(hermite_vector(eth, j));
      orth.push_back(make_check("", l2_distance(P[i].apply(P[j].apply(Hj)), zero, 1, T, panel), 1e-6));
    }
  rows.push_back(worst("orthogonality", orth));

  // Cesaro means of the Laguerre expansion of exp(-r)
  RadialProfile f{[](double r) { return std::exp(-r); }, 40.0, std::exp(-40.0), "exp"};
  const double fn = radial_integral([&](double r) { return std::abs(f(r)); }, f.radius, 0.01, 16);
  const double e8 = radial_l1_distance(cesaro_profile(eth, f, 8), f, f.radius);
  const double e64 = radial_l1_distance(cesaro_profile(eth, f, 64), f, f.radius);
  CheckRow improve = make_check("cesaro_improves", e64, e8);
  improve.pass = e64 < e8;
  rows.push_back(improve);
  rows.push_back(make_check("cesaro_l1", e64, 0.1 * fn));

  // linearity in the kernel, on one cubature
  {
    const Cubature2D cub = Cubature2D::tensor(4.0, 21);
    const PlanarKernel a = planar(laguerre_profile(eth, 0)), b = planar(laguerre_profile(eth, 2));
    const PlanarKernel ab{[a, b](double x, double y) { return a.eval(x, y) + 2.0 * b.eval(x, y); }, 4.0};
    const Evaluator ex = evaluator_of(xi);
    const std::vector<double> s = grid(-3.0, 3.0, 41);
    const auto va = SmoothingOperator(eth, a, cub, 1).apply(ex)(s);
    const auto vb = SmoothingOperator(eth, b, cub, 1).apply(ex)(s);
    const auto vab = SmoothingOperator(eth, ab, cub, 1).apply(ex)(s);
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) e = std::max(e, std::abs(vab[i] - va[i] - 2.0 * vb[i]));
    rows.push_back(make_check("kernel_linearity", e / std::max(1.0, max_abs(vab)), 1e-12));
  }

  // |sigma^f xi| <= |f|_1 |xi| for signed Gaussian kernels
  Report contr;
  const auto ctx = HeisenbergContext::make(0, 1, 1, eth);
  for (int t = 0; t < contraction_pairs; ++t) {
    const double c1 = uniform(rng, -1.5, 1.5), c2 = uniform(rng, -1.5, 1.5);
    const double a1 = uniform(rng, 1.0, 4.0), a2 = uniform(rng, 1.0, 4.0);
    const double x1 = uniform(rng, -0.5, 0.5), y1 = uniform(rng, -0.5, 0.5);
    const double R = 0.75 + std::sqrt(36.0 / std::min(a1, a2));
    const PlanarKernel k{[=](double x, double y) {
                           return c1 * std::exp(-a1 * ((x - x1) * (x - x1) + (y - y1) * (y - y1))) +
                                  c2 * std::exp(-a2 * (x * x + y * y));
                         },
                         R};
    // any discretization is a finite combination of isometries, so a coarse one suffices
    const Cubature2D cub = Cubature2D::tensor(R, 13);
    double mass = 0.0;
    for (std::size_t j = 0; j < cub.y.nodes.size(); ++j)
      for (std::size_t i = 0; i < cub.x.nodes.size(); ++i)
        mass += std::abs(cub.x.weights[i] * cub.y.weights[j] * k.eval(cub.x.nodes[i], cub.y.nodes[j]));
    const WaveFunction v = random_wave(rng, 1, 1 + t % 3);
    const double lhs = module_norm_lower(ctx, sigma_apply(ctx, k, cub, v), Window(4));
    const double rhs = mass * module_norm_upper(ctx, v);
    contr.push_back(make_check("", lhs, rhs, 1e-9 * rhs));
  }
  rows.push_back(worst("l1_contraction", contr));

  // theta - p/q = -eth against +eth, radial kernel
  {
    const auto pos = HeisenbergContext::make(0, 1, 1, eth);
    const auto neg = HeisenbergContext::make(1, 1, 1, 1.0 - eth);
    const PlanarKernel k = planar(laguerre_profile(eth, 1));
    const Cubature2D cub = Cubature2D::tensor(3.0, 21);
    const WaveFunction v = random_wave(rng, 1, 2);
    const std::vector<double> s = grid(-3.0, 3.0, 41);
    const auto a = sigma_apply(pos, k, cub, v).evaluate_many(s);
    const auto b = sigma_apply(neg, k, cub, v).evaluate_many(s);
    rows.push_back(make_check("negative_eth_symmetry", max_diff(a, b) / std::max(1.0, max_abs(a)), 1e-9));
  }

  // narrow unit-mass bumps approach the identity
  {
    const WaveFunction g = ground_gaussian();
    const Evaluator eg = evaluator_of(g);
    double prev = INFINITY, rise = -INFINITY;
    for (double r : {0.2, 0.1, 0.05}) {
      const SmoothingOperator op(eth, planar(bump_profile(r)), Cubature2D::tensor(r, 41), 1);
      const double e = l2_distance(op.apply(eg), eg, 1, T, panel);
      rise = std::max(rise, e - prev);
      prev = e;
    }
    rows.push_back(make_check("approximate_unit_trend", rise, 0.0));
  }
  return prefixed("weyl", rows);
}

// ---------------------------------------------------------------- smoothing

Report check_smoothing(const HeisenbergContext& ctx, const std::vector<double>& bump_radii, PlaneNorm norm,
                       const DNormOptions& opt) {
  Report rows;
  const WaveFunction g = ground_gaussian(ctx.d);
  const double scale = 2.0 * kPi * std::abs(ctx.eth);
  double prev = INFINITY, rise = -INFINITY;
  for (double r : bump_radii) {
    const double eps = scale * first_moment(bump_profile(r), norm);
    SmoothingCheck c = smoothing_bound_check(ctx, r, g, eps, norm, opt);
    c.row.name = tagged("bound", r);
    rows.push_back(c.row);
    rise = std::max(rise, c.row.lhs_lower - prev);
    prev = c.row.lhs_lower;
  }
  rows.push_back(make_check("lhs_trend", rise, 0.0));

  const SmoothingCheck z = smoothing_bound_check(ctx, 0.1, WaveFunction(ctx.d), 1.0, norm, opt);
  rows.push_back(make_check("zero_vector", std::max(z.row.lhs_lower, z.row.rhs_upper), 0.0));

  bool rejected = false;
  try {
    smoothing_bound_check(ctx, 0.1, g, 1e-6, norm, opt);
  } catch (const InvalidInput&) {
    rejected = true;
  }
  CheckRow gate{"moment_gate", rejected ? 0.0 : 1.0, 0.0, 0.0, rejected};
  rows.push_back(gate);
  return prefixed("smoothing", rows);
}

std::vector<WaveFunction> normalized_hermite_family(const HeisenbergContext& ctx, int count, PlaneNorm norm,
                                                    const DNormOptions& opt) {
  if (count > kHermiteMax + 1) throw InvalidInput("Hermite family larger than the catalog range");
  std::vector<WaveFunction> out(count);
#pragma omp parallel for schedule(dynamic) if (opt.exec == Exec::parallel)
  for (int j = 0; j < count; ++j) {
    DNormOptions o = opt;
    o.exec = Exec::serial, o.gram.exec = Exec::serial, o.power.exec = Exec::serial;
    const WaveFunction H = hermite_vector(std::abs(ctx.eth), j, ctx.d, 0);
    out[j] = H.scaled(1.0 / dnorm_upper(ctx, H, norm, o));
  }
  return out;
}

Report check_net(const HeisenbergContext& ctx, int vectors, double epsilon, PlaneNorm norm, const DNormOptions& opt) {
  const auto fam = normalized_hermite_family(ctx, vectors, norm, opt);
  NetOptions no;
  no.norm = norm;
  const NetReport rep = compactness_net(ctx, fam, epsilon, no);
  Report rows{make_check("net_residual", rep.max_residual, epsilon)};
  const NetReport one = compactness_net(ctx, {fam.front()}, epsilon, no);
  rows.push_back(make_check("single_vector", std::max(one.max_residual / epsilon, double(one.net_size)), 1.0));
  return prefixed("net", rows);
}

// ---------------------------------------------------------------- continuity sweep

std::vector<SweepRow> continuity_sweep(double theta_inf, const std::vector<double>& deltas, const Window& window,
                                       bool two_sided, const GramOptions& gopt, const WaveFunction& g) {
  if (g.d() != 1) throw InvalidInput("sweep vector must live in C^1");
  const auto c0 = HeisenbergContext::make(0, 1, 1, theta_inf);
  const ModuleNormOptions mo{window, gopt, {}};
  const double n0 = module_norm(c0, g, mo).lower;
  const TwistedSequence g0 = gram(c0, g, g, gopt).coefficients;
  std::vector<SweepRow> rows;
  for (double d : deltas) {
    SweepRow row{d, 0.0, 0.0};
    if (d != 0.0)
      for (double sign : two_sided ? std::vector<double>{1.0, -1.0} : std::vector<double>{1.0}) {
        const auto c = HeisenbergContext::make(0, 1, 1, theta_inf + sign * d);
        row.norm_diff = std::max(row.norm_diff, std::abs(module_norm(c, g, mo).lower - n0));
        row.gram_l1 = std::max(row.gram_l1, l1_norm(gram(c, g, g, gopt).coefficients - g0));
      }
    rows.push_back(row);
  }
  return rows;
}

Report check_sweep(const std::vector<SweepRow>& rows, bool endpoint) {
  Report out;
  double rise = -INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].delta < rows[i - 1].delta) rise = std::max(rise, rows[i].gram_l1 - rows[i - 1].gram_l1);
  out.push_back(make_check("gram_l1_monotone", std::isfinite(rise) ? rise : 0.0, 0.0));
  for (const auto& r : rows)
    if (r.delta == 0.0) out.push_back(make_check("zero_delta", std::max(r.norm_diff, r.gram_l1), 0.0));
  if (endpoint) {
    const SweepRow* last = nullptr;
    for (const auto& r : rows)
      if (r.delta > 0.0 && (!last || r.delta < last->delta)) last = &r;
    if (last) out.push_back(make_check(tagged("gram_l1_endpoint", last->delta), last->gram_l1, 1e-3));
  }
  return prefixed("sweep", out);
}

// ---------------------------------------------------------------- config

namespace {

const std::set<std::string> kKeys{"contexts", "window", "dnorm_window", "quadrature", "directions", "norm", "out",
                                  "seed", "threads", "calibration", "continuity", "smoothing", "net", "vectors",
                                  "sequences", "verify"};

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    check_keys(j, kKeys, "config");
    if (j.contains("contexts")) {
      c.contexts.clear();
      for (const auto& e : j.at("contexts")) {
        check_keys(e, {"p", "q", "d", "theta"}, "context");
        c.contexts.push_back({e.value("p", 0), e.value("q", 1), e.value("d", 1), e.at("theta").get<double>()});
      }
    }
    c.window = j.value("window", c.window);
    c.dnorm_window = j.value("dnorm_window", c.dnorm_window);
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      check_keys(q, {"order", "max_panel", "tail_tol"}, "quadrature");
      c.quad.order = q.value("order", c.quad.order);
      c.quad.max_panel = q.value("max_panel", c.quad.max_panel);
      c.quad.tail_tol = q.value("tail_tol", c.quad.tail_tol);
    }
    if (j.contains("directions")) {
      const auto& d = j.at("directions");
      check_keys(d, {"radii", "angles", "r_min", "r_max"}, "directions");
      c.radii = d.value("radii", c.radii);
      c.angles = d.value("angles", c.angles);
      c.r_min = d.value("r_min", c.r_min);
      c.r_max = d.value("r_max", c.r_max);
    }
    if (j.contains("norm")) c.norm = parse_plane_norm(j.at("norm").get<std::string>());
    c.out = j.value("out", c.out);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.calibration = j.value("calibration", c.calibration);
    if (j.contains("continuity")) {
      const auto& s = j.at("continuity");
      check_keys(s, {"theta_inf", "deltas", "two_sided"}, "continuity");
      c.theta_inf = s.value("theta_inf", c.theta_inf);
      c.deltas = s.value("deltas", c.deltas);
      c.two_sided = s.value("two_sided", c.two_sided);
    }
    if (j.contains("smoothing")) {
      const auto& s = j.at("smoothing");
      check_keys(s, {"bump_radii"}, "smoothing");
      c.bump_radii = s.value("bump_radii", c.bump_radii);
    }
    if (j.contains("net")) {
      const auto& s = j.at("net");
      check_keys(s, {"epsilon", "vectors"}, "net");
      c.net_epsilon = s.value("epsilon", c.net_epsilon);
      c.net_vectors = s.value("vectors", c.net_vectors);
    }
    if (j.contains("vectors"))
      for (const auto& v : j.at("vectors")) c.vectors.push_back(WaveFunction::from_json(v));
    if (j.contains("sequences"))
      for (const auto& v : j.at("sequences")) c.sequences.push_back(TwistedSequence::from_json(v));
    if (j.contains("verify")) {
      const auto& v = j.at("verify");
      VerifySizes& z = c.sizes;
      check_keys(v,
                 {"algebra_trials", "torus_pairs", "oracle_polys", "oracle_window", "oracle_grid", "catalog_trials",
                  "group_elements", "continuity_levels", "dnorm_vectors", "leibniz_triples", "contraction_pairs",
                  "orthogonality_max", "net_vectors", "sweep_levels"},
                 "verify");
      z.algebra_trials = v.value("algebra_trials", z.algebra_trials);
      z.torus_pairs = v.value("torus_pairs", z.torus_pairs);
      z.oracle_polys = v.value("oracle_polys", z.oracle_polys);
      z.oracle_window = v.value("oracle_window", z.oracle_window);
      z.oracle_grid = v.value("oracle_grid", z.oracle_grid);
      z.catalog_trials = v.value("catalog_trials", z.catalog_trials);
      z.group_elements = v.value("group_elements", z.group_elements);
      z.continuity_levels = v.value("continuity_levels", z.continuity_levels);
      z.dnorm_vectors = v.value("dnorm_vectors", z.dnorm_vectors);
      z.leibniz_triples = v.value("leibniz_triples", z.leibniz_triples);
      z.contraction_pairs = v.value("contraction_pairs", z.contraction_pairs);
      z.orthogonality_max = v.value("orthogonality_max", z.orthogonality_max);
      z.net_vectors = v.value("net_vectors", z.net_vectors);
      z.sweep_levels = v.value("sweep_levels", z.sweep_levels);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["contexts"] = nlohmann::json::array();
  for (const auto& c : contexts) j["contexts"].push_back({{"p", c.p}, {"q", c.q}, {"d", c.d}, {"theta", c.theta}});
  j["window"] = window;
  j["dnorm_window"] = dnorm_window;
  j["quadrature"] = {{"order", quad.order}, {"max_panel", quad.max_panel}, {"tail_tol", quad.tail_tol}};
  j["directions"] = {{"radii", radii}, {"angles", angles}, {"r_min", r_min}, {"r_max", r_max}};
  j["norm"] = to_string(norm);
  j["out"] = out;
  j["seed"] = seed;
  j["threads"] = threads;
  j["calibration"] = calibration;
  j["continuity"] = {{"theta_inf", theta_inf}, {"deltas", sweep_deltas()}, {"two_sided", two_sided}};
  j["smoothing"] = {{"bump_radii", bump_radii}};
  j["net"] = {{"epsilon", net_epsilon}, {"vectors", net_vectors}};
  j["vectors"] = nlohmann::json::array();
  for (const auto& v : vectors) j["vectors"].push_back(v.to_json());
  j["sequences"] = nlohmann::json::array();
  for (const auto& s : sequences) j["sequences"].push_back(s.to_json());
  const VerifySizes& z = sizes;
  j["verify"] = {{"algebra_trials", z.algebra_trials},   {"torus_pairs", z.torus_pairs},
                 {"oracle_polys", z.oracle_polys},       {"oracle_window", z.oracle_window},
                 {"oracle_grid", z.oracle_grid},         {"catalog_trials", z.catalog_trials},
                 {"group_elements", z.group_elements},   {"continuity_levels", z.continuity_levels},
                 {"dnorm_vectors", z.dnorm_vectors},     {"leibniz_triples", z.leibniz_triples},
                 {"contraction_pairs", z.contraction_pairs}, {"orthogonality_max", z.orthogonality_max},
                 {"net_vectors", z.net_vectors},         {"sweep_levels", z.sweep_levels}};
  return j;
}

void RunConfig::validate() const {
  if (contexts.empty()) throw ConfigError("at least one context is required");
  for (const auto& c : contexts) {
    try {
      HeisenbergContext::make(c.p, c.q, c.d, c.theta);
    } catch (const InvalidInput& e) {
      std::ostringstream o;
      o << "context (" << c.p << ", " << c.q << ", " << c.d << ", " << c.theta << "): " << e.what();
      throw ConfigError(o.str());
    }
  }
  if (window < 1 || window > 512) throw ConfigError("window must be in 1..512");
  if (dnorm_window < 1 || dnorm_window > 64) throw ConfigError("dnorm_window must be in 1..64");
  if (quad.order < 2 || !(quad.max_panel > 0.0) || !(quad.tail_tol > 0.0)) throw ConfigError("bad quadrature spec");
  if (radii < 1 || angles < 1 || !(r_min > 0.0) || !(r_max >= r_min)) throw ConfigError("bad direction sample");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (!(calibration > 0.0)) throw ConfigError("calibration must be positive");
  for (double d : sweep_deltas()) {
    if (!(d >= 0.0)) throw ConfigError("continuity deltas must be nonnegative");
    for (double sg : two_sided ? std::vector<double>{1.0, -1.0} : std::vector<double>{1.0})
      if (std::abs(theta_inf + sg * d - std::round(theta_inf + sg * d)) < 1e-12)
        throw ConfigError("continuity sweep reaches a rational theta = p/q with q = 1");
  }
  if (std::abs(theta_inf - std::round(theta_inf)) < 1e-12) throw ConfigError("theta_inf must not be an integer");
  for (double r : bump_radii)
    if (!(r > 0.0)) throw ConfigError("bump radii must be positive");
  if (!(net_epsilon > 0.0)) throw ConfigError("net epsilon must be positive");
  if (net_vectors < 1 || net_vectors > kHermiteMax + 1) throw ConfigError("net vectors must be in 1..33");
  for (const auto& v : vectors)
    if (v.d() != contexts.front().d) throw ConfigError("vector dimension does not match the first context");
}

std::vector<HeisenbergContext> RunConfig::make_contexts() const {
  std::vector<HeisenbergContext> out;
  for (const auto& c : contexts) out.push_back(HeisenbergContext::make(c.p, c.q, c.d, c.theta));
  return out;
}

DirectionSample RunConfig::directions() const { return DirectionSample::make(radii, angles, r_min, r_max, norm); }

DNormOptions RunConfig::dnorm_options() const {
  DNormOptions o;
  o.window = Window(dnorm_window);
  o.gram.quad = quad;
  o.angles = std::max(angles, 16);
  return o;
}

std::vector<double> RunConfig::sweep_deltas() const {
  if (!deltas.empty()) return deltas;
  std::vector<double> d;
  for (int k = 1; k <= 10; ++k) d.push_back(std::ldexp(1.0, -k));
  return d;
}

// ---------------------------------------------------------------- verify

VerifyResult run_verify(const RunConfig& cfg) {
  const VerifySizes& z = cfg.sizes;
  const std::uint64_t s = cfg.seed;
  const auto ctxs = cfg.make_contexts();
  const DNormOptions dopt = cfg.dnorm_options();
  const Window w(cfg.window);
  VerifyResult res;
  Report& r = res.rows;
  append(r, check_algebra(s, z.algebra_trials));
  append(r, check_torus(s + 1, z.torus_pairs));
  append(r, check_torus_oracle(s + 2, z.oracle_polys, z.oracle_window, z.oracle_grid));
  append(r, check_catalog(s + 3, z.catalog_trials));
  append(r, check_gaussian_gram(16));
  append(r, check_module(s + 4, 3));
  for (std::size_t i = 0; i < ctxs.size(); ++i) append(r, check_actions(ctxs[i], s + 5 + i, z.group_elements, w));
  append(r, check_strong_continuity(0.5, s + 6, 32, 4096, z.continuity_levels + 4));
  append(r, check_dnorm(s + 7, z.dnorm_vectors, cfg.directions(), dopt));
  append(r, check_dnorm_refinement(ctxs.front(), ground_gaussian(ctxs.front().d), cfg.norm));
  LeibnizOptions lopt;
  lopt.dnorm = dopt;
  lopt.lhs_samples = DirectionSample::make(2, 8, 1e-3, 1e-1, cfg.norm);
  append(r, check_leibniz(s + 8, z.leibniz_triples, lopt));
  append(r, check_ip_lemma({0.1, 0.01}));
  append(r, check_weyl(0.5, s + 9, z.contraction_pairs, z.orthogonality_max, cfg.calibration));
  const auto half = HeisenbergContext::make(0, 1, 1, 0.5);
  append(r, check_smoothing(half, {cfg.bump_radii.front()}, cfg.norm, dopt));
  append(r, check_net(half, z.net_vectors, cfg.net_epsilon, cfg.norm, dopt));
  std::vector<double> deltas = cfg.sweep_deltas();
  deltas.resize(std::min<std::size_t>(deltas.size(), z.sweep_levels));
  deltas.push_back(0.0);
  append(r, check_sweep(continuity_sweep(cfg.theta_inf, deltas, w, cfg.two_sided), false));
  for (const auto& row : r) res.pass = res.pass && row.pass;
  return res;
}

// ---------------------------------------------------------------- output

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_report_csv(const std::string& path, const Report& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({r.name, format_double(r.lhs_lower), format_double(r.rhs_upper), format_double(r.slack),
                     r.pass ? "1" : "0"});
  write_csv(path, {"check", "lhs_lower", "rhs_upper", "slack", "pass"}, cells);
}

void write_manifest(const std::string& path, const std::string& command, const RunConfig& cfg,
                    const nlohmann::json& extra) {
  nlohmann::json m;
  m["schema"] = kManifestSchema;
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = cfg.to_json();
  m["norm"] = to_string(cfg.norm);
  m["calibration"] = {{"laguerre_projection", cfg.calibration}};
  m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << m.dump(2) << "\n";
}

}  // namespace hmod
