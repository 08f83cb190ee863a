#include "hmod/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "hmod/errors.hpp"
#include "hmod/quadrature.hpp"

namespace hmod {

namespace {

long pos_mod(long a, long q) {
  const long r = a % q;
  return r < 0 ? r + q : r;
}

// exp(i pi k / q) for an integer k, reduced exactly mod 2q
cplx root_phase(long k, long q) { return std::polar(1.0, kPi * double(pos_mod(k, 2 * q)) / double(q)); }

cplx turn_phase(double turns) { return std::polar(1.0, 2.0 * kPi * std::remainder(turns, 1.0)); }

double amp_norm(const std::vector<cplx>& amp) {
  double s = 0.0;
  for (const auto& c : amp) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace

HeisenbergContext HeisenbergContext::make(int p, int q, int d, double theta) {
  if (q < 1) throw InvalidInput("q must be positive");
  if (d < 1 || d % q != 0) throw InvalidInput("d must be a positive multiple of q");
  const double eth = theta - double(p) / double(q);
  if (!(std::abs(eth) > 1e-12)) throw InvalidInput("theta must differ from p/q");
  HeisenbergContext c;
  c.p = p;
  c.q = q;
  c.d = d;
  c.theta = theta;
  c.eth = eth;
  const int r = d / q;
  c.clock = Eigen::MatrixXcd::Zero(d, d);
  c.shift = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < r; ++j) {
      c.clock(i * r + j, i * r + j) = root_phase(-2L * p * i, q);
      c.shift(((i + 1) % q) * r + j, i * r + j) = 1.0;
    }
  return c;
}

cplx HeisenbergContext::clock_ratio() const { return root_phase(-2L * p, q); }

nlohmann::json HeisenbergContext::to_json() const {
  return {{"p", p}, {"q", q}, {"d", d}, {"theta", theta}};
}

HeisenbergContext HeisenbergContext::from_json(const nlohmann::json& j) {
  return make(j.at("p").get<int>(), j.at("q").get<int>(), j.at("d").get<int>(),
              j.at("theta").get<double>());
}

Eigen::MatrixXcd rho(const HeisenbergContext& ctx, long n, long m) {
  const int q = ctx.q, r = ctx.d / ctx.q;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(ctx.d, ctx.d);
  const cplx ph = root_phase(long(ctx.p) * n * m, q);
  // (clock^n shift^m v)_i = z^{n i} v_{i - m}
  for (int i = 0; i < q; ++i) {
    const int src = static_cast<int>(pos_mod(i - m, q));
    const cplx c = ph * root_phase(-2L * ctx.p * pos_mod(n * i, q), q);
    for (int j = 0; j < r; ++j) out(i * r + j, src * r + j) = c;
  }
  return out;
}

WaveFunction module_act_single(const HeisenbergContext& ctx, long n, long m, const WaveFunction& xi) {
  if (xi.d() != ctx.d) throw InvalidInput("vector dimension does not match the context");
  const WaveFunction s = sigma_act(ctx.eth, double(n), double(m), xi);
  if (ctx.q == 1) return s;
  const Eigen::MatrixXcd R = rho(ctx, n, m);
  std::vector<WaveTerm> terms = s.terms();
  for (auto& t : terms) {
    Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(t.amp.data(), ctx.d);
    Eigen::VectorXcd w = R * v;
    for (int i = 0; i < ctx.d; ++i) t.amp[i] = w(i);
  }
  return WaveFunction(ctx.d, std::move(terms));
}

WaveFunction module_act(const HeisenbergContext& ctx, const TwistedSequence& f, const WaveFunction& xi) {
  WaveFunction out(ctx.d);
  for (const auto& [k, c] : f.entries()) out = out + module_act_single(ctx, -k.n, -k.m, xi).scaled(c);
  return out;
}

nlohmann::json GramResult::to_json() const {
  nlohmann::json j = coefficients.to_json();
  j["tail_bound"] = tail_bound;
  return j;
}

cplx gram_coefficient(const HeisenbergContext& ctx, const WaveFunction& xi, const WaveFunction& omega,
                      long n, long m, const QuadratureSpec& quad) {
  return l2_inner(module_act_single(ctx, n, m, xi), omega, quad);
}

namespace {

// Coefficients of prod of (u + s1)^k1 (u + s2)^k2 in powers of u.
std::vector<double> binomial_product(int k1, double s1, int k2, double s2) {
  auto expand = [](int k, double s) {
    std::vector<double> c(k + 1);
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      c[j] = binom * std::pow(s, k - j);
      binom = binom * (k - j) / (j + 1);
    }
    return c;
  };
  const auto a = expand(k1, s1), b = expand(k2, s2);
  std::vector<double> out(k1 + k2 + 1, 0.0);
  for (int i = 0; i <= k1; ++i)
    for (int j = 0; j <= k2; ++j) out[i + j] += a[i] * b[j];
  return out;
}

// h_j = H_j(x) (2 sqrt S)^{-j} exp(-x^2), physicists' Hermite polynomials
std::vector<double> scaled_hermite(int jmax, double x, double S) {
  std::vector<double> h(jmax + 1);
  h[0] = std::exp(-x * x);
  if (jmax >= 1) h[1] = x * h[0] / std::sqrt(S);
  for (int j = 1; j < jmax; ++j) h[j + 1] = x * h[j] / std::sqrt(S) - j * h[j - 1] / (2.0 * S);
  return h;
}

struct PairGeometry {
  double S, mu, c, delta;
  std::vector<double> poly;  // coefficients in u = t - c
};

PairGeometry pair_geometry(const WaveTerm& A, const WaveTerm& B) {
  PairGeometry g;
  g.S = A.a + B.a;
  g.mu = A.a * B.a / g.S;
  g.c = (A.a * A.b + B.a * B.b) / g.S;
  g.delta = A.b - B.b;
  g.poly = binomial_product(A.k, g.c - A.b, B.k, g.c - B.b);
  return g;
}

// Closed-form L^2 pairing of two catalog functions.
cplx exact_inner(const WaveFunction& X, const WaveFunction& Y) {
  cplx total = 0.0;
  for (const auto& A : X.terms())
    for (const auto& B : Y.terms()) {
      cplx ip = 0.0;
      for (int i = 0; i < X.d(); ++i) ip += A.amp[i] * std::conj(B.amp[i]);
      if (ip == cplx{0.0, 0.0}) continue;
      const PairGeometry g = pair_geometry(A, B);
      const double nu = A.phi - B.phi;
      const double x = kPi * nu / std::sqrt(g.S);
      const auto h = scaled_hermite(static_cast<int>(g.poly.size()) - 1, x, g.S);
      cplx s = 0.0;
      cplx ij = 1.0;
      for (std::size_t j = 0; j < g.poly.size(); ++j) {
        s += g.poly[j] * ij * h[j];
        ij *= cplx{0.0, 1.0};
      }
      s *= std::sqrt(kPi / g.S) * std::exp(-g.mu * g.delta * g.delta) * turn_phase(nu * g.c);
      total += A.c0 * std::conj(B.c0) * ip * s;
    }
  return total;
}

struct EnvelopePair {
  const WaveTerm* A;
  const WaveTerm* B;
  double scale;
};

std::vector<EnvelopePair> envelope_pairs(const WaveFunction& xi, const WaveFunction& omega) {
  std::vector<EnvelopePair> pairs;
  for (const auto& A : xi.terms())
    for (const auto& B : omega.terms()) {
      const double s = std::abs(A.c0) * std::abs(B.c0) * amp_norm(A.amp) * amp_norm(B.amp);
      if (s > 0.0) pairs.push_back({&A, &B, s});
    }
  return pairs;
}

// Per term pair bound of |gram(n, m)|, split as a dot product of an m factor
// (polynomial weights times the Gaussian in the center offset) and an n factor
// (scaled Hermite values at the frequency offset). Both are cached by index.
class EnvelopeTable {
 public:
  EnvelopeTable(std::vector<EnvelopePair> pairs, double eth) : pairs_(std::move(pairs)), eth_(eth) {
    for (const auto& p : pairs_) {
      offset_.push_back(len_);
      len_ += static_cast<std::size_t>(p.A->k + p.B->k + 1);
    }
  }

  double operator()(long n, long m) {
    const auto& r = row(m);
    const auto& c = col(n);
    double e = 0.0;
    for (std::size_t i = 0; i < len_; ++i) e += r[i] * c[i];
    return e;
  }

 private:
  const std::vector<double>& row(long m) {
    auto it = rows_.find(m);
    if (it != rows_.end()) return it->second;
    std::vector<double> v(len_);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto& p = pairs_[k];
      const double S = p.A->a + p.B->a, mu = p.A->a * p.B->a / S;
      const double delta = p.A->b - eth_ * double(m) - p.B->b;
      const auto poly = binomial_product(p.A->k, -p.B->a * delta / S, p.B->k, p.A->a * delta / S);
      const double f = p.scale * std::sqrt(kPi / S) * std::exp(-mu * delta * delta);
      for (std::size_t j = 0; j < poly.size(); ++j) v[offset_[k] + j] = f * std::abs(poly[j]);
    }
    return rows_.emplace(m, std::move(v)).first->second;
  }

  const std::vector<double>& col(long n) {
    auto it = cols_.find(n);
    if (it != cols_.end()) return it->second;
    std::vector<double> v(len_);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto& p = pairs_[k];
      const double S = p.A->a + p.B->a;
      const double x = kPi * (p.A->phi + double(n) - p.B->phi) / std::sqrt(S);
      const auto h = scaled_hermite(p.A->k + p.B->k, x, S);
      for (std::size_t j = 0; j < h.size(); ++j) v[offset_[k] + j] = std::abs(h[j]);
    }
    return cols_.emplace(n, std::move(v)).first->second;
  }

  std::vector<EnvelopePair> pairs_;
  double eth_;
  std::vector<std::size_t> offset_;
  std::size_t len_ = 0;
  std::map<long, std::vector<double>> rows_, cols_;
};

}  // namespace

cplx gram_coefficient_exact(const HeisenbergContext& ctx, const WaveFunction& xi,
                            const WaveFunction& omega, long n, long m) {
  return exact_inner(module_act_single(ctx, n, m, xi), omega);
}

double gram_envelope(const HeisenbergContext& ctx, const WaveFunction& xi, const WaveFunction& omega,
                     long n, long m) {
  EnvelopeTable env(envelope_pairs(xi, omega), ctx.eth);
  return env(n, m);
}

namespace {

template <bool Parallel>
TwistedSequence gram_rect_impl(const HeisenbergContext& ctx, const WaveFunction& xi,
                               const WaveFunction& omega, long n_lo, long n_hi, long m_lo, long m_hi,
                               const QuadratureSpec& quad) {
  if (xi.d() != ctx.d || omega.d() != ctx.d) throw InvalidInput("vector dimension does not match the context");
  TwistedSequence out;
  if (n_hi < n_lo || m_hi < m_lo || xi.is_zero() || omega.is_zero()) return out;
  const long nn = n_hi - n_lo + 1, nm = m_hi - m_lo + 1;
  std::vector<cplx> vals(static_cast<std::size_t>(nn * nm), cplx{0.0, 0.0});
  const int q = ctx.q, r = ctx.d / ctx.q, d = ctx.d;
  double xscale = 0.0, oscale = 0.0, aw = 0.0;
  for (const auto& t : xi.terms()) xscale = std::max(xscale, std::abs(t.c0) * amp_norm(t.amp)), aw = std::max(aw, t.a);
  for (const auto& t : omega.terms()) oscale = std::max(oscale, std::abs(t.c0) * amp_norm(t.amp)), aw = std::max(aw, t.a);
  const double tol = quad.tail_tol * 1e-2;
  const auto sx = xi.essential_support(tol / std::max(1.0, oscale));
  const auto so = omega.essential_support(tol / std::max(1.0, xscale));
  const double freq = xi.max_frequency() + omega.max_frequency() + double(std::max(std::labs(n_lo), std::labs(n_hi)));
  const double panel = std::min({quad.max_panel, 8.0 / std::max(freq, 1e-300), 6.0 / std::sqrt(aw)});

#pragma omp parallel for schedule(static) if (Parallel)
  for (long mi = 0; mi < nm; ++mi) {
    const long m = m_lo + mi;
    const double shift = ctx.eth * double(m);
    const double lo = std::max(so.first, sx.first - shift), hi = std::min(so.second, sx.second - shift);
    if (!(hi > lo)) continue;
    const Rule1D rule = composite_gauss_legendre(lo, hi, quad.order, panel);
    const std::size_t N = rule.nodes.size();
    std::vector<double> shifted(N);
    for (std::size_t i = 0; i < N; ++i) shifted[i] = rule.nodes[i] + shift;
    const auto X = xi.evaluate_many(shifted);
    const auto W = omega.evaluate_many(rule.nodes);
    // S_i(t) = sum_j xi_{(i - m) r + j}(t + eth m) conj(omega_{i r + j}(t)), weighted
    std::vector<cplx> S(N * q, cplx{0.0, 0.0});
    for (std::size_t t = 0; t < N; ++t)
      for (int i = 0; i < q; ++i) {
        const int src = static_cast<int>(pos_mod(i - m, q));
        cplx s = 0.0;
        for (int j = 0; j < r; ++j) s += X[t * d + src * r + j] * std::conj(W[t * d + i * r + j]);
        S[t * q + i] = rule.weights[t] * s;
      }
    std::vector<cplx> en(N), e1(N);
    for (std::size_t t = 0; t < N; ++t) {
      en[t] = turn_phase(double(n_lo) * rule.nodes[t]);
      e1[t] = turn_phase(rule.nodes[t]);
    }
    for (long ni = 0; ni < nn; ++ni) {
      const long n = n_lo + ni;
      std::vector<cplx> zc(q);
      for (int i = 0; i < q; ++i) zc[i] = root_phase(-2L * ctx.p * pos_mod(n * i, q), q);
      cplx acc = 0.0;
      for (std::size_t t = 0; t < N; ++t) {
        cplx s = 0.0;
        for (int i = 0; i < q; ++i) s += zc[i] * S[t * q + i];
        acc += en[t] * s;
        en[t] *= e1[t];
      }
      const cplx phase = turn_phase(0.5 * ctx.eth * double(n) * double(m)) * root_phase(long(ctx.p) * n * m, q);
      vals[static_cast<std::size_t>(ni * nm + mi)] = phase * acc;
    }
  }
  for (long ni = 0; ni < nn; ++ni)
    for (long mi = 0; mi < nm; ++mi) out.set({n_lo + ni, m_lo + mi}, vals[static_cast<std::size_t>(ni * nm + mi)]);
  return out;
}

}  // namespace

TwistedSequence gram_rect_serial(const HeisenbergContext& ctx, const WaveFunction& xi,
                                 const WaveFunction& omega, long n_lo, long n_hi, long m_lo,
                                 long m_hi, const QuadratureSpec& quad) {
  return gram_rect_impl<false>(ctx, xi, omega, n_lo, n_hi, m_lo, m_hi, quad);
}

TwistedSequence gram_rect_parallel(const HeisenbergContext& ctx, const WaveFunction& xi,
                                   const WaveFunction& omega, long n_lo, long n_hi, long m_lo,
                                   long m_hi, const QuadratureSpec& quad) {
  return gram_rect_impl<true>(ctx, xi, omega, n_lo, n_hi, m_lo, m_hi, quad);
}

GramResult gram(const HeisenbergContext& ctx, const WaveFunction& xi, const WaveFunction& omega,
                const GramOptions& opt) {
  if (!(opt.threshold > 0.0)) throw InvalidInput("gram threshold must be positive");
  if (xi.d() != ctx.d || omega.d() != ctx.d) throw InvalidInput("vector dimension does not match the context");
  GramResult res;
  const auto pairs = envelope_pairs(xi, omega);
  if (pairs.empty()) return res;

  // Scan box: grow each side until a full edge of the envelope is below
  // 1e-6 * threshold and every pair center lies inside.
  double cm_lo = 1e300, cm_hi = -1e300, cn_lo = 1e300, cn_hi = -1e300;
  for (const auto& p : pairs) {
    const double cm = (p.A->b - p.B->b) / ctx.eth;
    const double cn = p.B->phi - p.A->phi;
    cm_lo = std::min(cm_lo, cm), cm_hi = std::max(cm_hi, cm);
    cn_lo = std::min(cn_lo, cn), cn_hi = std::max(cn_hi, cn);
  }
  long m_lo = static_cast<long>(std::floor(cm_lo)), m_hi = static_cast<long>(std::ceil(cm_hi));
  long n_lo = static_cast<long>(std::floor(cn_lo)), n_hi = static_cast<long>(std::ceil(cn_hi));
  EnvelopeTable env(pairs, ctx.eth);
  const double edge_tol = 1e-6 * opt.threshold;
  auto row_max = [&](long m) {
    double e = 0.0;
    for (long n = n_lo; n <= n_hi; ++n) e = std::max(e, env(n, m));
    return e;
  };
  auto col_max = [&](long n) {
    double e = 0.0;
    for (long m = m_lo; m <= m_hi; ++m) e = std::max(e, env(n, m));
    return e;
  };
  for (int guard = 0; guard < 100000; ++guard) {
    bool grew = false;
    if (row_max(m_lo) > edge_tol) --m_lo, grew = true;
    if (row_max(m_hi) > edge_tol) ++m_hi, grew = true;
    if (col_max(n_lo) > edge_tol) --n_lo, grew = true;
    if (col_max(n_hi) > edge_tol) ++n_hi, grew = true;
    if (!grew) break;
  }

  long r_nlo = n_hi + 1, r_nhi = n_lo - 1, r_mlo = m_hi + 1, r_mhi = m_lo - 1;
  std::vector<double> grid;
  for (long n = n_lo; n <= n_hi; ++n)
    for (long m = m_lo; m <= m_hi; ++m) {
      const double e = env(n, m);
      grid.push_back(e);
      if (e > opt.threshold) {
        r_nlo = std::min(r_nlo, n), r_nhi = std::max(r_nhi, n);
        r_mlo = std::min(r_mlo, m), r_mhi = std::max(r_mhi, m);
      }
    }
  std::size_t idx = 0;
  for (long n = n_lo; n <= n_hi; ++n)
    for (long m = m_lo; m <= m_hi; ++m, ++idx)
      if (n < r_nlo || n > r_nhi || m < r_mlo || m > r_mhi) res.tail_bound += grid[idx];
  if (r_nhi < r_nlo) return res;
  res.n_lo = r_nlo, res.n_hi = r_nhi, res.m_lo = r_mlo, res.m_hi = r_mhi;
  res.coefficients = opt.exec == Exec::parallel
                         ? gram_rect_parallel(ctx, xi, omega, r_nlo, r_nhi, r_mlo, r_mhi, opt.quad)
                         : gram_rect_serial(ctx, xi, omega, r_nlo, r_nhi, r_mlo, r_mhi, opt.quad);
  return res;
}


NormEstimate module_norm(const HeisenbergContext& ctx, const WaveFunction& xi, const ModuleNormOptions& opt) {
  NormEstimate out;
  out.window_radius = opt.window.radius;
  if (xi.is_zero()) return out;
  const GramResult g = gram(ctx, xi, xi, opt.gram);
  // slack for quadrature error on the computed coefficients
  const double slack = 1e-12 * std::max(1.0, l1_norm(g.coefficients));
  const NormEstimate t = torus_norm_estimate(ctx.theta, g.coefficients, opt.window, opt.power);
  out.lower = std::sqrt(std::max(0.0, t.lower - g.tail_bound - slack));
  out.upper = std::sqrt(t.upper + g.tail_bound + slack);
  out.iterations = t.iterations;
  out.converged = t.converged;
  return out;
}

double module_norm_upper(const HeisenbergContext& ctx, const WaveFunction& xi, const GramOptions& opt) {
  if (xi.is_zero()) return 0.0;
  const GramResult g = gram(ctx, xi, xi, opt);
  const double l1 = l1_norm(g.coefficients);
  return std::sqrt(l1 + g.tail_bound + 1e-12 * std::max(1.0, l1));
}

double module_norm_lower(const HeisenbergContext& ctx, const WaveFunction& xi, const Window& window,
                         const QuadratureSpec& quad, const PowerOptions& power) {
  if (xi.is_zero()) return 0.0;
  const long R = 2L * window.radius;
  const TwistedSequence c = power.exec == Exec::parallel ? gram_rect_parallel(ctx, xi, xi, -R, R, -R, R, quad)
                                                         : gram_rect_serial(ctx, xi, xi, -R, R, -R, R, quad);
  const NormEstimate t = torus_norm_estimate(ctx.theta, c, window, power);
  return std::sqrt(std::max(0.0, t.lower - 1e-12 * std::max(1.0, l1_norm(c))));
}

namespace {

void check_compatible(const HeisenbergContext& a, const HeisenbergContext& b) {
  if (a.p != b.p || a.q != b.q || a.d != b.d) throw InvalidInput("contexts must share p, q and d");
}

double vec_norm(const std::vector<cplx>& v, std::size_t row, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += std::norm(v[row * d + i]);
  return std::sqrt(s);
}

double vec_diff_norm(const std::vector<cplx>& u, const std::vector<cplx>& v, std::size_t row, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += std::norm(u[row * d + i] - v[row * d + i]);
  return std::sqrt(s);
}

double widest_a(std::initializer_list<const WaveFunction*> fs) {
  double a = 1e-300;
  for (const auto* f : fs)
    for (const auto& t : f->terms()) a = std::max(a, t.a);
  return a;
}

// lattice range of m for which t + eth m meets supp(f) while t runs over supp(eta)
std::pair<long, long> m_range(double eth, std::pair<double, double> sf, std::pair<double, double> se) {
  const double u = (sf.first - se.second) / eth, v = (sf.second - se.first) / eth;
  return {static_cast<long>(std::floor(std::min(u, v))), static_cast<long>(std::ceil(std::max(u, v)))};
}

}  // namespace

IpLemmaBound ip_lemma_bound(const HeisenbergContext& a, const HeisenbergContext& b, const WaveFunction& omega,
                            const WaveFunction& xi, const WaveFunction& eta, const GramOptions& opt) {
  check_compatible(a, b);
  if (omega.d() != a.d || xi.d() != a.d || eta.d() != a.d) throw InvalidInput("vector dimension does not match the context");
  IpLemmaBound out;
  if (eta.is_zero()) return out;
  const int d = a.d;
  const double tol = 1e-18;
  const WaveFunction o1 = derivative(omega), o2 = derivative(o1);
  const WaveFunction x1 = derivative(xi), x2 = derivative(x1);
  const WaveFunction e1 = derivative(eta), e2 = derivative(e1);
  const auto se = eta.essential_support(tol);
  long m_lo = 0, m_hi = -1;
  auto widen = [&](std::pair<long, long> r) {
    if (m_hi < m_lo) m_lo = r.first, m_hi = r.second;
    else m_lo = std::min(m_lo, r.first), m_hi = std::max(m_hi, r.second);
  };
  if (!omega.is_zero()) widen(m_range(a.eth, omega.essential_support(tol), se));
  if (!xi.is_zero()) widen(m_range(b.eth, xi.essential_support(tol), se));
  if (m_hi < m_lo) return out;

  const double panel = std::min({0.25, opt.quad.max_panel, 6.0 / std::sqrt(widest_a({&omega, &xi, &eta}))});
  const Rule1D rule = composite_gauss_legendre(se.first, se.second, opt.quad.order, panel);
  const std::size_t N = rule.nodes.size();
  const auto E0 = eta.evaluate_many(rule.nodes), E1 = e1.evaluate_many(rule.nodes), E2 = e2.evaluate_many(rule.nodes);
  // per-row partials summed afterwards in row order, independent of threads
  const long rows = m_hi - m_lo + 1;
  std::vector<double> drow(rows, 0.0), zrow(rows, 0.0);
#pragma omp parallel for schedule(static) if (opt.exec == Exec::parallel)
  for (long m = m_lo; m <= m_hi; ++m) {
    double deriv = 0.0, zero = 0.0;
    std::vector<double> ta(N), tb(N);
    for (std::size_t t = 0; t < N; ++t) ta[t] = rule.nodes[t] + a.eth * double(m), tb[t] = rule.nodes[t] + b.eth * double(m);
    const auto O0 = omega.evaluate_many(ta), O1 = o1.evaluate_many(ta), O2 = o2.evaluate_many(ta);
    const auto X0 = xi.evaluate_many(tb), X1 = x1.evaluate_many(tb), X2 = x2.evaluate_many(tb);
    for (std::size_t t = 0; t < N; ++t) {
      const double w = rule.weights[t];
      const double d0 = vec_diff_norm(O0, X0, t, d), d1 = vec_diff_norm(O1, X1, t, d), d2 = vec_diff_norm(O2, X2, t, d);
      const double n0 = vec_norm(E0, t, d), n1 = vec_norm(E1, t, d), n2 = vec_norm(E2, t, d);
      deriv += w * (d2 * n0 + 2.0 * d1 * n1 + d0 * n2);
      zero += w * d0 * n0;
    }
    drow[m - m_lo] = deriv, zrow[m - m_lo] = zero;
  }
  double deriv = 0.0, zero = 0.0;
  for (long i = 0; i < rows; ++i) deriv += drow[i], zero += zrow[i];
  out.derivative_terms = deriv / 12.0;
  out.zero_column = zero;

  const GramResult gb = gram(b, xi, eta, opt);
  double phase = 2.0 * gb.tail_bound;
  for (const auto& [k, c] : gb.coefficients.entries())
    phase += std::abs(turn_phase(0.5 * (a.eth - b.eth) * double(k.n) * double(k.m)) - 1.0) * std::abs(c);
  out.phase_term = phase;
  return out;
}

double gram_l1_distance(const HeisenbergContext& a, const HeisenbergContext& b, const WaveFunction& omega,
                        const WaveFunction& xi, const WaveFunction& eta, const GramOptions& opt) {
  check_compatible(a, b);
  const GramResult ga = gram(a, omega, eta, opt);
  const GramResult gb = gram(b, xi, eta, opt);
  return l1_norm(ga.coefficients - gb.coefficients) + ga.tail_bound + gb.tail_bound;
}

}  // namespace hmod
