#include "hmod/wave.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hmod/errors.hpp"
#include "hmod/quadrature.hpp"

namespace hmod {

namespace {

double amp_norm(const std::vector<cplx>& amp) {
  double s = 0.0;
  for (const auto& c : amp) s += std::norm(c);
  return std::sqrt(s);
}

double term_scale(const WaveTerm& t) { return std::abs(t.c0) * amp_norm(t.amp); }

// sup_r r^k exp(-a r^2)
double radial_peak(int k, double a) {
  if (k == 0) return 1.0;
  const double r2 = k / (2.0 * a);
  return std::exp(0.5 * k * std::log(r2) - a * r2);
}

// Smallest R past the peak with K R^k exp(-a R^2) <= tol.
double decay_radius(double K, int k, double a, double tol) {
  if (K <= tol) return 0.0;
  const double peak = std::sqrt(k / (2.0 * a));
  auto logv = [&](double r) { return std::log(K) + (k > 0 ? k * std::log(r) : 0.0) - a * r * r; };
  const double target = std::log(tol);
  double lo = std::max(peak, 1e-300), hi = std::max(1.0, 2.0 * peak);
  if (logv(lo) <= target) return lo;
  while (logv(hi) > target) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (logv(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

cplx phase_of(double turns) { return std::polar(1.0, 2.0 * kPi * std::remainder(turns, 1.0)); }

}  // namespace

WaveFunction::WaveFunction(int d) : d_(d) {
  if (d < 1) throw InvalidInput("vector dimension must be positive");
}

WaveFunction::WaveFunction(int d, std::vector<WaveTerm> terms) : d_(d), terms_(std::move(terms)) {
  if (d < 1) throw InvalidInput("vector dimension must be positive");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.amp.size()) != d) throw InvalidInput("term amplitude has wrong dimension");
    if (!(t.a > 0.0)) throw InvalidInput("term width must be positive");
    if (t.k < 0) throw InvalidInput("term degree must be nonnegative");
  }
  canonicalize();
}

void WaveFunction::canonicalize() {
  auto key = [](const WaveTerm& t) { return std::make_tuple(t.b, t.a, t.phi, t.k); };
  std::stable_sort(terms_.begin(), terms_.end(),
                   [&](const WaveTerm& x, const WaveTerm& y) { return key(x) < key(y); });
  std::vector<WaveTerm> out;
  for (auto& t : terms_) {
    if (!out.empty() && key(out.back()) == key(t)) {
      WaveTerm& m = out.back();
      for (int i = 0; i < d_; ++i) m.amp[i] = m.c0 * m.amp[i] + t.c0 * t.amp[i];
      m.c0 = 1.0;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const WaveTerm& t) {
    return t.c0 == cplx{0.0, 0.0} ||
           std::all_of(t.amp.begin(), t.amp.end(), [](cplx c) { return c == cplx{0.0, 0.0}; });
  });
  terms_ = std::move(out);
}

WaveFunction WaveFunction::operator+(const WaveFunction& o) const {
  if (o.d_ != d_) throw InvalidInput("dimension mismatch");
  std::vector<WaveTerm> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return WaveFunction(d_, std::move(t));
}

WaveFunction WaveFunction::operator-(const WaveFunction& o) const { return *this + o.scaled(-1.0); }

WaveFunction WaveFunction::scaled(cplx c) const {
  std::vector<WaveTerm> t = terms_;
  for (auto& x : t) x.c0 *= c;
  return WaveFunction(d_, std::move(t));
}

std::vector<cplx> WaveFunction::evaluate(double s) const { return evaluate_many({s}); }

std::vector<cplx> WaveFunction::evaluate_many(const std::vector<double>& s) const {
  const std::size_t n = s.size();
  std::vector<cplx> out(n * d_, cplx{0.0, 0.0});
  std::vector<cplx> base(n);
  const WaveTerm* prev = nullptr;
  for (const auto& t : terms_) {
    if (!prev || prev->b != t.b || prev->a != t.a || prev->phi != t.phi) {
      for (std::size_t i = 0; i < n; ++i) {
        const double r = s[i] - t.b;
        base[i] = std::exp(-t.a * r * r) * phase_of(t.phi * s[i]);
      }
      prev = &t;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double r = s[i] - t.b;
      const cplx v = t.c0 * base[i] * (t.k == 0 ? 1.0 : std::pow(r, t.k));
      if (v == cplx{0.0, 0.0}) continue;
      for (int c = 0; c < d_; ++c) out[i * d_ + c] += v * t.amp[c];
    }
  }
  return out;
}

std::pair<double, double> WaveFunction::essential_support(double tol) const {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& t : terms_) {
    const double R = decay_radius(term_scale(t), t.k, t.a, tol);
    if (first) {
      lo = t.b - R;
      hi = t.b + R;
      first = false;
    } else {
      lo = std::min(lo, t.b - R);
      hi = std::max(hi, t.b + R);
    }
  }
  return {lo, hi};
}

double WaveFunction::max_frequency() const {
  double f = 0.0;
  for (const auto& t : terms_) f = std::max(f, std::abs(t.phi));
  return f;
}

nlohmann::json WaveFunction::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : terms_) {
    nlohmann::json amp = nlohmann::json::array();
    for (const auto& c : t.amp) amp.push_back({c.real(), c.imag()});
    terms.push_back({{"amp", amp}, {"k", t.k}, {"b", t.b}, {"a", t.a}, {"phi", t.phi},
                     {"c0", {t.c0.real(), t.c0.imag()}}});
  }
  return {{"d", d_}, {"terms", terms}};
}

WaveFunction WaveFunction::from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  std::vector<WaveTerm> terms;
  for (const auto& e : j.at("terms")) {
    WaveTerm t;
    for (const auto& c : e.at("amp")) t.amp.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    t.k = e.at("k").get<int>();
    t.b = e.at("b").get<double>();
    t.a = e.at("a").get<double>();
    t.phi = e.at("phi").get<double>();
    t.c0 = {e.at("c0").at(0).get<double>(), e.at("c0").at(1).get<double>()};
    terms.push_back(std::move(t));
  }
  return WaveFunction(d, std::move(terms));
}

WaveFunction ground_gaussian(int d, int slot) {
  if (slot < 0 || slot >= d) throw InvalidInput("slot out of range");
  WaveTerm t;
  t.amp.assign(d, cplx{0.0, 0.0});
  t.amp[slot] = std::pow(2.0, 0.25);
  t.a = kPi;
  return WaveFunction(d, {t});
}

WaveFunction heisenberg_act(double eth, double x, double y, double u, const WaveFunction& xi) {
  if (eth == 0.0) throw InvalidInput("eth must be nonzero");
  std::vector<WaveTerm> terms = xi.terms();
  for (auto& t : terms) {
    t.c0 *= phase_of(eth * u + t.phi * eth * y);
    t.b -= eth * y;
    t.phi += x;
  }
  return WaveFunction(xi.d(), std::move(terms));
}

WaveFunction sigma_act(double eth, double x, double y, const WaveFunction& xi) {
  return heisenberg_act(eth, x, y, 0.5 * x * y, xi);
}

WaveFunction derivative(const WaveFunction& xi) {
  std::vector<WaveTerm> out;
  for (const auto& t : xi.terms()) {
    if (t.k > 0) {
      WaveTerm a = t;
      a.k = t.k - 1;
      a.c0 *= double(t.k);
      out.push_back(a);
    }
    WaveTerm b = t;
    b.k = t.k + 1;
    b.c0 *= -2.0 * t.a;
    out.push_back(b);
    if (t.phi != 0.0) {
      WaveTerm c = t;
      c.c0 *= cplx{0.0, 2.0 * kPi * t.phi};
      out.push_back(c);
    }
  }
  return WaveFunction(xi.d(), std::move(out));
}

WaveFunction monomial_multiply(const WaveFunction& xi) {
  std::vector<WaveTerm> out;
  for (const auto& t : xi.terms()) {
    WaveTerm a = t;
    a.k = t.k + 1;
    out.push_back(a);
    if (t.b != 0.0) {
      WaveTerm b = t;
      b.c0 *= t.b;
      out.push_back(b);
    }
  }
  return WaveFunction(xi.d(), std::move(out));
}

namespace {

double max_scale(const WaveFunction& f) {
  double m = 0.0;
  for (const auto& t : f.terms()) m = std::max(m, term_scale(t));
  return m;
}

double max_width(const WaveFunction& f) {
  double m = 0.0;
  for (const auto& t : f.terms()) m = std::max(m, t.a);
  return m;
}

}  // namespace

cplx l2_inner(const WaveFunction& xi, const WaveFunction& omega, const QuadratureSpec& q) {
  if (xi.d() != omega.d()) throw InvalidInput("dimension mismatch");
  if (xi.is_zero() || omega.is_zero()) return 0.0;
  const double tol = q.tail_tol * 1e-2;
  const auto [lx, hx] = xi.essential_support(tol / std::max(1.0, max_scale(omega)));
  const auto [lo_, ho] = omega.essential_support(tol / std::max(1.0, max_scale(xi)));
  const double lo = std::max(lx, lo_), hi = std::min(hx, ho);
  if (!(hi > lo)) return 0.0;
  const double freq = xi.max_frequency() + omega.max_frequency();
  const double aw = std::max(max_width(xi), max_width(omega));
  const double panel = std::min({q.max_panel, 8.0 / std::max(freq, 1e-300), 6.0 / std::sqrt(aw)});
  const Rule1D rule = composite_gauss_legendre(lo, hi, q.order, panel);
  const auto vx = xi.evaluate_many(rule.nodes);
  const auto vo = omega.evaluate_many(rule.nodes);
  const int d = xi.d();
  cplx s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    cplx p = 0.0;
    for (int c = 0; c < d; ++c) p += vx[i * d + c] * std::conj(vo[i * d + c]);
    s += rule.weights[i] * p;
  }
  return s;
}

double l2_norm(const WaveFunction& xi, const QuadratureSpec& q) {
  return std::sqrt(std::max(0.0, l2_inner(xi, xi, q).real()));
}

WaveFunction hermite_vector(double eth, int j, int d, int slot, int jmax) {
  if (!(eth > 0.0)) throw InvalidInput("Hermite scale must be positive");
  if (j < 0 || j > jmax) throw InvalidInput("Hermite order out of range");
  if (slot < 0 || slot >= d) throw InvalidInput("slot out of range");
  // normalized Hermite polynomials p_j(x) = H_j(x) / sqrt(2^j j! sqrt(pi)) by
  // p_{j+1} = sqrt(2/(j+1)) x p_j - sqrt(j/(j+1)) p_{j-1}
  std::vector<double> prev, cur{std::pow(kPi, -0.25)};
  for (int i = 0; i < j; ++i) {
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t k = 0; k < cur.size(); ++k) next[k + 1] += std::sqrt(2.0 / (i + 1)) * cur[k];
    for (std::size_t k = 0; k < prev.size(); ++k) next[k] -= std::sqrt(double(i) / (i + 1)) * prev[k];
    prev = std::move(cur);
    cur = std::move(next);
  }
  // x = kappa s with kappa^2 = 2 pi / eth, and an overall sqrt(kappa) for L^2(ds)
  const double kappa = std::sqrt(2.0 * kPi / eth);
  std::vector<WaveTerm> terms;
  for (std::size_t k = 0; k < cur.size(); ++k) {
    if (cur[k] == 0.0) continue;
    WaveTerm t;
    t.amp.assign(d, cplx{0.0, 0.0});
    t.amp[slot] = cur[k] * std::pow(kappa, double(k) + 0.5);
    t.k = static_cast<int>(k);
    t.a = kPi / eth;
    terms.push_back(std::move(t));
  }
  return WaveFunction(d, std::move(terms));
}

namespace {

// Certified sup of |F| for F in the catalog: grid, Lipschitz cells, Gaussian tail.
double certified_sup(const WaveFunction& F) {
  if (F.is_zero()) return 0.0;
  const WaveFunction G = derivative(F);
  double lip = 0.0;
  for (const auto& t : G.terms()) lip += term_scale(t) * radial_peak(t.k, t.a);

  double total = 0.0;
  for (const auto& t : F.terms()) total += term_scale(t);
  const double tol = 1e-12 * total;
  double T = 0.0;
  for (const auto& t : F.terms())
    T = std::max(T, std::abs(t.b) + decay_radius(term_scale(t), t.k, t.a, tol));
  double tail = 0.0;
  for (const auto& t : F.terms()) {
    const double R = T - std::abs(t.b);
    tail += term_scale(t) * (t.k == 0 ? 1.0 : std::pow(R, t.k)) * std::exp(-t.a * R * R);
  }

  constexpr int kGrid = 4096;
  std::vector<double> s(kGrid);
  for (int i = 0; i < kGrid; ++i) s[i] = -T + 2.0 * T * i / (kGrid - 1);
  const auto vals = F.evaluate_many(s);
  const int d = F.d();
  auto mag = [&](const std::vector<cplx>& v, std::size_t i) {
    double a = 0.0;
    for (int c = 0; c < d; ++c) a += std::norm(v[i * d + c]);
    return std::sqrt(a);
  };
  std::vector<double> g(kGrid);
  double best = 0.0;
  for (int i = 0; i < kGrid; ++i) best = std::max(best, g[i] = mag(vals, i));

  struct Cell {
    double lo, hi, flo, fhi;
  };
  std::vector<Cell> open;
  for (int i = 0; i + 1 < kGrid; ++i) open.push_back({s[i], s[i + 1], g[i], g[i + 1]});
  const double rtol = 1e-4;
  double bound = best;
  for (int depth = 0; depth < 60 && !open.empty(); ++depth) {
    std::vector<Cell> next;
    for (const auto& c : open) {
      const double ub = 0.5 * (c.flo + c.fhi) + 0.5 * lip * (c.hi - c.lo);
      if (ub <= best * (1.0 + rtol)) continue;
      const double mid = 0.5 * (c.lo + c.hi);
      const double fm = mag(F.evaluate(mid), 0);
      best = std::max(best, fm);
      next.push_back({c.lo, mid, c.flo, fm});
      next.push_back({mid, c.hi, fm, c.fhi});
    }
    open = std::move(next);
  }
  bound = best * (1.0 + rtol);
  for (const auto& c : open) bound = std::max(bound, 0.5 * (c.flo + c.fhi) + 0.5 * lip * (c.hi - c.lo));
  return std::max(bound, tail);
}

}  // namespace

double decay_envelope(const WaveFunction& xi) {
  double M = 0.0;
  WaveFunction D = xi;
  for (int i = 0; i <= 2; ++i) {
    const WaveFunction F = D + monomial_multiply(monomial_multiply(D));
    M = std::max(M, certified_sup(F));
    if (i < 2) D = derivative(D);
  }
  return M;
}

}  // namespace hmod
