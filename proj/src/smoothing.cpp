#include "hmod/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "hmod/errors.hpp"

namespace hmod {

double laguerre(int n, double u) {
  double prev = 0.0, cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - u) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// All psi^0..psi^n at radius r.
void laguerre_family(double eth, int n, double r, std::vector<double>& out) {
  out.resize(n + 1);
  const double u = kPi * eth * r * r;
  const double g = eth * std::exp(-0.5 * u);
  double prev = 0.0, cur = 1.0;
  for (int k = 0; k <= n; ++k) {
    out[k] = g * cur;
    const double next = ((2.0 * k + 1.0 - u) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
}

// u beyond which exp(-u/2) sum_k C(n,k) u^k / k! < tol; that sum dominates |L_n(u)|.
double laguerre_cut(int n, double tol) {
  for (double u = 1.0;; u += 1.0) {
    double s = 0.0, term = 1.0;
    for (int k = 0; k <= n; ++k) {
      s += term;
      term *= double(n - k) / double(k + 1) * u / double(k + 1);
    }
    if (std::exp(-0.5 * u) * s < tol && u > 2.0 * n) return u;
  }
}

double laguerre_radius(double eth, int n, double tol = 1e-17) {
  return std::sqrt(laguerre_cut(n, tol) / (kPi * eth));
}

}  // namespace

RadialProfile laguerre_profile(double eth, int n) {
  if (!(eth > 0.0)) throw InvalidInput("Laguerre scale must be positive");
  if (n < 0 || n > kLaguerreMax) throw InvalidInput("Laguerre order out of range");
  RadialProfile f;
  f.eval = [eth, n](double r) { return eth * std::exp(-0.5 * kPi * eth * r * r) * laguerre(n, kPi * eth * r * r); };
  f.radius = laguerre_radius(eth, n);
  f.tail = eth * 1e-17;
  f.kind = "laguerre";
  return f;
}

double radial_integral(const std::function<double(double)>& g, double R, double panel, int order) {
  const Rule1D rule = composite_gauss_legendre(0.0, R, order, panel);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * g(rule.nodes[i]) * rule.nodes[i];
  return s;
}

double plane_integral(const RadialProfile& f) {
  return 2.0 * kPi * radial_integral(f.eval, f.radius, std::min(0.05, f.radius / 64.0), 32);
}

std::vector<double> laguerre_coefficients(double eth, const RadialProfile& f, int n) {
  if (!(eth > 0.0)) throw InvalidInput("Laguerre scale must be positive");
  if (n < 0 || n > kLaguerreMax) throw InvalidInput("Laguerre order out of range");
  const double R = std::min(f.radius, laguerre_radius(eth, n));
  const Rule1D rule = composite_gauss_legendre(0.0, R, 24, 0.05);
  std::vector<double> a(n + 1, 0.0), psi;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i];
    const double fr = f(r) * rule.weights[i] * r;
    if (fr == 0.0) continue;
    laguerre_family(eth, n, r, psi);
    for (int j = 0; j <= n; ++j) a[j] += fr * psi[j];
  }
  for (auto& c : a) c *= 2.0 * kPi / eth;
  return a;
}

RadialProfile cesaro_profile(double eth, const RadialProfile& f, int n) {
  if (n < 1) throw InvalidInput("Cesaro order must be positive");
  const auto a = laguerre_coefficients(eth, f, n);
  std::vector<double> c(n + 1);
  for (int j = 0; j <= n; ++j) c[j] = double(n + 1 - j) / double(n + 1) * a[j];
  RadialProfile out;
  out.eval = [eth, n, c](double r) {
    std::vector<double> psi;
    laguerre_family(eth, n, r, psi);
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += c[j] * psi[j];
    return s;
  };
  out.radius = laguerre_radius(eth, n);
  double mass = 0.0;
  for (double v : c) mass += std::abs(v);
  out.tail = mass * eth * 1e-17;
  out.kind = "cesaro";
  return out;
}

double radial_l1_distance(const RadialProfile& f, const RadialProfile& g, double R) {
  return radial_integral([&](double r) { return std::abs(f(r) - g(r)); }, R, 0.01, 16);
}

RadialProfile bump_profile(double R) {
  if (!(R > 0.0)) throw InvalidInput("bump radius must be positive");
  auto shape = [R](double r) {
    const double t = r / R;
    return t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };
  // panels fine enough for the flat approach to the rim
  const double m = 2.0 * kPi * radial_integral(shape, R, R / 64.0, 32);
  RadialProfile f;
  f.eval = [shape, m](double r) { return shape(r) / m; };
  f.radius = R;
  f.kind = "bump";
  return f;
}

double first_moment(const RadialProfile& f, PlaneNorm norm) {
  double angular = 2.0 * kPi;
  if (norm == PlaneNorm::l1) angular = 8.0;
  if (norm == PlaneNorm::linf) angular = 4.0 * std::sqrt(2.0);
  return angular * radial_integral([&](double r) { return f(r) * r; }, f.radius, std::min(0.05, f.radius / 64.0), 32);
}

PlanarKernel planar(const RadialProfile& f) {
  return {[f](double x, double y) { return f(std::hypot(x, y)); }, f.radius};
}

Cubature2D Cubature2D::tensor(double R, int n) {
  if (!(R > 0.0) || n < 1) throw InvalidInput("cubature needs R > 0 and n >= 1");
  Cubature2D c;
  c.R = R;
  c.x = composite_gauss_legendre(-R, R, n, 2.0 * R);
  c.y = c.x;
  return c;
}

Cubature2D Cubature2D::composite(double R, int order, int panels) {
  if (!(R > 0.0) || order < 1 || panels < 1) throw InvalidInput("bad composite cubature");
  Cubature2D c;
  c.R = R;
  c.x = composite_gauss_legendre(-R, R, order, 2.0 * R / panels * (1 + 1e-12));
  c.y = c.x;
  return c;
}

Evaluator evaluator_of(const WaveFunction& xi) {
  return [xi](const std::vector<double>& s) { return xi.evaluate_many(s); };
}

SmoothingOperator::SmoothingOperator(double eth, const PlanarKernel& kernel, const Cubature2D& cub, int d)
    : eth_(eth), d_(d), xs_(cub.x.nodes) {
  for (std::size_t j = 0; j < cub.y.nodes.size(); ++j) {
    std::vector<cplx> row(xs_.size());
    bool any = false;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      const double x = xs_[i], y = cub.y.nodes[j];
      const double w = cub.x.weights[i] * cub.y.weights[j] * kernel.eval(x, y);
      if (w == 0.0) continue;
      any = true;
      mass_ += std::abs(w);
      signed_mass_ += w;
      row[i] = w * std::polar(1.0, kPi * eth * x * y);
    }
    if (!any) continue;
    ys_.push_back(cub.y.nodes[j]);
    W_.insert(W_.end(), row.begin(), row.end());
  }
}

Evaluator SmoothingOperator::apply(Evaluator h) const {
  auto self = std::make_shared<const SmoothingOperator>(*this);
  return [self, h](const std::vector<double>& s) {
    const auto& op = *self;
    const Eigen::Index N = static_cast<Eigen::Index>(s.size());
    const Eigen::Index nx = static_cast<Eigen::Index>(op.xs_.size()), ny = static_cast<Eigen::Index>(op.ys_.size());
    const int d = op.d_;
    std::vector<double> pts(static_cast<std::size_t>(N * ny));
    for (Eigen::Index p = 0; p < N; ++p)
      for (Eigen::Index j = 0; j < ny; ++j) pts[p * ny + j] = s[p] + op.eth_ * op.ys_[j];
    const std::vector<cplx> H = h(pts);
    // F(j, p) = sum_i W(j, i) exp(2 i pi s_p x_i), one matrix product
    Eigen::MatrixXcd E(nx, N);
    for (Eigen::Index p = 0; p < N; ++p)
      for (Eigen::Index i = 0; i < nx; ++i) E(i, p) = std::polar(1.0, 2.0 * kPi * std::remainder(s[p] * op.xs_[i], 1.0));
    const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> W(op.W_.data(), ny, nx);
    const Eigen::MatrixXcd F = W * E;
    std::vector<cplx> out(static_cast<std::size_t>(N * d), cplx{0.0, 0.0});
    for (Eigen::Index p = 0; p < N; ++p)
      for (Eigen::Index j = 0; j < ny; ++j)
        for (int c = 0; c < d; ++c) out[p * d + c] += F(j, p) * H[(p * ny + j) * d + c];
    return out;
  };
}

WaveFunction sigma_apply(const HeisenbergContext& ctx, const PlanarKernel& kernel, const Cubature2D& cub,
                         const WaveFunction& xi) {
  if (xi.d() != ctx.d) throw InvalidInput("vector dimension does not match the context");
  std::vector<WaveTerm> terms;
  for (std::size_t j = 0; j < cub.y.nodes.size(); ++j)
    for (std::size_t i = 0; i < cub.x.nodes.size(); ++i) {
      const double x = cub.x.nodes[i], y = cub.y.nodes[j];
      const double w = cub.x.weights[i] * cub.y.weights[j] * kernel.eval(x, y);
      if (w == 0.0) continue;
      const WaveFunction s = sigma_act(ctx.eth, x, y, xi).scaled(w);
      terms.insert(terms.end(), s.terms().begin(), s.terms().end());
    }
  return WaveFunction(ctx.d, std::move(terms));
}

cplx l2_inner_values(const Evaluator& a, const Evaluator& b, int d, double T, double panel, int order) {
  const Rule1D rule = composite_gauss_legendre(-T, T, order, panel);
  const auto va = a(rule.nodes), vb = b(rule.nodes);
  cplx s = 0.0;
  for (std::size_t t = 0; t < rule.nodes.size(); ++t)
    for (int c = 0; c < d; ++c) s += rule.weights[t] * va[t * d + c] * std::conj(vb[t * d + c]);
  return s;
}

double l2_distance(const Evaluator& a, const Evaluator& b, int d, double T, double panel, int order) {
  const Rule1D rule = composite_gauss_legendre(-T, T, order, panel);
  const auto va = a(rule.nodes), vb = b(rule.nodes);
  double s = 0.0;
  for (std::size_t t = 0; t < rule.nodes.size(); ++t)
    for (int c = 0; c < d; ++c) s += rule.weights[t] * std::norm(va[t * d + c] - vb[t * d + c]);
  return std::sqrt(s);
}

Cubature2D laguerre_cubature(double eth, int j, double tail, double panel) {
  const double R = laguerre_radius(std::abs(eth), j, tail);
  return Cubature2D::composite(R, 16, std::max(2, static_cast<int>(std::ceil(2.0 * R / panel))));
}

double projection_calibration(double eth, int j, const Cubature2D& cub) {
  const double e = std::abs(eth);
  const WaveFunction H = hermite_vector(e, j);
  const SmoothingOperator op(eth, planar(laguerre_profile(e, j)), cub, 1);
  const auto sup = H.essential_support(1e-17);
  const double T = std::max(std::abs(sup.first), std::abs(sup.second));
  return l2_inner_values(op.apply(evaluator_of(H)), evaluator_of(H), 1, T).real();
}

SmoothingCheck smoothing_bound_check(const HeisenbergContext& ctx, double bump_radius, const WaveFunction& xi,
                                     double epsilon, PlaneNorm norm, const DNormOptions& opt, int cubature_nodes) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  const RadialProfile f = bump_profile(bump_radius);
  const double m0 = plane_integral(f);
  if (std::abs(m0 - 1.0) > 1e-10) throw InvalidInput("bump does not have unit mass");
  const double scale = 2.0 * kPi * std::abs(ctx.eth);
  const double m1 = first_moment(f, norm);
  if (m1 > epsilon / scale * (1 + 1e-10)) throw InvalidInput("bump first moment exceeds eps / (2 pi |eth|)");

  // The discretization is itself a probability measure after renormalizing,
  // and the bound holds for it with its own first moment.
  const Cubature2D cub = Cubature2D::tensor(bump_radius, cubature_nodes);
  const PlanarKernel k = planar(f);
  double mass = 0.0, moment = 0.0;
  for (std::size_t j = 0; j < cub.y.nodes.size(); ++j)
    for (std::size_t i = 0; i < cub.x.nodes.size(); ++i) {
      const double w = cub.x.weights[i] * cub.y.weights[j] * k.eval(cub.x.nodes[i], cub.y.nodes[j]);
      mass += w;
      moment += w * plane_norm(norm, cub.x.nodes[i], cub.y.nodes[j]);
    }
  const PlanarKernel kn{[k, mass](double x, double y) { return k.eval(x, y) / mass; }, k.radius};
  const double eps_eff = std::max(epsilon, scale * moment / mass);

  SmoothingCheck out;
  out.bump_radius = bump_radius;
  out.epsilon = eps_eff;
  out.mass = mass;
  const double lhs = xi.is_zero() ? 0.0
                                  : module_norm_lower(ctx, xi - sigma_apply(ctx, kn, cub, xi), opt.window,
                                                      opt.gram.quad, opt.power);
  const double rhs = xi.is_zero() ? 0.0 : eps_eff * dnorm_upper(ctx, xi, norm, opt);
  out.row = make_check("smoothing_bound", lhs, rhs, 0.05 * rhs);
  return out;
}

std::vector<double> net_mode_weights(double eth, double bump_radius, int cesaro_order) {
  const double e = std::abs(eth);
  const auto a = laguerre_coefficients(e, bump_profile(bump_radius), cesaro_order);
  std::vector<double> w(a.size());
  for (std::size_t j = 0; j < a.size(); ++j)
    w[j] = double(cesaro_order + 1 - int(j)) / double(cesaro_order + 1) * a[j];
  return w;
}

WaveFunction finite_rank_image(const HeisenbergContext& ctx, const std::vector<double>& mode_weights,
                               const WaveFunction& xi) {
  const double e = std::abs(ctx.eth);
  WaveFunction out(ctx.d);
  const int J = std::min<int>(static_cast<int>(mode_weights.size()) - 1, kHermiteMax);
  for (int j = 0; j <= J; ++j)
    for (int slot = 0; slot < ctx.d; ++slot) {
      const WaveFunction H = hermite_vector(e, j, ctx.d, slot);
      const cplx c = l2_inner(xi, H);
      if (c != cplx{0.0, 0.0}) out = out + H.scaled(mode_weights[j] * c);
    }
  return out;
}

NetReport compactness_net(const HeisenbergContext& ctx, const std::vector<WaveFunction>& vectors, double epsilon,
                          const NetOptions& opt) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  NetReport rep;
  rep.cesaro_order = opt.cesaro_order;
  rep.hermite_cut = std::min(opt.cesaro_order, kHermiteMax);
  // bump with first moment eps / (4 pi |eth|), so smoothing alone costs eps / 2
  const double unit_moment = first_moment(bump_profile(1.0), opt.norm);
  rep.bump_radius = epsilon / (4.0 * kPi * std::abs(ctx.eth) * unit_moment);
  const auto weights = net_mode_weights(ctx.eth, rep.bump_radius, opt.cesaro_order);

  std::vector<WaveFunction> images, net;
  std::vector<int> net_source;
  for (const auto& v : vectors) images.push_back(finite_rank_image(ctx, weights, v));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    int hit = -1;
    for (std::size_t k = 0; k < net.size() && hit < 0; ++k)
      if (module_norm_upper(ctx, images[i] - net[k], opt.gram) <= 0.5 * epsilon) hit = static_cast<int>(k);
    if (hit < 0) {
      hit = static_cast<int>(net.size());
      net.push_back(images[i]);
    }
    const double r = module_norm_upper(ctx, vectors[i] - net[hit], opt.gram);
    rep.rows.push_back({static_cast<int>(i), hit, r});
    rep.max_residual = std::max(rep.max_residual, r);
  }
  rep.net_size = static_cast<int>(net.size());
  rep.covered = rep.max_residual <= epsilon;
  return rep;
}

}  // namespace hmod
