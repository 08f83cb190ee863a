#include "hmod/dnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hmod/errors.hpp"

namespace hmod {

DirectionSample DirectionSample::make(int radii, int angles, double r_min, double r_max, PlaneNorm norm) {
  if (radii < 1 || angles < 1) throw InvalidInput("direction sample needs at least one radius and one angle");
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw InvalidInput("direction radii must satisfy 0 < r_min <= r_max");
  DirectionSample s;
  s.radii = radii, s.angles = angles, s.r_min = r_min, s.r_max = r_max, s.norm = norm;
  for (int i = 0; i < radii; ++i) {
    const double r = radii == 1 ? r_min : r_min * std::pow(r_max / r_min, double(i) / (radii - 1));
    for (int k = 0; k < angles; ++k) {
      const auto [ux, uy] = unit_direction(norm, 2.0 * kPi * k / angles);
      s.directions.emplace_back(r * ux, r * uy);
    }
  }
  return s;
}

DirectionSample DirectionSample::restricted(double delta) const {
  DirectionSample s = *this;
  s.directions.clear();
  for (const auto& [x, y] : directions)
    if (plane_norm(norm, x, y) <= delta * (1 + 1e-12)) s.directions.emplace_back(x, y);
  s.r_max = std::min(r_max, delta);
  if (s.directions.empty()) throw InvalidInput("restriction leaves no directions");
  return s;
}

std::string DirectionSample::descriptor() const {
  std::ostringstream o;
  o << radii << "x" << angles << ":" << r_min << ".." << r_max << ":" << to_string(norm);
  return o.str();
}

std::pair<double, double> unit_direction(PlaneNorm norm, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  const double n = plane_norm(norm, c, s);
  return {c / n, s / n};
}

double unit_direction_lipschitz(PlaneNorm norm) {
  // |d/dphi e/N(e)| <= 1/N + |grad N| / N^2 with N bounded below on the circle
  switch (norm) {
    case PlaneNorm::euclid: return 1.0;
    case PlaneNorm::l1: return 1.0 + std::sqrt(2.0);
    case PlaneNorm::linf: return std::sqrt(2.0) + 2.0;
  }
  return 0.0;
}

WaveFunction connection_apply(const HeisenbergContext& ctx, double x, double y, const WaveFunction& xi) {
  WaveFunction out(xi.d());
  if (x != 0.0) out = out + monomial_multiply(xi).scaled(cplx{0.0, 2.0 * kPi * x});
  if (y != 0.0) out = out + derivative(xi).scaled(ctx.eth * y);
  return out;
}

namespace {

struct ConnectionScan {
  double lower = 0.0;  // max of module-norm lowers over the sampled unit directions
  double upper = 0.0;  // certified sup over the whole unit circle
};

// Upper caps of |nabla_v xi| for unit v at K angles. With a = nabla_{1,0} xi and
// b = nabla_{0,1} xi the gram of x a + y b is x^2 <a,a> + x y (<a,b> + <b,a>) +
// y^2 <b,b>, so four grams serve every angle; tails combine the same way.
std::vector<double> connection_caps(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm, int K,
                                    const GramOptions& gopt, double& a_up, double& b_up) {
  const WaveFunction a = connection_apply(ctx, 1.0, 0.0, xi), b = connection_apply(ctx, 0.0, 1.0, xi);
  const GramResult aa = gram(ctx, a, a, gopt), bb = gram(ctx, b, b, gopt);
  const GramResult ab = gram(ctx, a, b, gopt), ba = gram(ctx, b, a, gopt);
  const TwistedSequence mixed = ab.coefficients + ba.coefficients;
  auto cap = [](double l1, double tail) { return std::sqrt(l1 + tail + 1e-12 * std::max(1.0, l1)); };
  a_up = cap(l1_norm(aa.coefficients), aa.tail_bound);
  b_up = cap(l1_norm(bb.coefficients), bb.tail_bound);
  std::vector<double> up(K);
  for (int k = 0; k < K; ++k) {
    const auto [x, y] = unit_direction(norm, 2.0 * kPi * k / K);
    const TwistedSequence c = aa.coefficients.scaled(x * x) + mixed.scaled(x * y) + bb.coefficients.scaled(y * y);
    const double tail = x * x * aa.tail_bound + std::abs(x * y) * (ab.tail_bound + ba.tail_bound) + y * y * bb.tail_bound;
    up[k] = cap(l1_norm(c), tail);
  }
  return up;
}

ConnectionScan scan_connection(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm,
                               const DNormOptions& opt, bool want_lower) {
  if (opt.angles < 1) throw InvalidInput("angle count must be positive");
  const int K = opt.angles;
  double a = 0.0, b = 0.0;
  const std::vector<double> up = connection_caps(ctx, xi, norm, K, opt.gram, a, b);
  std::vector<double> lo(K, 0.0);
  if (want_lower) {
    ModuleNormOptions mo{opt.window, opt.gram, opt.power};
#pragma omp parallel for schedule(static) if (opt.exec == Exec::parallel)
    for (int k = 0; k < K; ++k) {
      const auto [x, y] = unit_direction(norm, 2.0 * kPi * k / K);
      lo[k] = module_norm(ctx, connection_apply(ctx, x, y, xi), mo).lower;
    }
  }
  const double h = 2.0 * kPi / K;
  ConnectionScan s;
  s.lower = *std::max_element(lo.begin(), lo.end());
  s.upper = *std::max_element(up.begin(), up.end()) + 0.5 * h * unit_direction_lipschitz(norm) * std::hypot(a, b);
  return s;
}

}  // namespace

NormEstimate gradient_opnorm(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm,
                             const DNormOptions& opt) {
  const ConnectionScan s = scan_connection(ctx, xi, norm, opt, true);
  const double scale = 2.0 * kPi * std::abs(ctx.eth);
  NormEstimate e;
  e.lower = s.lower / scale;
  e.upper = s.upper / scale;
  e.window_radius = opt.window.radius;
  return e;
}

double dnorm_upper(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm, const DNormOptions& opt) {
  if (xi.is_zero()) return 0.0;
  const ConnectionScan s = scan_connection(ctx, xi, norm, opt, false);
  return std::max(module_norm_upper(ctx, xi, opt.gram), s.upper / (2.0 * kPi * std::abs(ctx.eth)));
}

DNormEstimate dnorm_estimate(const HeisenbergContext& ctx, const WaveFunction& xi, const DirectionSample& samples,
                             const DNormOptions& opt) {
  if (samples.directions.empty()) throw InvalidInput("direction sample is empty");
  DNormEstimate out;
  out.window_radius = opt.window.radius;
  if (xi.is_zero()) return out;
  const ModuleNormOptions mo{opt.window, opt.gram, opt.power};
  const NormEstimate base = module_norm(ctx, xi, mo);
  out.module_lower = base.lower, out.module_upper = base.upper;

  const double scale = 2.0 * kPi * std::abs(ctx.eth);
  const auto& dirs = samples.directions;
  std::vector<double> q(dirs.size(), 0.0);
  ModuleNormOptions inner = mo;
  if (opt.exec == Exec::parallel) inner.gram.exec = Exec::serial, inner.power.exec = Exec::serial;
#pragma omp parallel for schedule(dynamic) if (opt.exec == Exec::parallel)
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto [x, y] = dirs[i];
    const double r = plane_norm(samples.norm, x, y);
    if (!(r > 0.0)) continue;
    const WaveFunction diff = sigma_act(ctx.eth, x, y, xi) - xi;
    // the compression to the window only sees coefficients on [-2N, 2N]^2
    q[i] = module_norm_lower(ctx, diff, inner.window, inner.gram.quad, inner.power) / (scale * r);
  }
  out.sup_lower = *std::max_element(q.begin(), q.end());
  out.quotients = std::move(q);
  out.lower = std::max(base.lower, out.sup_lower);
  if (opt.lower_only) {
    out.connection_upper = out.upper = std::numeric_limits<double>::infinity();
    return out;
  }
  const ConnectionScan s = scan_connection(ctx, xi, samples.norm, opt, false);
  out.connection_upper = s.upper / scale;
  out.upper = std::max(base.upper, out.connection_upper);
  out.iterations = base.iterations;
  if (out.lower > out.upper * (1 + 1e-9)) throw std::logic_error("D-norm lower estimate exceeds its cap");
  return out;
}

double sup_lower_within(const DNormEstimate& e, const DirectionSample& samples, double delta) {
  if (e.quotients.size() != samples.directions.size()) throw InvalidInput("estimate does not match the sample");
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < e.quotients.size(); ++i) {
    const auto [x, y] = samples.directions[i];
    if (plane_norm(samples.norm, x, y) <= delta * (1 + 1e-12)) best = std::max(best, e.quotients[i]), any = true;
  }
  if (!any) throw InvalidInput("no sampled direction within delta");
  return best;
}

double gram_l_seminorm_lower(const HeisenbergContext& ctx, const GramResult& g,
                             const std::vector<std::pair<double, double>>& directions, const Window& window,
                             PlaneNorm norm, const PowerOptions& power) {
  double best = 0.0;
  for (const auto& [x, y] : directions) {
    const double r = plane_norm(norm, x, y);
    if (!(r > 0.0)) throw InvalidInput("zero direction");
    const TwistedSequence diff =
        dual_action(std::polar(1.0, x), std::polar(1.0, y), g.coefficients) - g.coefficients;
    const double t = torus_norm_estimate(ctx.theta, diff, window, power).lower;
    best = std::max(best, (t - 2.0 * g.tail_bound) / r);
  }
  return best;
}

Report leibniz_report(const HeisenbergContext& ctx, const TwistedSequence& f, const WaveFunction& xi,
                      const WaveFunction& omega, const LeibnizOptions& opt) {
  const PlaneNorm norm = opt.lhs_samples.norm;
  const DNormOptions& dopt = opt.dnorm;
  std::vector<std::pair<double, double>> ldirs = opt.l_directions;
  if (ldirs.empty())
    for (int k = 0; k < 8; ++k) {
      const auto [ux, uy] = unit_direction(norm, 2.0 * kPi * k / 8);
      ldirs.emplace_back(1e-3 * ux, 1e-3 * uy);
    }

  const double xi_up = module_norm_upper(ctx, xi, dopt.gram);
  const double om_up = module_norm_upper(ctx, omega, dopt.gram);
  const double dxi = dnorm_upper(ctx, xi, norm, dopt);
  const double dom = dnorm_upper(ctx, omega, norm, dopt);

  Report rep;
  const WaveFunction fxi = module_act(ctx, f, xi);
  DNormOptions lo = dopt;
  lo.lower_only = true;
  const double lhs_inner = fxi.is_zero() ? 0.0 : dnorm_estimate(ctx, fxi, opt.lhs_samples, lo).lower;
  const double rhs_inner = l1_norm(f) * dxi + l_seminorm_cap(f, norm) * xi_up;
  rep.push_back(make_check("leibniz_inner", lhs_inner, rhs_inner, 1e-12 * rhs_inner));

  const GramResult g = gram(ctx, xi, omega, dopt.gram);
  const double lhs_mod = gram_l_seminorm_lower(ctx, g, ldirs, dopt.window, norm, dopt.power);
  const double rhs_mod = xi_up * dom + dxi * om_up;
  rep.push_back(make_check("leibniz_modular", lhs_mod, rhs_mod, 1e-12 * rhs_mod));
  rep.push_back(make_check("leibniz_modular_factor2", lhs_mod, 2.0 * dxi * dom, 1e-12 * dxi * dom));
  return rep;
}

}  // namespace hmod
