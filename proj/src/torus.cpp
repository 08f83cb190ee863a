#include "hmod/torus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <Eigen/Eigenvalues>

#include "hmod/errors.hpp"

namespace hmod {

double plane_norm(PlaneNorm norm, double x, double y) {
  switch (norm) {
    case PlaneNorm::l1: return std::abs(x) + std::abs(y);
    case PlaneNorm::linf: return std::max(std::abs(x), std::abs(y));
    default: return std::hypot(x, y);
  }
}

double dual_plane_norm(PlaneNorm norm, double x, double y) {
  switch (norm) {
    case PlaneNorm::l1: return plane_norm(PlaneNorm::linf, x, y);
    case PlaneNorm::linf: return plane_norm(PlaneNorm::l1, x, y);
    default: return std::hypot(x, y);
  }
}

PlaneNorm parse_plane_norm(const std::string& s) {
  if (s == "euclid") return PlaneNorm::euclid;
  if (s == "l1") return PlaneNorm::l1;
  if (s == "linf") return PlaneNorm::linf;
  throw InvalidInput("unknown plane norm '" + s + "' (expected euclid, l1 or linf)");
}

std::string to_string(PlaneNorm norm) {
  switch (norm) {
    case PlaneNorm::l1: return "l1";
    case PlaneNorm::linf: return "linf";
    default: return "euclid";
  }
}

Window::Window(int r) : radius(r) {
  if (r < 1) throw InvalidInput("window radius must be >= 1");
}

bool Window::contains(LatticePoint p) const {
  return std::labs(p.n) <= radius && std::labs(p.m) <= radius;
}

std::size_t Window::index(LatticePoint p) const {
  return static_cast<std::size_t>(p.n + radius) * side() + static_cast<std::size_t>(p.m + radius);
}

LatticePoint Window::point(std::size_t idx) const {
  return {static_cast<long>(idx / side()) - radius, static_cast<long>(idx % side()) - radius};
}

TruncatedTorusOperator assemble_pi(double theta, const TwistedSequence& f, const Window& window) {
  if (window.radius > kDenseRadiusMax)
    throw InvalidInput("dense assembly is limited to window radius " + std::to_string(kDenseRadiusMax));
  TruncatedTorusOperator op{theta, window, Eigen::MatrixXcd::Zero(window.dim(), window.dim())};
  const int N = window.radius;
  for (long a = -N; a <= N; ++a)
    for (long b = -N; b <= N; ++b) {
      const LatticePoint m{a, b};
      for (const auto& [n, c] : f.entries()) {
        const LatticePoint t = m + n;
        if (!window.contains(t)) continue;
        op.matrix(window.index(m), window.index(t)) += c * cocycle(theta, m, n);
      }
    }
  return op;
}

TorusApplier::TorusApplier(double theta, const TwistedSequence& f, int radius) : radius_(radius) {
  const int N = radius;
  for (const auto& [n, c] : f.entries()) {
    if (std::labs(n.n) > 2 * N || std::labs(n.m) > 2 * N) continue;
    Term t{n.n, n.m, c, std::vector<cplx>(2 * N + 1), std::vector<cplx>(2 * N + 1)};
    // sigma(m, n) = exp(i pi theta (n_x m_y - m_x n_y)) splits into a row and a column factor
    for (int k = -N; k <= N; ++k) {
      t.row_phase[k + N] = cocycle(theta, {k, 0}, {0, n.m});
      t.col_phase[k + N] = cocycle(theta, {0, k}, {n.n, 0});
    }
    terms_.push_back(std::move(t));
  }
}

void TorusApplier::apply_row(int i, const std::vector<cplx>& x, std::vector<cplx>& y) const {
  const int N = radius_;
  const int side = 2 * N + 1;
  cplx* out = y.data() + static_cast<std::size_t>(i) * side;
  std::fill(out, out + side, cplx{0.0, 0.0});
  for (const auto& t : terms_) {
    const long ti = i + t.dn;
    if (ti < 0 || ti >= side) continue;
    const cplx c = t.coeff * t.row_phase[i];
    const cplx* in = x.data() + static_cast<std::size_t>(ti) * side;
    const long lo = std::max(0L, -t.dm);
    const long hi = std::min<long>(side, side - t.dm);
    for (long j = lo; j < hi; ++j) out[j] += c * t.col_phase[j] * in[j + t.dm];
  }
}

void TorusApplier::apply_serial(const std::vector<cplx>& x, std::vector<cplx>& y) const {
  const int side = 2 * radius_ + 1;
  y.resize(static_cast<std::size_t>(side) * side);
  for (int i = 0; i < side; ++i) apply_row(i, x, y);
}

void TorusApplier::apply_parallel(const std::vector<cplx>& x, std::vector<cplx>& y) const {
  const int side = 2 * radius_ + 1;
  y.resize(static_cast<std::size_t>(side) * side);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < side; ++i) apply_row(i, x, y);
}

void TorusApplier::apply(const std::vector<cplx>& x, std::vector<cplx>& y, Exec exec) const {
  if (exec == Exec::parallel)
    apply_parallel(x, y);
  else
    apply_serial(x, y);
}

namespace {

std::vector<int> ladder_radii(int target, int start) {
  std::vector<int> r{target};
  while (r.back() / 2 >= start && r.back() % 2 == 0) r.push_back(r.back() / 2);
  std::reverse(r.begin(), r.end());
  return r;
}

std::vector<cplx> embed(const std::vector<cplx>& v, int from, int to) {
  const Window a(from), b(to);
  std::vector<cplx> out(b.dim(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < v.size(); ++i) out[b.index(a.point(i))] = v[i];
  return out;
}

}  // namespace

NormEstimate power_norm(double theta, const TwistedSequence& f, const Window& window,
                        const PowerOptions& opt) {
  NormEstimate est;
  est.window_radius = window.radius;
  if (f.empty()) return est;
  const TwistedSequence fstar = adjoint(f);
  std::vector<cplx> v, w;
  int prev = 0;
  double best = 0.0;
  for (int r : ladder_radii(window.radius, std::max(1, opt.ladder_start))) {
    const TorusApplier A(theta, f, r), As(theta, fstar, r);
    if (prev == 0) {
      const Window win(r);
      v.assign(win.dim(), cplx{1.0 / std::sqrt(static_cast<double>(win.dim())), 0.0});
    } else {
      v = embed(v, prev, r);
    }
    prev = r;
    double nv = norm2(v, opt.exec);
    double last = -1.0;
    bool done = false;
    for (long it = 0; it < opt.max_iter; ++it) {
      if (nv == 0.0) {
        done = true;
        break;
      }
      A.apply(v, w, opt.exec);
      const double nw = norm2(w, opt.exec);
      best = std::max(best, nw / nv);
      As.apply(w, v, opt.exec);
      const double nv2 = norm2(v, opt.exec);
      if (nw > 0.0) best = std::max(best, nv2 / nw);
      ++est.iterations;
      const double s = nw > 0.0 ? nv2 / nw : 0.0;
      if (last >= 0.0 && std::abs(s - last) <= opt.tol * std::max(s, 1e-300)) {
        done = true;
      }
      last = s;
      if (nv2 == 0.0) {
        done = true;
        break;
      }
      for (auto& e : v) e /= nv2;
      nv = 1.0;
      if (done) break;
    }
    est.converged = done;
  }
  est.lower = best;
  return est;
}

namespace {

struct LanczosRun {
  std::vector<double> alpha, beta;  // beta[j] couples q_j and q_{j+1}
  bool converged = false;
};

// One pass of the Hermitian Lanczos recurrence for B = A*A started at q0.
// With a non-null `coeffs`, accumulates y = sum coeffs[j] q_j instead of
// testing convergence; the recurrence is replayed bit for bit.
LanczosRun lanczos_pass(const TorusApplier& A, const TorusApplier& As, const std::vector<cplx>& q0,
                        long steps, double tol, Exec exec, const std::vector<double>* coeffs,
                        std::vector<cplx>* y) {
  LanczosRun run;
  const std::size_t n = q0.size();
  std::vector<cplx> q = q0, qprev(n, cplx{0.0, 0.0}), t, w;
  if (y) y->assign(n, cplx{0.0, 0.0});
  double beta_prev = 0.0;
  long next_check = 4;  // geometric spacing keeps the tridiagonal solves cheap
  for (long j = 0; j < steps; ++j) {
    if (y) {
      const double c = (*coeffs)[j];
      for (std::size_t i = 0; i < n; ++i) (*y)[i] += c * q[i];
      if (j + 1 == static_cast<long>(coeffs->size())) break;
    }
    A.apply(q, t, exec);
    As.apply(t, w, exec);
    for (std::size_t i = 0; i < n; ++i) w[i] -= beta_prev * qprev[i];
    const double a = dot(w, q, exec).real();
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * q[i];
    const double b = norm2(w, exec);
    run.alpha.push_back(a);
    if (!y && (j + 1 == next_check || b == 0.0)) {
      next_check = std::max(j + 5, (j + 1) * 9 / 8);
      const int k = static_cast<int>(run.alpha.size());
      Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(run.alpha.data(), k);
      Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(run.beta.data(), k - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      const double top = es.eigenvalues()(k - 1);
      // Ritz residual |B y - top y| = b |last component of y|; the value error
      // is of the order of its square
      const double res = b * std::abs(es.eigenvectors()(k - 1, k - 1));
      if (b == 0.0 || res <= std::sqrt(tol) * std::abs(top)) {
        run.converged = true;
        break;
      }
    }
    if (b == 0.0) {
      run.converged = true;
      break;
    }
    run.beta.push_back(b);
    qprev.swap(q);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
    beta_prev = b;
  }
  if (!y && run.beta.size() == run.alpha.size()) run.beta.pop_back();
  return run;
}

double rayleigh(const TorusApplier& A, const std::vector<cplx>& v, Exec exec) {
  const double nv = norm2(v, exec);
  if (nv == 0.0) return 0.0;
  std::vector<cplx> w;
  A.apply(v, w, exec);
  return norm2(w, exec) / nv;
}

}  // namespace

NormEstimate lanczos_norm(double theta, const TwistedSequence& f, const Window& window,
                          const PowerOptions& opt) {
  NormEstimate est;
  est.window_radius = window.radius;
  if (f.empty()) return est;
  const TwistedSequence fstar = adjoint(f);
  std::vector<cplx> v;
  int prev = 0;
  double best = 0.0;
  for (int r : ladder_radii(window.radius, std::max(1, opt.ladder_start))) {
    const TorusApplier A(theta, f, r), As(theta, fstar, r);
    if (prev == 0 && r <= kExactRadius) {
      // small first level: top right singular vector of the dense compression
      const TruncatedTorusOperator op = assemble_pi(theta, f, Window(r));
      Eigen::BDCSVD<Eigen::MatrixXcd> svd(op.matrix, Eigen::ComputeThinV);
      v.resize(op.matrix.cols());
      for (Eigen::Index i = 0; i < op.matrix.cols(); ++i) v[i] = svd.matrixV()(i, 0);
      best = std::max(best, rayleigh(A, v, opt.exec));
      prev = r;
      continue;
    }
    if (prev == 0) {
      const Window win(r);
      v.assign(win.dim(), cplx{1.0, 0.0});
    } else {
      v = embed(v, prev, r);
    }
    prev = r;
    // the warm start alone already certifies the previous level's value
    best = std::max(best, rayleigh(A, v, opt.exec));
    const double nv = norm2(v, opt.exec);
    if (nv == 0.0) break;
    for (auto& e : v) e /= nv;
    LanczosRun run = lanczos_pass(A, As, v, opt.max_iter, opt.tol, opt.exec, nullptr, nullptr);
    est.iterations += static_cast<long>(run.alpha.size());
    est.converged = run.converged;
    const int k = static_cast<int>(run.alpha.size());
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(run.alpha.data(), k);
    Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(run.beta.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    std::vector<double> coeffs(k);
    for (int i = 0; i < k; ++i) coeffs[i] = es.eigenvectors()(i, k - 1);
    std::vector<cplx> y;
    lanczos_pass(A, As, v, k, opt.tol, opt.exec, &coeffs, &y);
    const double ry = rayleigh(A, y, opt.exec);
    best = std::max(best, ry);
    if (ry >= rayleigh(A, v, opt.exec)) v = std::move(y);
  }
  est.lower = best;
  return est;
}

NormEstimate torus_norm_estimate(double theta, const TwistedSequence& f, const Window& window,
                                 const PowerOptions& opt) {
  NormEstimate est = opt.method == NormMethod::power ? power_norm(theta, f, window, opt)
                                                     : lanczos_norm(theta, f, window, opt);
  est.upper = l1_norm(f);
  // a compression cannot exceed the l1 cap; tolerate rounding only
  if (est.lower > est.upper * (1.0 + 1e-12) + 1e-300)
    throw std::logic_error("torus norm lower estimate exceeds the l1 cap");
  est.lower = std::min(est.lower, est.upper);
  return est;
}

double fourier_sup_oracle(const TwistedSequence& f, int gridpoints) {
  if (gridpoints < 1) throw InvalidInput("gridpoints must be positive");
  if (f.empty()) return 0.0;
  const int G = gridpoints;
  // inner sums over m for each distinct n, at every z2 on the grid
  std::vector<long> ns;
  for (const auto& [p, c] : f.entries())
    if (ns.empty() || ns.back() != p.n) ns.push_back(p.n);
  std::vector<std::vector<cplx>> inner(ns.size(), std::vector<cplx>(G));
  for (std::size_t a = 0; a < ns.size(); ++a)
    for (int k = 0; k < G; ++k) {
      cplx s = 0.0;
      for (const auto& [p, c] : f.entries())
        if (p.n == ns[a]) s += c * std::polar(1.0, 2.0 * kPi * std::fmod(double(p.m) * k, G) / G);
      inner[a][k] = s;
    }
  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (int j = 0; j < G; ++j) {
    std::vector<cplx> z1n(ns.size());
    for (std::size_t a = 0; a < ns.size(); ++a)
      z1n[a] = std::polar(1.0, 2.0 * kPi * std::fmod(double(ns[a]) * j, G) / G);
    for (int k = 0; k < G; ++k) {
      cplx s = 0.0;
      for (std::size_t a = 0; a < ns.size(); ++a) s += z1n[a] * inner[a][k];
      best = std::max(best, std::abs(s));
    }
  }
  return best;
}

TwistedSequence dual_action(cplx z1, cplx z2, const TwistedSequence& f) {
  if (std::abs(std::abs(z1) - 1.0) > 1e-12 || std::abs(std::abs(z2) - 1.0) > 1e-12)
    throw InvalidInput("dual action needs unit moduli");
  const double a1 = std::arg(z1), a2 = std::arg(z2);
  TwistedSequence r;
  for (const auto& [p, c] : f.entries())
    r.set(p, c * std::polar(1.0, std::remainder(a1 * double(p.n) + a2 * double(p.m), 2.0 * kPi)));
  return r;
}

double l_seminorm_cap(const TwistedSequence& f, PlaneNorm norm) {
  double s = 0.0;
  for (const auto& [p, c] : f.entries()) s += std::abs(c) * dual_plane_norm(norm, double(p.n), double(p.m));
  return s;
}

NormEstimate l_seminorm_estimate(double theta, const TwistedSequence& f,
                                 const std::vector<std::pair<double, double>>& directions,
                                 const Window& window, PlaneNorm norm, const PowerOptions& opt) {
  if (directions.empty()) throw InvalidInput("direction list is empty");
  for (const auto& [x, y] : directions)
    if (x == 0.0 && y == 0.0) throw InvalidInput("zero direction in list");
  NormEstimate est;
  est.window_radius = window.radius;
  est.upper = l_seminorm_cap(f, norm);
  for (const auto& [x, y] : directions) {
    const TwistedSequence diff = dual_action(std::polar(1.0, x), std::polar(1.0, y), f) - f;
    const NormEstimate e = torus_norm_estimate(theta, diff, window, opt);
    est.iterations += e.iterations;
    est.converged = est.converged && e.converged;
    est.lower = std::max(est.lower, e.lower / plane_norm(norm, x, y));
  }
  if (est.lower > est.upper * (1.0 + 1e-9) + 1e-14)
    throw std::logic_error("L-seminorm lower estimate exceeds its coefficient cap");
  est.lower = std::min(est.lower, est.upper);
  return est;
}

double min_eigenvalue(const TruncatedTorusOperator& op) {
  const Eigen::MatrixXcd h = 0.5 * (op.matrix + op.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace hmod
