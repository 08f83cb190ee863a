#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hmod/dnorm.hpp"
#include "hmod/heisenberg.hpp"
#include "hmod/quadrature.hpp"
#include "hmod/report.hpp"
#include "hmod/wave.hpp"

namespace hmod {

// r -> f(r) with |f| <= tail beyond `radius` (compact support: tail = 0).
struct RadialProfile {
  std::function<double(double)> eval;
  double radius = 0.0;
  double tail = 0.0;
  std::string kind;
  double operator()(double r) const { return eval(r); }
};

inline constexpr int kLaguerreMax = 64;

// eth exp(-pi eth r^2 / 2) L_n(pi eth r^2).
RadialProfile laguerre_profile(double eth, int n);

// Standard Laguerre polynomial L_n(u) by the three-term recurrence.
double laguerre(int n, double u);

// integral_0^R g(r) r dr by composite Gauss-Legendre.
double radial_integral(const std::function<double(double)>& g, double R, double panel = 0.05, int order = 24);

// Plane integral of the radial extension f(|(x, y)|).
double plane_integral(const RadialProfile& f);

// a_j = (2 pi / eth) <f, psi^j>_{r dr}, the coefficients of f in the
// orthogonal family psi^j (each of squared norm eth / (2 pi)).
std::vector<double> laguerre_coefficients(double eth, const RadialProfile& f, int n);

// sum_{j<=n} (n + 1 - j)/(n + 1) a_j psi^j.
RadialProfile cesaro_profile(double eth, const RadialProfile& f, int n);

// integral_0^R |f - g| r dr.
double radial_l1_distance(const RadialProfile& f, const RadialProfile& g, double R);

// Smooth bump C exp(-1 / (1 - (r/R)^2)) on r < R with plane integral 1.
RadialProfile bump_profile(double R);

// Plane first moment  int f(|z|) |z|_norm dz  of a radial profile.
double first_moment(const RadialProfile& f, PlaneNorm norm);

struct PlanarKernel {
  std::function<double(double, double)> eval;
  double radius = 0.0;  // |kernel| negligible outside [-radius, radius]^2
};

PlanarKernel planar(const RadialProfile& f);

// Tensor Gauss-Legendre on [-R, R]^2.
struct Cubature2D {
  Rule1D x, y;
  double R = 0.0;
  static Cubature2D tensor(double R, int n = 41);
  static Cubature2D composite(double R, int order, int panels);
  std::size_t size() const { return x.nodes.size() * y.nodes.size(); }
};

// Values of a C^d valued function at a batch of points, row-major points x d.
using Evaluator = std::function<std::vector<cplx>(const std::vector<double>&)>;

Evaluator evaluator_of(const WaveFunction& xi);

// Discretized sigma^f = sum_k w_k f(z_k) sigma^{z_k}, applied pointwise: for
// each y node the x sum collapses to a trigonometric sum in s, so composites
// never expand into catalog sums.
class SmoothingOperator {
 public:
  SmoothingOperator(double eth, const PlanarKernel& kernel, const Cubature2D& cub, int d);
  Evaluator apply(Evaluator h) const;
  // sum_k |w_k f(z_k)|, the exact l1 mass of the discretization
  double mass() const { return mass_; }
  double signed_mass() const { return signed_mass_; }

 private:
  double eth_;
  int d_;
  std::vector<double> xs_, ys_;
  std::vector<cplx> W_;  // ys x xs, w_i w_j f exp(i pi eth x y)
  double mass_ = 0.0, signed_mass_ = 0.0;
};

// The same discretization as a catalog sum (node count x term count terms).
WaveFunction sigma_apply(const HeisenbergContext& ctx, const PlanarKernel& kernel, const Cubature2D& cub,
                         const WaveFunction& xi);

// integral over [-T, T] of |a - b|^2, then the square root.
double l2_distance(const Evaluator& a, const Evaluator& b, int d, double T, double panel = 0.1, int order = 24);
cplx l2_inner_values(const Evaluator& a, const Evaluator& b, int d, double T, double panel = 0.1, int order = 24);

// c_j = <sigma^{(psi^j)o} H^j, H^j>, measured with the given cubature. With the
// Hermite scale of hermite_vector this is 1 for every j, i.e. sigma^{(psi^j)o}
// is the projection P_j onto H^j (x) C^d.
double projection_calibration(double eth, int j, const Cubature2D& cub);

// Composite cubature covering the Laguerre kernels of order <= j at scale eth
// down to `tail`, with 16-point panels of width <= panel.
Cubature2D laguerre_cubature(double eth, int j, double tail = 1e-10, double panel = 2.0);

struct SmoothingCheck {
  CheckRow row;
  double bump_radius = 0.0;
  double epsilon = 0.0;
  double mass = 0.0;
};

// ||xi - sigma^f xi|| <= eps D(xi) for a bump f with unit mass and first moment
// eps / (2 pi |eth|). Moments are verified by radial quadrature.
SmoothingCheck smoothing_bound_check(const HeisenbergContext& ctx, double bump_radius, const WaveFunction& xi,
                                     double epsilon, PlaneNorm norm, const DNormOptions& opt = {},
                                     int cubature_nodes = 41);

struct NetRow {
  int vector_id = 0;
  int nearest_net_id = 0;
  double residual = 0.0;
};

struct NetReport {
  std::vector<NetRow> rows;
  int net_size = 0;
  double max_residual = 0.0;
  double bump_radius = 0.0;
  int cesaro_order = 0;
  int hermite_cut = 0;
  bool covered = false;
};

struct NetOptions {
  int cesaro_order = kLaguerreMax;
  GramOptions gram;
  PlaneNorm norm = PlaneNorm::euclid;
};

// Finite-rank image sum_{j<=J} w_j a_j P_j xi of the Cesaro-truncated
// Laguerre expansion of the bump, J = min(n, kHermiteMax).
WaveFunction finite_rank_image(const HeisenbergContext& ctx, const std::vector<double>& mode_weights,
                               const WaveFunction& xi);

std::vector<double> net_mode_weights(double eth, double bump_radius, int cesaro_order);

NetReport compactness_net(const HeisenbergContext& ctx, const std::vector<WaveFunction>& vectors, double epsilon,
                          const NetOptions& opt = {});

}  // namespace hmod
