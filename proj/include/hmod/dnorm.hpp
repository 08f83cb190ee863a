#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hmod/heisenberg.hpp"
#include "hmod/report.hpp"
#include "hmod/torus.hpp"
#include "hmod/wave.hpp"

namespace hmod {

// Directions r * v(phi), |v(phi)| = 1 in the chosen plane norm, for log-spaced
// radii and equally spaced angles.
struct DirectionSample {
  std::vector<std::pair<double, double>> directions;
  int radii = 0;
  int angles = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  PlaneNorm norm = PlaneNorm::euclid;

  static DirectionSample make(int radii = 13, int angles = 32, double r_min = 1e-3, double r_max = 10.0,
                              PlaneNorm norm = PlaneNorm::euclid);
  // Keeps the directions of norm at most delta.
  DirectionSample restricted(double delta) const;
  std::string descriptor() const;
};

// Unit vector of the plane norm at angle phi.
std::pair<double, double> unit_direction(PlaneNorm norm, double phi);

// Euclidean Lipschitz constant of phi -> unit_direction(norm, phi).
double unit_direction_lipschitz(PlaneNorm norm);

// 2 i pi x (s xi) + eth y xi', the derivative of sigma^{tx,ty} xi at t = 0.
WaveFunction connection_apply(const HeisenbergContext& ctx, double x, double y, const WaveFunction& xi);

struct DNormOptions {
  Window window{8};
  GramOptions gram;
  PowerOptions power;
  int angles = 32;  // unit-circle sampling for the connection cap
  Exec exec = Exec::parallel;
  bool lower_only = false;  // skip the connection cap; upper is then +inf
};

struct DNormEstimate : NormEstimate {
  double module_lower = 0.0;
  double module_upper = 0.0;
  double sup_lower = 0.0;         // sampled difference quotients
  double connection_upper = 0.0;  // cap of the connection, already divided by 2 pi |eth|
  std::vector<double> quotients;  // per sampled direction, in sample order
};

// sup_lower recomputed over the directions of norm at most delta.
double sup_lower_within(const DNormEstimate& e, const DirectionSample& samples, double delta);

DNormEstimate dnorm_estimate(const HeisenbergContext& ctx, const WaveFunction& xi, const DirectionSample& samples,
                             const DNormOptions& opt = {});

// sup over unit v of module_norm(nabla_v xi) / (2 pi |eth|): lower from the
// sampled angles, upper with the angular Lipschitz correction.
NormEstimate gradient_opnorm(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm,
                             const DNormOptions& opt = {});

// Upper bound of the D-norm without any sampling of difference quotients.
double dnorm_upper(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm, const DNormOptions& opt = {});

// Lower bound of L_theta(gram(xi, omega)) from its truncation, tails accounted.
double gram_l_seminorm_lower(const HeisenbergContext& ctx, const GramResult& g,
                             const std::vector<std::pair<double, double>>& directions, const Window& window,
                             PlaneNorm norm, const PowerOptions& power = {});

struct LeibnizOptions {
  DNormOptions dnorm;
  DirectionSample lhs_samples = DirectionSample::make(2, 8, 1e-3, 1e-1);
  std::vector<std::pair<double, double>> l_directions;  // empty: unit directions at 8 angles, radius 1e-3
};

// Inner and modular Leibniz checks plus the factor-2 form of the modular one.
Report leibniz_report(const HeisenbergContext& ctx, const TwistedSequence& f, const WaveFunction& xi,
                      const WaveFunction& omega, const LeibnizOptions& opt = {});

}  // namespace hmod
