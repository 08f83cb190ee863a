#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "hmod/lattice.hpp"

namespace hmod {

// s -> c0 * amp * (s - b)^k * exp(-a (s - b)^2) * exp(2 i pi phi s)
struct WaveTerm {
  std::vector<cplx> amp;
  int k = 0;
  double b = 0.0;
  double a = 1.0;
  double phi = 0.0;
  cplx c0 = 1.0;
};

class WaveFunction {
 public:
  explicit WaveFunction(int d = 1);
  WaveFunction(int d, std::vector<WaveTerm> terms);

  int d() const { return d_; }
  const std::vector<WaveTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  WaveFunction operator+(const WaveFunction& o) const;
  WaveFunction operator-(const WaveFunction& o) const;
  WaveFunction scaled(cplx c) const;

  std::vector<cplx> evaluate(double s) const;
  // Row-major nodes x d block of values.
  std::vector<cplx> evaluate_many(const std::vector<double>& s) const;

  // Hull of the intervals outside which every term is below tol.
  std::pair<double, double> essential_support(double tol) const;
  // Largest |phi| over the terms.
  double max_frequency() const;

  nlohmann::json to_json() const;
  static WaveFunction from_json(const nlohmann::json& j);

 private:
  void canonicalize();
  int d_;
  std::vector<WaveTerm> terms_;
};

// Single Gaussian term 2^{1/4} exp(-pi s^2) in coordinate `slot`.
WaveFunction ground_gaussian(int d = 1, int slot = 0);

WaveFunction heisenberg_act(double eth, double x, double y, double u, const WaveFunction& xi);
WaveFunction sigma_act(double eth, double x, double y, const WaveFunction& xi);
WaveFunction derivative(const WaveFunction& xi);
WaveFunction monomial_multiply(const WaveFunction& xi);

struct QuadratureSpec {
  int order = 64;
  double max_panel = 1.0;
  double tail_tol = 1e-14;
};

// Integral of <xi(t), omega(t)>_{C^d}, conjugate-linear in omega.
cplx l2_inner(const WaveFunction& xi, const WaveFunction& omega, const QuadratureSpec& q = {});
double l2_norm(const WaveFunction& xi, const QuadratureSpec& q = {});

inline constexpr int kHermiteMax = 32;

// L^2-normalized oscillator eigenfunction of order j whose ground state is
// (2/eth)^{1/4} exp(-pi s^2 / eth), placed in coordinate `slot` of C^d.
WaveFunction hermite_vector(double eth, int j, int d = 1, int slot = 0, int jmax = kHermiteMax);

// M = max_{i<=2} sup_s (1 + s^2) |xi^{(i)}(s)|, certified: grid values plus a
// Lipschitz cell bound, and an analytic Gaussian tail beyond the grid.
double decay_envelope(const WaveFunction& xi);

}  // namespace hmod
