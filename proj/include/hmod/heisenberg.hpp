#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "hmod/lattice.hpp"
#include "hmod/parallel.hpp"
#include "hmod/torus.hpp"
#include "hmod/wave.hpp"

namespace hmod {

struct HeisenbergContext {
  int p = 0;
  int q = 1;
  int d = 1;
  double theta = 0.5;
  double eth = 0.5;
  Eigen::MatrixXcd clock;  // diag(z^k), z = exp(-2 i pi p / q)
  Eigen::MatrixXcd shift;  // e_k -> e_{k+1 mod q}

  static HeisenbergContext make(int p, int q, int d, double theta);
  // Phase z with clock * shift = z * shift * clock.
  cplx clock_ratio() const;
  nlohmann::json to_json() const;
  static HeisenbergContext from_json(const nlohmann::json& j);
};

// exp(i pi p n m / q) clock^n shift^m (x) id_{d/q}, evaluated on the integers
// (n, m) themselves so that rho(a) rho(b) = sigma_{p/q}(a, b) rho(a + b) on Z^2.
Eigen::MatrixXcd rho(const HeisenbergContext& ctx, long n, long m);

// varpi^{n,m}: sigma^{n,m} at eth on the scalar part, rho(n, m) on amplitudes.
WaveFunction module_act_single(const HeisenbergContext& ctx, long n, long m, const WaveFunction& xi);

// Left action f . xi = sum f(k) varpi^{-k} xi, the action for which
// gram(f . xi, omega) = f *_theta gram(xi, omega).
WaveFunction module_act(const HeisenbergContext& ctx, const TwistedSequence& f, const WaveFunction& xi);

struct GramOptions {
  double threshold = 1e-14;
  QuadratureSpec quad;
  Exec exec = Exec::parallel;
};

struct GramResult {
  TwistedSequence coefficients;
  double tail_bound = 0.0;
  // inclusive rectangle actually computed
  long n_lo = 0, n_hi = -1, m_lo = 0, m_hi = -1;
  nlohmann::json to_json() const;
};

// <varpi^{n,m} xi, omega> by plain quadrature of the acted vector.
cplx gram_coefficient(const HeisenbergContext& ctx, const WaveFunction& xi, const WaveFunction& omega,
                      long n, long m, const QuadratureSpec& quad = {});

// Closed form of the same coefficient from Gaussian moments; independent of
// the quadrature path and used as its oracle.
cplx gram_coefficient_exact(const HeisenbergContext& ctx, const WaveFunction& xi,
                            const WaveFunction& omega, long n, long m);

// Per term pair bound on |gram(n, m)| from the Gaussian moment formula.
double gram_envelope(const HeisenbergContext& ctx, const WaveFunction& xi, const WaveFunction& omega,
                     long n, long m);

GramResult gram(const HeisenbergContext& ctx, const WaveFunction& xi, const WaveFunction& omega,
                const GramOptions& opt = {});

// Coefficients on an explicit rectangle, one quadrature per m row.
TwistedSequence gram_rect_serial(const HeisenbergContext& ctx, const WaveFunction& xi,
                                 const WaveFunction& omega, long n_lo, long n_hi, long m_lo,
                                 long m_hi, const QuadratureSpec& quad);
TwistedSequence gram_rect_parallel(const HeisenbergContext& ctx, const WaveFunction& xi,
                                   const WaveFunction& omega, long n_lo, long n_hi, long m_lo,
                                   long m_hi, const QuadratureSpec& quad);

struct ModuleNormOptions {
  Window window{16};
  GramOptions gram;
  PowerOptions power;
};

NormEstimate module_norm(const HeisenbergContext& ctx, const WaveFunction& xi,
                         const ModuleNormOptions& opt = {});

// sqrt(l1 cap + tail) alone, no spectral work.
double module_norm_upper(const HeisenbergContext& ctx, const WaveFunction& xi, const GramOptions& opt = {});

// Lower bound from the coefficients on [-2N, 2N]^2 only: these are all the
// compression of pi_theta(gram) to the window ever sees, so no envelope pass
// is needed. Meant for long catalog sums (cubature outputs).
double module_norm_lower(const HeisenbergContext& ctx, const WaveFunction& xi, const Window& window,
                         const QuadratureSpec& quad = {}, const PowerOptions& power = {});

struct IpLemmaBound {
  double derivative_terms = 0.0;  // the n != 0 triple sum, sum 1/(4 pi^2 n^2) = 1/12
  double zero_column = 0.0;       // n = 0, bounded without integration by parts
  double phase_term = 0.0;        // mismatch of exp(i pi eth n m) between the contexts
  double total() const { return derivative_terms + zero_column + phase_term; }
};

IpLemmaBound ip_lemma_bound(const HeisenbergContext& a, const HeisenbergContext& b,
                            const WaveFunction& omega, const WaveFunction& xi, const WaveFunction& eta,
                            const GramOptions& opt = {});

// l1 distance between gram_a(omega, eta) and gram_b(xi, eta) over the union of
// their rectangles, plus both tail bounds.
double gram_l1_distance(const HeisenbergContext& a, const HeisenbergContext& b,
                        const WaveFunction& omega, const WaveFunction& xi, const WaveFunction& eta,
                        const GramOptions& opt = {});

}  // namespace hmod
