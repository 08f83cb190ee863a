#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmod/lattice.hpp"
#include "hmod/parallel.hpp"

namespace hmod {

// The fixed norm on R^2 used by L-seminorms and D-norms.
enum class PlaneNorm { euclid, l1, linf };

double plane_norm(PlaneNorm norm, double x, double y);
double dual_plane_norm(PlaneNorm norm, double x, double y);
PlaneNorm parse_plane_norm(const std::string& s);
std::string to_string(PlaneNorm norm);

// The square {-N..N}^2, indexed lexicographically by (n, m).
struct Window {
  int radius = 1;
  explicit Window(int r = 1);
  int side() const { return 2 * radius + 1; }
  std::size_t dim() const { return static_cast<std::size_t>(side()) * side(); }
  bool contains(LatticePoint p) const;
  std::size_t index(LatticePoint p) const;
  LatticePoint point(std::size_t idx) const;
};

struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  int window_radius = 0;
  long iterations = 0;
  bool converged = true;
};

enum class NormMethod { lanczos, power };

struct PowerOptions {
  NormMethod method = NormMethod::lanczos;
  double tol = 1e-10;
  long max_iter = 10000;
  // ladder levels start at this radius and double up to the target window
  int ladder_start = 8;
  Exec exec = Exec::parallel;
};

// Dense compression of pi_theta(f), row m, column m+n carrying f(n) sigma(m, n).
struct TruncatedTorusOperator {
  double theta = 0.0;
  Window window;
  Eigen::MatrixXcd matrix;
};

inline constexpr int kDenseRadiusMax = 24;
// Ladder levels up to this radius start from the exact top singular vector of
// the dense compression instead of a Lanczos run.
inline constexpr int kExactRadius = 8;

TruncatedTorusOperator assemble_pi(double theta, const TwistedSequence& f, const Window& window);

// Matrix-free application of the compression of pi_theta(f) to a window.
class TorusApplier {
 public:
  TorusApplier(double theta, const TwistedSequence& f, int radius);
  int radius() const { return radius_; }
  void apply(const std::vector<cplx>& x, std::vector<cplx>& y, Exec exec) const;
  void apply_serial(const std::vector<cplx>& x, std::vector<cplx>& y) const;
  void apply_parallel(const std::vector<cplx>& x, std::vector<cplx>& y) const;

 private:
  struct Term {
    long dn, dm;
    cplx coeff;
    std::vector<cplx> row_phase;  // indexed by m_x + N
    std::vector<cplx> col_phase;  // indexed by m_y + N
  };
  void apply_row(int i, const std::vector<cplx>& x, std::vector<cplx>& y) const;
  int radius_;
  std::vector<Term> terms_;
};

// Largest singular value of the compression by warm-started power iteration
// on A*A over the ladder of radii start, 2 start, ..., window.radius.
// Every reported value is a Rayleigh quotient, hence a lower bound of the norm.
NormEstimate power_norm(double theta, const TwistedSequence& f, const Window& window,
                        const PowerOptions& opt = {});

// Same ladder, Lanczos on A*A instead of plain power steps. The reported value
// is the Rayleigh quotient |Ay|/|y| of the explicit Ritz vector y (rebuilt in
// a second pass over the deterministic recurrence), so it stays a lower bound.
NormEstimate lanczos_norm(double theta, const TwistedSequence& f, const Window& window,
                          const PowerOptions& opt = {});

NormEstimate torus_norm_estimate(double theta, const TwistedSequence& f, const Window& window,
                                 const PowerOptions& opt = {});

// sup over a uniform grid of T^2 of |sum f(n,m) z1^n z2^m|.
double fourier_sup_oracle(const TwistedSequence& f, int gridpoints);

TwistedSequence dual_action(cplx z1, cplx z2, const TwistedSequence& f);

NormEstimate l_seminorm_estimate(double theta, const TwistedSequence& f,
                                 const std::vector<std::pair<double, double>>& directions,
                                 const Window& window, PlaneNorm norm = PlaneNorm::euclid,
                                 const PowerOptions& opt = {});

// Sum |f(n,m)| |(n,m)|_* : the exact coefficient cap of L_theta(f).
double l_seminorm_cap(const TwistedSequence& f, PlaneNorm norm);

// Smallest eigenvalue of the dense Hermitian part of the compression.
double min_eigenvalue(const TruncatedTorusOperator& op);

}  // namespace hmod
