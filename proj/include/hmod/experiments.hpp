#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmod/dnorm.hpp"
#include "hmod/heisenberg.hpp"
#include "hmod/report.hpp"
#include "hmod/smoothing.hpp"

namespace hmod {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kManifestSchema = 1;

using Rng = std::mt19937_64;

// Random finite sequence: `count` entries on {-radius..radius}^2, coefficients
// uniform in the unit square of C.
TwistedSequence random_sequence(Rng& rng, int radius, int count);

// Catalog vector with `terms` terms of degree <= 2, centers in [-1/2, 1/2],
// widths in [pi/2, 2 pi], frequencies in [-1/2, 1/2].
WaveFunction random_wave(Rng& rng, int d, int terms);

struct ContextSpec {
  int p = 0, q = 1, d = 1;
  double theta = 0.5;
};

// Problem sizes of the verify suite. The defaults keep one run well under
// half a minute; the acceptance binary passes larger ones.
struct VerifySizes {
  int algebra_trials = 20;
  int torus_pairs = 4;
  int oracle_polys = 2;
  int oracle_window = 64;
  int oracle_grid = 1024;
  int catalog_trials = 10;
  int group_elements = 4;
  int continuity_levels = 10;
  int dnorm_vectors = 2;
  int leibniz_triples = 2;
  int contraction_pairs = 2;
  int orthogonality_max = 1;
  int net_vectors = 4;
  int sweep_levels = 4;
};

struct RunConfig {
  std::vector<ContextSpec> contexts{{0, 1, 1, 0.5}};
  int window = 8;
  int dnorm_window = 4;  // D-norm and smoothing runs
  QuadratureSpec quad;
  int radii = 5, angles = 16;
  double r_min = 1e-3, r_max = 10.0;
  PlaneNorm norm = PlaneNorm::euclid;
  std::string out = "out";
  std::uint64_t seed = 1;
  int threads = 0;
  // stored constant c with sigma^{(psi^j)o} = c P_j; checked by the suite
  double calibration = 1.0;

  double theta_inf = 0.5;
  std::vector<double> deltas;  // empty: 2^-1 .. 2^-10
  bool two_sided = false;

  std::vector<double> bump_radii{0.2, 0.1, 0.05};
  double net_epsilon = 0.2;
  int net_vectors = 20;

  std::vector<WaveFunction> vectors;       // empty: the ground Gaussian of each context
  std::vector<TwistedSequence> sequences;  // empty: random ones from the seed

  VerifySizes sizes;

  // Throws ConfigError on unknown keys, wrong types or invalid values.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  std::vector<HeisenbergContext> make_contexts() const;
  DirectionSample directions() const;
  DNormOptions dnorm_options() const;
  std::vector<double> sweep_deltas() const;
};

// Keeps the row with the largest lhs - rhs - slack under a new name.
CheckRow worst(const std::string& name, const Report& rows);

Report check_algebra(std::uint64_t seed, int trials);
Report check_torus(std::uint64_t seed, int pairs);
Report check_torus_oracle(std::uint64_t seed, int polys, int window, int grid);
Report check_catalog(std::uint64_t seed, int trials);
Report check_gaussian_gram(int window);
Report check_module(std::uint64_t seed, int trials);
Report check_actions(const HeisenbergContext& ctx, std::uint64_t seed, int elements, const Window& window);

struct ContinuityFit {
  double K = 0.0;
  double validation_ratio = 0.0;
  std::vector<double> path;  // module-norm distances along (2^-k, 2^-k, 2^-k)
};
ContinuityFit fit_strong_continuity(double eth, std::uint64_t seed, int elements, int grid, int levels);
Report check_strong_continuity(double eth, std::uint64_t seed, int elements, int grid, int levels);

Report check_dnorm(std::uint64_t seed, int vectors, const DirectionSample& samples, const DNormOptions& opt);
Report check_dnorm_refinement(const HeisenbergContext& ctx, const WaveFunction& xi, PlaneNorm norm);
Report check_leibniz(std::uint64_t seed, int triples, const LeibnizOptions& opt);
Report check_ip_lemma(const std::vector<double>& perturbations);
Report check_weyl(double eth, std::uint64_t seed, int contraction_pairs, int orthogonality_max, double calibration);
Report check_smoothing(const HeisenbergContext& ctx, const std::vector<double>& bump_radii, PlaneNorm norm,
                       const DNormOptions& opt);

// Hermite vectors H^j / D_up(H^j), j < count.
std::vector<WaveFunction> normalized_hermite_family(const HeisenbergContext& ctx, int count, PlaneNorm norm,
                                                    const DNormOptions& opt);
Report check_net(const HeisenbergContext& ctx, int vectors, double epsilon, PlaneNorm norm, const DNormOptions& opt);

struct SweepRow {
  double delta = 0.0;
  double norm_diff = 0.0;
  double gram_l1 = 0.0;
};

// xi (default g) at (0, 1, 1, theta_inf + delta) against theta_inf, deltas in
// the given order; with two_sided the worse of +delta and -delta is kept. The
// l1 column covers the computed rectangles only, no tail bounds.
std::vector<SweepRow> continuity_sweep(double theta_inf, const std::vector<double>& deltas, const Window& window,
                                       bool two_sided, const GramOptions& gram = {},
                                       const WaveFunction& xi = ground_gaussian());
// Monotone l1 column as delta shrinks; with `endpoint` also the value at the
// smallest delta against 1e-3.
Report check_sweep(const std::vector<SweepRow>& rows, bool endpoint);

struct VerifyResult {
  Report rows;
  bool pass = true;
};
VerifyResult run_verify(const RunConfig& cfg);

// CSV with a fixed header; doubles in %.17g.
std::string format_double(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_report_csv(const std::string& path, const Report& rows);
void write_manifest(const std::string& path, const std::string& command, const RunConfig& cfg,
                    const nlohmann::json& extra = nlohmann::json::object());

}  // namespace hmod
