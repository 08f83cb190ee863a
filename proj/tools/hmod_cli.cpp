// hmod: verify suite, norm tables, continuity sweeps and compactness nets.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hmod/errors.hpp"
#include "hmod/experiments.hpp"
#include "hmod/parallel.hpp"

using namespace hmod;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNonConvergence = 3 };

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> window;
  std::optional<std::string> norm;
  std::optional<int> threads;
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : RunConfig::load(f.config);
  // flags win over the file
  if (f.out) cfg.out = *f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.window) cfg.window = *f.window, cfg.dnorm_window = *f.window;
  if (f.norm) {
    try {
      cfg.norm = parse_plane_norm(*f.norm);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.threads) cfg.threads = *f.threads;
  cfg.validate();
  return cfg;
}

std::string path_in(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out) / name).string(); }

int finish(const std::string& what, const Report& rows) {
  int failed = 0;
  for (const auto& r : rows)
    if (!r.pass) {
      ++failed;
      std::fprintf(stderr, "FAIL %s: lhs %.6g > rhs %.6g + slack %.3g\n", r.name.c_str(), r.lhs_lower, r.rhs_upper,
                   r.slack);
    }
  std::printf("%s: %zu checks, %d failed\n", what.c_str(), rows.size(), failed);
  return failed ? kCheckFailed : kOk;
}

std::vector<WaveFunction> vectors_for(const RunConfig& cfg, const HeisenbergContext& ctx) {
  if (!cfg.vectors.empty()) return cfg.vectors;
  return {ground_gaussian(ctx.d)};
}

int cmd_verify(const RunConfig& cfg) {
  const VerifyResult res = run_verify(cfg);
  write_report_csv(path_in(cfg, "verify.csv"), res.rows);
  write_manifest(path_in(cfg, "verify_manifest.json"), "verify", cfg);
  return finish("verify", res.rows);
}

int cmd_torus_norm(const RunConfig& cfg) {
  std::vector<TwistedSequence> seqs = cfg.sequences;
  if (seqs.empty()) {
    Rng rng(cfg.seed);
    for (int i = 0; i < 4; ++i) seqs.push_back(random_sequence(rng, 4, 6));
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t c = 0; c < cfg.contexts.size(); ++c)
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      const double theta = cfg.contexts[c].theta;
      const NormEstimate e = torus_norm_estimate(theta, seqs[i], Window(cfg.window));
      if (!e.converged) throw NonConvergence("torus norm estimate hit its iteration cap");
      rows.push_back({std::to_string(c), std::to_string(i), format_double(theta), std::to_string(cfg.window),
                      format_double(e.lower), format_double(e.upper), std::to_string(e.iterations)});
    }
  write_csv(path_in(cfg, "torus_norm.csv"),
            {"context_id", "sequence_id", "theta", "window", "lower", "upper", "iterations"}, rows);
  write_manifest(path_in(cfg, "torus_norm_manifest.json"), "torus-norm", cfg);
  return kOk;
}

int cmd_module_norm(const RunConfig& cfg) {
  const auto ctxs = cfg.make_contexts();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t c = 0; c < ctxs.size(); ++c) {
    const auto vs = vectors_for(cfg, ctxs[c]);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].d() != ctxs[c].d) continue;
      ModuleNormOptions mo;
      mo.window = Window(cfg.window);
      mo.gram.quad = cfg.quad;
      const NormEstimate e = module_norm(ctxs[c], vs[i], mo);
      if (!e.converged) throw NonConvergence("module norm estimate hit its iteration cap");
      rows.push_back({std::to_string(c), std::to_string(i), format_double(ctxs[c].theta), format_double(ctxs[c].eth),
                      std::to_string(cfg.window), format_double(e.lower), format_double(e.upper)});
    }
  }
  write_csv(path_in(cfg, "module_norm.csv"), {"context_id", "vector_id", "theta", "eth", "window", "lower", "upper"},
            rows);
  write_manifest(path_in(cfg, "module_norm_manifest.json"), "module-norm", cfg);
  return kOk;
}

int cmd_dnorm(const RunConfig& cfg) {
  const auto ctxs = cfg.make_contexts();
  const DirectionSample samples = cfg.directions();
  const DNormOptions opt = cfg.dnorm_options();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t c = 0; c < ctxs.size(); ++c) {
    const auto vs = vectors_for(cfg, ctxs[c]);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].d() != ctxs[c].d) continue;
      const DNormEstimate e = dnorm_estimate(ctxs[c], vs[i], samples, opt);
      const NormEstimate g = gradient_opnorm(ctxs[c], vs[i], cfg.norm, opt);
      rows.push_back({std::to_string(c), std::to_string(i), format_double(ctxs[c].theta), format_double(e.lower),
                      format_double(e.upper), format_double(e.module_lower), format_double(e.module_upper),
                      format_double(e.sup_lower), format_double(e.connection_upper), format_double(g.lower),
                      format_double(g.upper)});
    }
  }
  write_csv(path_in(cfg, "dnorm.csv"),
            {"context_id", "vector_id", "theta", "lower", "upper", "module_lower", "module_upper", "sup_lower",
             "connection_upper", "gradient_lower", "gradient_upper"},
            rows);
  write_manifest(path_in(cfg, "dnorm_manifest.json"), "dnorm", cfg, {{"directions", samples.descriptor()}});
  return kOk;
}

int cmd_smoothing(const RunConfig& cfg) {
  const auto ctx = cfg.make_contexts().front();
  const DNormOptions opt = cfg.dnorm_options();
  const double scale = 2.0 * kPi * std::abs(ctx.eth);
  const auto vs = vectors_for(cfg, ctx);
  Report checks;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (double r : cfg.bump_radii) {
      const double eps = scale * first_moment(bump_profile(r), cfg.norm);
      const SmoothingCheck c = smoothing_bound_check(ctx, r, vs[i], eps, cfg.norm, opt);
      checks.push_back(c.row);
      rows.push_back({std::to_string(i), format_double(r), format_double(c.epsilon), format_double(c.mass),
                      format_double(c.row.lhs_lower), format_double(c.row.rhs_upper), format_double(c.row.slack),
                      c.row.pass ? "1" : "0"});
    }
  write_csv(path_in(cfg, "smoothing.csv"),
            {"vector_id", "bump_radius", "epsilon", "mass", "lhs_lower", "rhs_upper", "slack", "pass"}, rows);
  write_manifest(path_in(cfg, "smoothing_manifest.json"), "smoothing", cfg);
  return finish("smoothing", checks);
}

int cmd_continuity(const RunConfig& cfg) {
  const auto rows = continuity_sweep(cfg.theta_inf, cfg.sweep_deltas(), Window(cfg.window), cfg.two_sided);
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) cells.push_back({format_double(r.delta), format_double(r.norm_diff), format_double(r.gram_l1)});
  write_csv(path_in(cfg, "continuity.csv"), {"delta", "norm_diff", "gram_l1"}, cells);
  const Report checks = check_sweep(rows, true);
  write_report_csv(path_in(cfg, "continuity_checks.csv"), checks);
  write_manifest(path_in(cfg, "continuity_manifest.json"), "continuity", cfg);
  return finish("continuity", checks);
}

int cmd_net(const RunConfig& cfg) {
  const auto ctx = cfg.make_contexts().front();
  const DNormOptions opt = cfg.dnorm_options();
  std::vector<WaveFunction> vs = cfg.vectors;
  if (vs.empty()) {
    vs = normalized_hermite_family(ctx, cfg.net_vectors, cfg.norm, opt);
  } else {
    for (const auto& v : vs)
      if (dnorm_upper(ctx, v, cfg.norm, opt) > 1.0) throw InvalidInput("net vectors need D-norm at most 1");
  }
  NetOptions no;
  no.norm = cfg.norm;
  no.gram.quad = cfg.quad;
  const NetReport rep = compactness_net(ctx, vs, cfg.net_epsilon, no);
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rep.rows)
    cells.push_back({std::to_string(r.vector_id), std::to_string(r.nearest_net_id), format_double(r.residual)});
  write_csv(path_in(cfg, "net.csv"), {"vector_id", "nearest_net_id", "residual"}, cells);
  write_manifest(path_in(cfg, "net_manifest.json"), "net", cfg,
                 {{"net_size", rep.net_size},
                  {"max_residual", rep.max_residual},
                  {"bump_radius", rep.bump_radius},
                  {"cesaro_order", rep.cesaro_order},
                  {"hermite_cut", rep.hermite_cut}});
  return finish("net", {make_check("net.covered", rep.max_residual, cfg.net_epsilon)});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg module norms, D-norms and smoothing experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "output directory");
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--window", f.window, "window radius");
  app.add_option("--norm", f.norm, "plane norm")->check(CLI::IsMember({"euclid", "l1", "linf"}));
  app.add_option("--threads", f.threads, "OpenMP threads (0: default)");

  using Cmd = int (*)(const RunConfig&);
  const std::vector<std::tuple<std::string, std::string, Cmd>> cmds{
      {"verify", "run every property suite", cmd_verify},
      {"torus-norm", "norm estimates of finite sequences", cmd_torus_norm},
      {"module-norm", "module norms of catalog vectors", cmd_module_norm},
      {"dnorm", "D-norm bounds of catalog vectors", cmd_dnorm},
      {"smoothing", "smoothing bound over the configured bump radii", cmd_smoothing},
      {"continuity", "module-norm continuity sweep in theta", cmd_continuity},
      {"net", "finite-rank net for normalized Hermite vectors", cmd_net}};
  for (const auto& [name, help, fn] : cmds) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  RunConfig cfg;
  try {
    cfg = resolve(f);
    fs::create_directories(cfg.out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "cannot create output directory: %s\n", e.what());
    return kConfigError;
  }
  set_threads(cfg.threads);

  for (const auto& [name, help, fn] : cmds) {
    if (!app.got_subcommand(name)) continue;
    try {
      return fn(cfg);
    } catch (const NonConvergence& e) {
      std::fprintf(stderr, "no convergence: %s\n", e.what());
      return kNonConvergence;
    } catch (const ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kConfigError;
    } catch (const InvalidInput& e) {
      std::fprintf(stderr, "invalid input: %s\n", e.what());
      return kConfigError;
    } catch (const std::runtime_error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kConfigError;
    }
  }
  return kConfigError;
}
