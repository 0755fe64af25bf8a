// Command-line driver: configuration, experiment orchestration, data
// emission.  Exit codes: 0 success, 1 identity violation, 2
// non-contraction, 3 resource cap, 64 config error.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "honls/config.hpp"
#include "honls/nfr.hpp"
#include "honls/norms.hpp"
#include "honls/phase.hpp"
#include "honls/resonance.hpp"
#include "honls/rng.hpp"
#include "honls/spectral.hpp"
#include "honls/trees.hpp"

namespace {

namespace fs = std::filesystem;
using honls::config::RunConfig;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitIdentity = 1;
constexpr int kExitNoContraction = 2;
constexpr int kExitResourceCap = 3;
constexpr int kExitConfig = 64;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "run configuration file");
  cmd->add_option("--out", opts->out_dir, "output directory override");
  cmd->add_option("--seed", opts->seed, "seed override")
      ->each([opts](const std::string&) { opts->seed_set = true; });
}

RunConfig load_config(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty())
    cfg = honls::config::parse_config_file(opts.config_path);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  const fs::path p = fs::path(cfg.output_dir) / name;
  std::ofstream os(p);
  if (!os) throw honls::config::ConfigError{"cannot write " + p.string()};
  return os;
}

double rel_l2(const honls::spectral::CoefficientState& a,
              const honls::spectral::CoefficientState& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.coeffs.size(); ++i) {
    num += std::norm(a.coeffs[i] - b.coeffs[i]);
    den += std::norm(b.coeffs[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

int cmd_factor_check(const CommonOpts& opts, int k_max, long long samples) {
  const RunConfig cfg = load_config(opts);
  if (k_max < 1 || k_max > 8)
    throw honls::config::ConfigError{"factor-check: k_max must be in 1..8"};
  std::ofstream os = open_out(cfg, "factor_check.csv");
  os << "k,samples,failures\n";
  bool ok = true;
  std::uint64_t ctr = 0;
  for (int k = 1; k <= k_max; ++k) {
    long long failures = 0;
    for (long long i = 0; i < samples; ++i) {
      const long long x1 = honls::rng::uniform_int(cfg.seed, ctr++, -50, 50);
      const long long x2 = honls::rng::uniform_int(cfg.seed, ctr++, -50, 50);
      const long long x3 = honls::rng::uniform_int(cfg.seed, ctr++, -50, 50);
      if (honls::phase::factor_residual(static_cast<unsigned>(k), x1, x2,
                                        x3) != 0) {
        ++failures;
        std::cerr << "nonzero residual at k=" << k << " triple (" << x1
                  << "," << x2 << "," << x3 << ")\n";
      }
    }
    os << k << "," << samples << "," << failures << "\n";
    if (failures > 0) ok = false;
  }
  return ok ? kExitOk : kExitIdentity;
}

int cmd_solve(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const auto spec = cfg.equation_spec();
  const auto v0 = cfg.initial_state();
  const auto nfr_cfg = cfg.nfr_config();

  const auto ref = honls::spectral::reference_solve(v0, spec, cfg.T, cfg.dt);
  honls::nfr::GammaOperator gamma(nfr_cfg, spec);
  const auto red = gamma.solve(v0, cfg.T, cfg.panels);

  {
    std::ofstream os = open_out(cfg, "reference_trajectory.csv");
    honls::spectral::write_trajectory_csv(os, ref);
  }
  {
    std::ofstream os = open_out(cfg, "nfr_trajectory.csv");
    honls::spectral::write_trajectory_csv(os, red);
  }

  const double discrepancy = rel_l2(red.back(), ref.back());
  double mass_drift = 0.0, energy_drift = 0.0;
  const double m0 = honls::spectral::mass(ref.front());
  const double e0 = honls::spectral::energy(ref.front(), spec);
  const double e_scale = std::max(std::abs(e0), 1e-300);
  for (const auto& st : ref) {
    if (m0 > 0.0)
      mass_drift = std::max(
          mass_drift, std::abs(honls::spectral::mass(st) - m0) / m0);
    energy_drift =
        std::max(energy_drift,
                 std::abs(honls::spectral::energy(st, spec) - e0) / e_scale);
  }

  json summary;
  summary["T"] = cfg.T;
  summary["final_rel_l2_discrepancy"] = discrepancy;
  summary["mass_drift_rel"] = mass_drift;
  summary["energy_drift_rel"] = energy_drift;
  summary["reference_steps"] = ref.size() - 1;
  summary["nfr_panels"] = red.size() - 1;
  summary["nfr_iterations"] = gamma.last_iterations();
  summary["nfr_term_count"] = gamma.term_count();
  summary["contracted"] = true;
  std::ofstream os = open_out(cfg, "summary.json");
  os << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_census(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const auto rows =
      honls::resonance::census(cfg.census_n, cfg.census_grid, cfg.census_K);
  std::ofstream os = open_out(cfg, "census.csv");
  os << "N,count,fit_slope,clipped\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%d\n", r.N, r.count,
                  r.fit_slope, r.clipped ? 1 : 0);
    os << buf;
  }
  if (!rows.empty()) {
    std::cout << "fitted slope: " << rows.back().fit_slope << "\n";
    if (rows.size() >= 2 && rows.back().fit_slope > 0.6) return kExitIdentity;
  }
  return kExitOk;
}

int cmd_tree_enum(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const auto trees = honls::trees::enumerate_trees(cfg.tree_J);
  std::cout << trees.size() << "\n";
  std::ofstream os = open_out(cfg, "trees.txt");
  os << "J " << cfg.tree_J << " count " << trees.size() << "\n";
  for (const auto& t : trees) {
    os << "chronicle";
    for (int id : t.chronicle()) os << " " << id;
    os << "\n" << t.dump() << "\n";
  }
  return kExitOk;
}

int cmd_probe(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const auto rows = honls::nfr::bound_probe(
      cfg.probe_lemma, cfg.probe_samples, cfg.nfr_config(),
      cfg.equation_spec(), cfg.norm_spec(), cfg.seed);
  std::ofstream os = open_out(cfg, "probe.csv");
  honls::nfr::write_probe_csv(os, rows);
  return kExitOk;
}

int cmd_norms(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const auto norm = cfg.norm_spec();
  const auto v0 = cfg.initial_state();
  json out;
  out["q"] = cfg.q;
  out["s"] = cfg.s;
  out["initial_norm"] = honls::norms::lqs_norm(v0.coeffs, v0.K, norm);
  out["existence_region"] = honls::norms::existence_region(cfg.q, cfg.s);
  out["uniqueness_region"] = honls::norms::uniqueness_region(cfg.q, cfg.s);
  std::ofstream os = open_out(cfg, "norms.json");
  os << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normal form reduction toolkit for higher-order cubic NLS"};
  app.require_subcommand(1);

  CommonOpts fc_opts, solve_opts, census_opts, tree_opts, probe_opts,
      norms_opts;
  int k_max = 6;
  long long samples = 10000;

  CLI::App* fc = app.add_subcommand(
      "factor-check", "verify the phase factorization identity");
  fc->add_option("--kmax", k_max, "largest dispersion order");
  fc->add_option("--samples", samples, "random triples per order");
  add_common(fc, &fc_opts);

  CLI::App* solve = app.add_subcommand(
      "solve", "run the reduced and reference solvers and compare");
  add_common(solve, &solve_opts);

  CLI::App* census = app.add_subcommand(
      "census", "count near-resonant triples over a threshold grid");
  add_common(census, &census_opts);

  CLI::App* tree = app.add_subcommand(
      "tree-enum", "enumerate chronicle-ordered ternary trees");
  add_common(tree, &tree_opts);

  CLI::App* probe = app.add_subcommand(
      "probe", "empirical operator-norm bound probes");
  add_common(probe, &probe_opts);

  CLI::App* norms = app.add_subcommand(
      "norms", "weighted sequence norms and wellposedness regions");
  add_common(norms, &norms_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (fc->parsed()) return cmd_factor_check(fc_opts, k_max, samples);
    if (solve->parsed()) return cmd_solve(solve_opts);
    if (census->parsed()) return cmd_census(census_opts);
    if (tree->parsed()) return cmd_tree_enum(tree_opts);
    if (probe->parsed()) return cmd_probe(probe_opts);
    if (norms->parsed()) return cmd_norms(norms_opts);
  } catch (const honls::config::ConfigError& e) {
    std::cerr << "config error: " << e.message << "\n";
    return kExitConfig;
  } catch (const honls::nfr::ContractionError& e) {
    std::cerr << "no contraction: N=" << e.N << " T=" << e.T
              << " |v0|=" << e.v0_norm << " increment ratio " << e.ratio
              << " after " << e.iterations << " iterations\n";
    return kExitNoContraction;
  } catch (const honls::nfr::ResourceCapError& e) {
    std::cerr << "term budget exceeded: needed " << e.needed << " > budget "
              << e.budget << "\n";
    return kExitResourceCap;
  } catch (const honls::spectral::StepSizeError& e) {
    std::cerr << "step size too large for the fastest phase "
              << e.max_phase << "; need dt <= " << e.required_dt << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
