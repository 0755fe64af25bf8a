#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "honls/nfr.hpp"
#include "honls/norms.hpp"
#include "honls/spectral.hpp"

namespace honls::config {

// Raised on any parse or validation problem; the CLI maps it to
// exit code 64.
struct ConfigError {
  std::string message;
};

struct ModeAmplitude {
  long long n = 0;
  double re = 0.0;
  double im = 0.0;
};

// Flat key-value run configuration ("honls-config v1" header line,
// `section.key = value` entries, '#' comments).  Unknown keys are
// rejected.  See README for the full schema.
struct RunConfig {
  // equation.*
  int order = 2;                        // pure dispersion order k
  std::vector<phase::Rat> weights;      // overrides order when non-empty
  int sign = 1;

  // solver.*
  long long N = 1000;
  int J = 2;
  long long K = 16;
  double T = 1.0;
  double dt = 1e-3;
  long long panels = 0;  // 0 = automatic
  int quad_rule = 4;
  double tol = 1e-10;
  int max_iter = 40;
  long long term_budget = 40000000;

  // norms.*
  double q = 2.0;
  double s = 0.0;

  // census.*
  long long census_n = 0;
  std::vector<long long> census_grid = {1000, 10000, 100000, 1000000};
  long long census_K = 0;  // 0 = unclipped box

  // tree.*
  int tree_J = 4;

  // probe.*
  std::string probe_lemma = "lem";
  int probe_samples = 8;

  // init.*  (modes as n:re:im triples)
  std::vector<ModeAmplitude> init_modes;

  std::uint64_t seed = 1;
  std::string output_dir = ".";

  spectral::EquationSpec equation_spec() const;
  nfr::NfrConfig nfr_config() const;
  norms::NormSpec norm_spec() const;
  spectral::CoefficientState initial_state() const;
};

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

// Canonical form: fixed key order, canonical number formatting.
// serialize(parse(x)) is idempotent.
std::string serialize_config(const RunConfig& cfg);

}  // namespace honls::config
