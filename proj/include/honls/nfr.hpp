#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "honls/norms.hpp"
#include "honls/spectral.hpp"

namespace honls::nfr {

using spectral::CoefficientState;
using spectral::Complex;
using spectral::EquationSpec;

// Parameters of the normal form reduction: resonance threshold N,
// partial-sum depth J (the reduction expands tree generations
// 1..J-1), mode cutoff K, and fixed-point iteration controls.
struct NfrConfig {
  long long N = 1000;
  int J = 2;
  long long K = 16;
  int quad_rule = 4;           // Gauss-Legendre nodes per panel
  double contraction_tol = 1e-10;
  int max_iter = 40;
  long long term_budget = 40000000;  // cap on materialized tree terms

  void validate() const;  // throws std::invalid_argument
};

struct ResourceCapError {
  long long needed;
  long long budget;
};

struct ContractionError {
  long long N;
  double T;
  double v0_norm;
  double ratio;
  int iterations;
};

// All operator evaluators below return the unit-free value,
// i.e. the contribution to dv/dt divided by the overall unit
// (+-i).  The unit is reinstated once inside the Gamma operator.
// `g` is the tree generation: g = 1 gives the first-split operators,
// g >= 2 the general tree sums (with the non-near-resonance
// constraints applied along the chronicle).  A term_budget of 0 means
// unlimited.

// 2 (sum_m |v_m|^2) v_n - |v_n|^2 v_n, the exact periodic resonant part.
std::vector<Complex> resonant_part(const CoefficientState& state,
                                   const EquationSpec& spec);

// Sum over A_N(n) of e^{it phi} v1 conj(v2) v3.
std::vector<Complex> n11(const CoefficientState& state,
                         const EquationSpec& spec, long long N, double t);

// The complement sum over A_N(n)^c (not integrated by parts).
std::vector<Complex> nonresonant_tail(const CoefficientState& state,
                                      const EquationSpec& spec, long long N,
                                      double t);

// Boundary term of generation g: tree sums with coefficient
// F_g/(i psi_g) and oscillation e^{it psi_g}, 2g+1 leaves.
std::vector<Complex> boundary_term(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget = 0);

// Generation-g tree sums with one terminal argument replaced by the
// resonant part of its frequency (2g+3 linear).
std::vector<Complex> resonant_inserted(const CoefficientState& state,
                                       const EquationSpec& spec, long long N,
                                       double t, int g,
                                       long long term_budget = 0);

// Generation-g tree sums with the newest inserted trilinear factor
// restricted to the near-resonance set C_g.
std::vector<Complex> near_resonant(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget = 0);

// The C_g^c part of the same inserted sum; near_resonant +
// far_remainder == full_inserted is an exact partition.
std::vector<Complex> far_remainder(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget = 0);

std::vector<Complex> full_inserted(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget = 0);

// The partial-sum operator Gamma^(J).  Builds the term tables for all
// generations once; apply() and solve() evaluate against them.
class GammaOperator {
 public:
  GammaOperator(const NfrConfig& cfg, const EquationSpec& spec);
  ~GammaOperator();
  GammaOperator(GammaOperator&&) noexcept;
  GammaOperator& operator=(GammaOperator&&) noexcept;

  // Gamma^(J)_{v0} applied to a trajectory given on a uniform grid
  // over [0, t]; the trajectory is interpolated linearly between grid
  // nodes under Gauss-Legendre panel quadrature.
  CoefficientState apply(const CoefficientState& v0,
                         const std::vector<CoefficientState>& traj,
                         double t) const;

  // Picard iteration v <- Gamma v on a panel grid over [0, T];
  // panels = 0 picks ceil(T N) so each panel resolves the fastest
  // undivided oscillation.  Throws ContractionError when successive
  // increments stop shrinking.
  std::vector<CoefficientState> solve(const CoefficientState& v0, double T,
                                      long long panels = 0) const;

  long long term_count() const;

  // Picard iterations used by the most recent solve() call.
  int last_iterations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

CoefficientState gamma_apply(const CoefficientState& v0,
                             const std::vector<CoefficientState>& traj,
                             double t, const NfrConfig& cfg,
                             const EquationSpec& spec);

std::vector<CoefficientState> nfr_solve(const CoefficientState& v0,
                                        const NfrConfig& cfg,
                                        const EquationSpec& spec, double T,
                                        long long panels = 0);

// Empirical checks of the operator norm bounds.  Supported ids: lem,
// lemle, fir1, fir2, fir3, finaal, finaal2, finafinafina.
struct ProbeRow {
  std::string lemma_id;
  long long N = 0;
  int J = 0;
  double q = 2.0;
  double s = 0.0;
  double lhs = 0.0;
  double rhs_model = 0.0;
  double fitted_constant = 0.0;
};

std::vector<ProbeRow> bound_probe(const std::string& lemma_id,
                                  int sample_count, const NfrConfig& cfg,
                                  const EquationSpec& spec,
                                  const norms::NormSpec& norm,
                                  std::uint64_t seed);

// CSV: lemma_id,N,J,q,s,lhs,rhs_model,fitted_constant.
void write_probe_csv(std::ostream& os, const std::vector<ProbeRow>& rows);

}  // namespace honls::nfr
