#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "honls/phase.hpp"

namespace honls::spectral {

using Complex = std::complex<double>;

// Truncated interaction-picture Fourier coefficients v_n, |n| <= K.
struct CoefficientState {
  long long K = 0;
  double t = 0.0;
  std::vector<Complex> coeffs;  // index n + K

  CoefficientState() = default;
  explicit CoefficientState(long long K_, double t_ = 0.0)
      : K(K_), t(t_), coeffs(2 * K_ + 1, Complex(0.0, 0.0)) {}

  Complex& at(long long n) { return coeffs[static_cast<size_t>(n + K)]; }
  const Complex& at(long long n) const {
    return coeffs[static_cast<size_t>(n + K)];
  }
  // Largest |n| carrying a nonzero coefficient (0 for the zero state).
  long long support_radius() const;
};

// Dispersion weights plus the sign of the cubic nonlinearity.
struct EquationSpec {
  phase::MixedOrderWeights weights;
  int sign = +1;  // the +- in  i u_t - dispersion +- |u|^2 u = 0

  EquationSpec(phase::MixedOrderWeights w, int s)
      : weights(std::move(w)), sign(s) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign must be +-1");
  }
  static EquationSpec pure(unsigned k, int s = +1) {
    return EquationSpec(phase::MixedOrderWeights::pure(k), s);
  }

  Complex unit() const { return Complex(0.0, static_cast<double>(sign)); }
};

// Integer dispersion symbol table: theta(n) = sum_j eps_j n^{2j} held as
// an exact numerator over a common denominator, so phase differences
// theta(n) - theta(n1) + theta(n2) - theta(n3) are computed without
// rounding and divided once at the end.
class SymbolTable {
 public:
  SymbolTable(const phase::MixedOrderWeights& w, long long K);

  long long K() const { return K_; }
  double theta(long long n) const {
    return static_cast<double>(num_[static_cast<size_t>(n + K_)]) * inv_den_;
  }
  __int128 theta_num(long long n) const {
    return num_[static_cast<size_t>(n + K_)];
  }
  double den() const { return 1.0 / inv_den_; }

  // Exact numerator of Phi for a zero-sum quad inside the table range.
  __int128 phi_num(long long n, long long n1, long long n2,
                   long long n3) const {
    return theta_num(n) - theta_num(n1) + theta_num(n2) - theta_num(n3);
  }
  double phi(long long n, long long n1, long long n2, long long n3) const {
    return static_cast<double>(phi_num(n, n1, n2, n3)) * inv_den_;
  }

  // max |phi| over zero-sum quads with all of n1,n2,n3 in [-B, B] and
  // |n| <= K (the modes such data can force in one application of the
  // nonlinearity).
  double max_phi_within(long long B) const;

 private:
  long long K_;
  double inv_den_;
  std::vector<__int128> num_;
};

// d/dt v_n = (+-i) sum_{n1-n2+n3=n, |n_i|<=K} e^{it phi} v_{n1}
// conj(v_{n2}) v_{n3}.  `rhs` uses the O(K^2) convolution kernel
// (OpenMP), `rhs_direct` the literal triple sum kept as a serial
// reference.
std::vector<Complex> rhs(const CoefficientState& state,
                         const EquationSpec& spec, const SymbolTable& table);
std::vector<Complex> rhs_direct(const CoefficientState& state,
                                const EquationSpec& spec,
                                const SymbolTable& table);

struct StepSizeError {
  double max_phase;
  double required_dt;
};

// Fixed-step RK4 on the interaction-picture system; trajectory sampled
// at every step.  Refuses steps that cannot resolve the fastest phase
// reachable from the initial support (dt * max_phi <= 0.5), reporting
// the required dt.
std::vector<CoefficientState> reference_solve(const CoefficientState& v0,
                                              const EquationSpec& spec,
                                              double T, double dt);

double mass(const CoefficientState& state);
double energy(const CoefficientState& state, const EquationSpec& spec);

// CSV trajectory: header "t,n,re,im", one row per (sample, mode).
void write_trajectory_csv(std::ostream& os,
                          const std::vector<CoefficientState>& traj);

// Little-endian binary snapshot: int64 K, int64 count = 2K+1, then
// count (re, im) float64 pairs for n = -K..K.
void write_snapshot(std::ostream& os, const CoefficientState& state);
CoefficientState read_snapshot(std::istream& is);

}  // namespace honls::spectral
