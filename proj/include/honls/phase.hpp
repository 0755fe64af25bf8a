#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

namespace honls::phase {

using Int = mpz_class;
using Rat = mpq_class;

// Integer frequency 4-tuple (xi, xi1, xi2, xi3) with the zero-sum
// convention xi = xi1 - xi2 + xi3 enforced at construction.
struct FrequencyQuad {
  long long xi, xi1, xi2, xi3;

  FrequencyQuad(long long xi_, long long xi1_, long long xi2_, long long xi3_)
      : xi(xi_), xi1(xi1_), xi2(xi2_), xi3(xi3_) {
    if (xi != xi1 - xi2 + xi3)
      throw std::invalid_argument("FrequencyQuad: zero-sum violated");
  }

  // Convenience: the quad determined by (xi1, xi2, xi3).
  static FrequencyQuad from_triple(long long xi1, long long xi2,
                                   long long xi3) {
    return FrequencyQuad(xi1 - xi2 + xi3, xi1, xi2, xi3);
  }

  bool degenerate() const { return xi == xi1 || xi == xi3; }
};

// Non-negative rational dispersion weights eps_1..eps_M; at least one
// must be positive.
struct MixedOrderWeights {
  std::vector<Rat> eps;

  explicit MixedOrderWeights(std::vector<Rat> e) : eps(std::move(e)) {
    bool positive = false;
    for (const Rat& w : eps) {
      if (w < 0) throw std::invalid_argument("negative dispersion weight");
      if (w > 0) positive = true;
    }
    if (!positive)
      throw std::invalid_argument("all-zero dispersion weights");
  }

  // Pure order k: eps_k = 1, everything else 0.
  static MixedOrderWeights pure(unsigned k) {
    std::vector<Rat> e(k, Rat(0));
    e[k - 1] = 1;
    return MixedOrderWeights(std::move(e));
  }

  unsigned order_count() const { return static_cast<unsigned>(eps.size()); }
};

// xi^{2k} - xi1^{2k} + xi2^{2k} - xi3^{2k}, exact.
Int phi(unsigned k, const FrequencyQuad& q);

// The factorization polynomial P_k(xi1, xi2, xi3), evaluated exactly via
// the triple-sum formula.  P_1 = 2.
Int pk(unsigned k, long long xi1, long long xi2, long long xi3);

// phi(k, quad(xi1,xi2,xi3)) - (xi1 - xi2)(xi3 - xi2) * pk(k, ...).
// Identically zero; kept as a checkable residual.
Int factor_residual(unsigned k, long long xi1, long long xi2, long long xi3);

// sum_j eps_j * phi(j, q), exact rational.
Rat mixed_phi(const MixedOrderWeights& w, const FrequencyQuad& q);

// |phi(k,q)| / (max|component|^{2k-2} * |xi-xi1| * |xi-xi3|).
// Rejects degenerate quads.  Exactly 2 for k = 1.
double phase_comparability(unsigned k, const FrequencyQuad& q);

}  // namespace honls::phase
