#include "honls/phase.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

namespace honls::phase {

namespace {

Int ipow(long long base, unsigned e) {
  Int r;
  const Int b(static_cast<long>(base));
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

// Pascal-recurrence binomial rows, cached.
const std::vector<Int>& binomial_row(unsigned m) {
  static std::map<unsigned, std::vector<Int>> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<Int> row(m + 1);
  row[0] = 1;
  if (m > 0) {
    const std::vector<Int>& prev = binomial_row(m - 1);
    for (unsigned p = 1; p < m; ++p) row[p] = prev[p - 1] + prev[p];
    row[m] = 1;
  }
  return cache.emplace(m, std::move(row)).first->second;
}

}  // namespace

Int phi(unsigned k, const FrequencyQuad& q) {
  if (k == 0) throw std::invalid_argument("phi: k must be >= 1");
  return ipow(q.xi, 2 * k) - ipow(q.xi1, 2 * k) + ipow(q.xi2, 2 * k) -
         ipow(q.xi3, 2 * k);
}

Int pk(unsigned k, long long xi1, long long xi2, long long xi3) {
  if (k == 0) throw std::invalid_argument("pk: k must be >= 1");
  const Int a(static_cast<long>(xi1)), b(static_cast<long>(xi2)),
      c(static_cast<long>(xi3));
  Int total = 0;

  // sum_{m=1}^{2k-2} xi3^m sum_{q=0}^{2k-2-m} xi1^q xi2^{2k-2-m-q}
  for (unsigned m = 1; m + 2 <= 2 * k; ++m) {
    Int inner = 0;
    for (unsigned q = 0; q <= 2 * k - 2 - m; ++q)
      inner += ipow(xi1, q) * ipow(xi2, 2 * k - 2 - m - q);
    total += ipow(xi3, m) * inner;
  }

  // sum_{q=0}^{2k-2} xi1^q xi2^{2k-2-q}
  for (unsigned q = 0; q <= 2 * k - 2; ++q)
    total += ipow(xi1, q) * ipow(xi2, 2 * k - 2 - q);

  // sum_{m=1}^{2k-1} xi1^{2k-1-m} sum_{p=0}^{m-1} C(m,p) (xi1-xi2)^{m-p-1} xi3^p
  const Int d = a - b;
  for (unsigned m = 1; m <= 2 * k - 1; ++m) {
    const std::vector<Int>& binom = binomial_row(m);
    Int inner = 0;
    for (unsigned p = 0; p < m; ++p) {
      Int dp;
      mpz_pow_ui(dp.get_mpz_t(), d.get_mpz_t(), m - p - 1);
      inner += binom[p] * dp * ipow(xi3, p);
    }
    total += ipow(xi1, 2 * k - 1 - m) * inner;
  }
  return total;
}

Int factor_residual(unsigned k, long long xi1, long long xi2, long long xi3) {
  const FrequencyQuad q = FrequencyQuad::from_triple(xi1, xi2, xi3);
  const Int lead = Int(static_cast<long>(xi1 - xi2)) *
                   Int(static_cast<long>(xi3 - xi2));
  return phi(k, q) - lead * pk(k, xi1, xi2, xi3);
}

Rat mixed_phi(const MixedOrderWeights& w, const FrequencyQuad& q) {
  Rat total = 0;
  for (unsigned j = 1; j <= w.order_count(); ++j) {
    if (w.eps[j - 1] == 0) continue;
    total += w.eps[j - 1] * Rat(phi(j, q));
  }
  return total;
}

double phase_comparability(unsigned k, const FrequencyQuad& q) {
  if (q.degenerate())
    throw std::invalid_argument("phase_comparability: degenerate quad");
  const double m = std::max({std::abs(static_cast<double>(q.xi)),
                             std::abs(static_cast<double>(q.xi1)),
                             std::abs(static_cast<double>(q.xi2)),
                             std::abs(static_cast<double>(q.xi3))});
  const double denom = std::pow(m, 2.0 * k - 2.0) *
                       std::abs(static_cast<double>(q.xi - q.xi1)) *
                       std::abs(static_cast<double>(q.xi - q.xi3));
  const Int p = phi(k, q);
  Int ap;
  mpz_abs(ap.get_mpz_t(), p.get_mpz_t());
  return ap.get_d() / denom;
}

}  // namespace honls::phase
