#include "honls/resonance.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace honls::resonance {

namespace {

using i128 = __int128;

i128 pow4(long long x) {
  const i128 v = x;
  return v * v * v * v;
}

i128 phi4(long long n, long long n1, long long n2, long long n3) {
  return pow4(n) - pow4(n1) + pow4(n2) - pow4(n3);
}

i128 abs128(i128 v) { return v < 0 ? -v : v; }

Int to_mpz(i128 v) {
  const bool neg = v < 0;
  if (neg) v = -v;
  const Int hi(static_cast<unsigned long>(
      static_cast<unsigned __int128>(v) >> 64));
  const Int lo(static_cast<unsigned long>(
      static_cast<unsigned __int128>(v) & ~0ULL));
  Int r = (hi << 64) + lo;
  return neg ? Int(-r) : r;
}

ResonanceSet enumerate_box(long long n, long long N, long long K,
                           bool resonant) {
  ResonanceSet out;
  out.n = n;
  out.N = N;
  out.K = K;
  if (K < 1) return out;
  // Member lists per n1 are concatenated in order, so the parallel and
  // serial paths produce identical sorted output.
  const int span = static_cast<int>(2 * K + 1);
  std::vector<std::vector<Triple>> per_n1(span);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < span; ++i) {
    const long long n1 = -K + i;
    if (n1 == n) continue;
    for (long long n3 = -K; n3 <= K; ++n3) {
      if (n3 == n) continue;
      const long long n2 = n1 + n3 - n;
      if (n2 < -K || n2 > K) continue;
      const bool inside = abs128(phi4(n, n1, n2, n3)) <= N;
      if (inside == resonant) per_n1[i].push_back({n1, n2, n3});
    }
  }
  for (const auto& chunk : per_n1)
    out.members.insert(out.members.end(), chunk.begin(), chunk.end());
  return out;
}

}  // namespace

ResonanceSet enumerate_resonant(long long n, long long N, long long K) {
  if (N < 0) throw std::invalid_argument("enumerate_resonant: N < 0");
  return enumerate_box(n, N, K, true);
}

ResonanceSet enumerate_nonresonant(long long n, long long N, long long K) {
  return enumerate_box(n, N, K, false);
}

long long unclipped_box(long long n, long long N) {
  // |Phi_4| = |n-n1||n-n3| P_2(n1,n2,n3) with P_2 >= n1^2, n3^2 and the
  // off-diagonal factors at least 1, so members have |n1|,|n3| <= sqrt(N)
  // and |n2| <= |n1| + |n3| + |n|.
  const long long root =
      static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(N))));
  return 2 * root + std::llabs(n) + 2;
}

std::vector<CensusRow> census(long long n, const std::vector<long long>& N_grid,
                              long long K) {
  std::vector<CensusRow> rows;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (long long N : N_grid) {
    CensusRow row;
    row.N = N;
    const long long box = unclipped_box(n, N);
    const long long use_K = (K == 0) ? box : K;
    row.clipped = use_K < box;
    row.count =
        static_cast<long long>(enumerate_resonant(n, N, use_K).members.size());
    if (row.count > 0) {
      const double x = std::log(static_cast<double>(N));
      const double y = std::log(static_cast<double>(row.count));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++m;
    }
    row.fit_slope = (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

long long divisor_count(long long m) {
  if (m < 1) throw std::invalid_argument("divisor_count: m must be >= 1");
  long long count = 0;
  for (long long d = 1; d * d <= m; ++d) {
    if (m % d != 0) continue;
    count += (d * d == m) ? 1 : 2;
  }
  return count;
}

bool cj_member(int J, const Int& tilde_phi_next, const Int& tilde_phi_J,
               const Int& phi_1) {
  // |tilde_next|^100 <= ((2J+3)^3)^100 * |base|^99, exact.
  Int lhs;
  mpz_abs(lhs.get_mpz_t(), tilde_phi_next.get_mpz_t());
  mpz_pow_ui(lhs.get_mpz_t(), lhs.get_mpz_t(), 100);
  const Int c(2 * J + 3);
  Int c300;
  mpz_pow_ui(c300.get_mpz_t(), c.get_mpz_t(), 300);
  for (const Int* base : {&tilde_phi_J, &phi_1}) {
    Int rhs;
    mpz_abs(rhs.get_mpz_t(), base->get_mpz_t());
    mpz_pow_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), 99);
    if (lhs <= c300 * rhs) return true;
  }
  return false;
}

bool cj_member_fast(int J, i128 tilde_phi_next, i128 tilde_phi_J,
                    i128 phi_1) {
  if (tilde_phi_next == 0) return true;
  // Integer prescreen: for |base| < 2^63 we have |base|^{0.99} within
  // [|base|/1.549, |base|], so clear accepts and clear rejects avoid
  // the logarithms entirely.
  {
    const i128 an = abs128(tilde_phi_next);
    const i128 c = static_cast<i128>(2 * J + 3) * (2 * J + 3) * (2 * J + 3);
    const i128 cap = static_cast<i128>(1) << 62;
    if (an < cap) {
      bool rejected_all = true;
      for (i128 base : {tilde_phi_J, phi_1}) {
        const i128 ab = abs128(base);
        if (ab == 0 || ab >= cap) {
          rejected_all = false;
          continue;
        }
        if (1549 * an <= 1000 * c * ab) return true;
        if (an <= c * ab) rejected_all = false;
      }
      if (rejected_all) return false;
    }
  }
  const double lhs_log =
      100.0 * std::log(static_cast<double>(abs128(tilde_phi_next)));
  const double c_log = 300.0 * std::log(static_cast<double>(2 * J + 3));
  bool uncertain = false;
  for (i128 base : {tilde_phi_J, phi_1}) {
    if (base == 0) continue;
    const double rhs_log =
        c_log + 99.0 * std::log(static_cast<double>(abs128(base)));
    if (lhs_log <= rhs_log - 1e-9) return true;
    if (lhs_log <= rhs_log + 1e-9) uncertain = true;
  }
  if (!uncertain) return false;
  return cj_member(J, to_mpz(tilde_phi_next), to_mpz(tilde_phi_J),
                   to_mpz(phi_1));
}

}  // namespace honls::resonance
