#pragma once

#include <array>
#include <vector>

#include "honls/phase.hpp"

namespace honls::resonance {

using phase::Int;

using Triple = std::array<long long, 3>;

// A_N(n) restricted to the box |n_i| <= K: triples with
// n1 - n2 + n3 = n, n1 != n != n3, |Phi_4(n, n1, n2, n3)| <= N.
struct ResonanceSet {
  long long n = 0;
  long long N = 0;
  long long K = 0;
  std::vector<Triple> members;  // sorted lexicographically
};

ResonanceSet enumerate_resonant(long long n, long long N, long long K);

// The complement within the admissible box: same constraints but
// |Phi_4| > N.
ResonanceSet enumerate_nonresonant(long long n, long long N, long long K);

struct CensusRow {
  long long N = 0;
  long long count = 0;
  double fit_slope = 0.0;  // OLS slope of log(count) vs log(N) up to this row
  bool clipped = false;    // K too small for the level set
};

// Counts #A_N(n) per threshold with an OLS log-log slope.  K = 0 picks
// an unclipped box per threshold (see unclipped_box), so the automatic
// box never cuts the level set.
std::vector<CensusRow> census(long long n, const std::vector<long long>& N_grid,
                              long long K = 0);

long long unclipped_box(long long n, long long N);

// Exact divisor count d(m) by trial division.
long long divisor_count(long long m);

// Membership in the near-resonance set C_J:
// |tilde_phi_{J+1}| <= (2J+3)^3 |tilde_phi_J|^{1-1/100}, or the same
// with |phi_1| on the right.  Decided in exact integer arithmetic by
// comparing 100th powers.
bool cj_member(int J, const Int& tilde_phi_next, const Int& tilde_phi_J,
               const Int& phi_1);

// Fast version for inner loops: decides through logarithms and falls
// back to the exact comparison near the boundary.
bool cj_member_fast(int J, __int128 tilde_phi_next, __int128 tilde_phi_J,
                    __int128 phi_1);

}  // namespace honls::resonance
