#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "honls/resonance.hpp"

using namespace honls::resonance;

namespace {

__int128 p4(long long x) { return static_cast<__int128>(x) * x * x * x; }

__int128 phi4(long long n, long long n1, long long n2, long long n3) {
  return p4(n) - p4(n1) + p4(n2) - p4(n3);
}

std::set<Triple> brute_force(long long n, long long N, long long K,
                             bool resonant) {
  std::set<Triple> out;
  for (long long n1 = -K; n1 <= K; ++n1)
    for (long long n2 = -K; n2 <= K; ++n2)
      for (long long n3 = -K; n3 <= K; ++n3) {
        if (n1 - n2 + n3 != n || n1 == n || n3 == n) continue;
        __int128 p = phi4(n, n1, n2, n3);
        if (p < 0) p = -p;
        if ((p <= static_cast<__int128>(N)) == resonant)
          out.insert({n1, n2, n3});
      }
  return out;
}

}  // namespace

TEST_CASE("resonant enumeration basics") {
  CHECK(enumerate_resonant(0, 0, 2).members.empty());
  CHECK(enumerate_resonant(3, 100, 0).members.empty());
  // threshold saturation: N huge picks up every admissible triple
  const auto all = enumerate_resonant(0, 1000000, 2);
  CHECK(all.members.size() == brute_force(0, 1000000, 2, true).size());
  CHECK_THROWS_AS(enumerate_resonant(0, -1, 2), std::invalid_argument);
}

TEST_CASE("enumeration equals the brute-force oracle") {
  for (long long n = -4; n <= 4; ++n)
    for (long long N : {0LL, 10LL, 1000LL})
      for (long long K : {4LL, 8LL, 16LL}) {
        const auto set = enumerate_resonant(n, N, K);
        const std::set<Triple> got(set.members.begin(), set.members.end());
        REQUIRE(got == brute_force(n, N, K, true));
        REQUIRE(got.size() == set.members.size());  // no duplicates
        const auto comp = enumerate_nonresonant(n, N, K);
        const std::set<Triple> gotc(comp.members.begin(), comp.members.end());
        REQUIRE(gotc == brute_force(n, N, K, false));
        // members arrive sorted
        CHECK(std::is_sorted(set.members.begin(), set.members.end()));
      }
}

TEST_CASE("swap symmetry of the membership predicate") {
  const auto set = enumerate_resonant(1, 500, 8);
  const std::set<Triple> got(set.members.begin(), set.members.end());
  for (const Triple& t : got) CHECK(got.count({t[2], t[1], t[0]}) == 1);
}

TEST_CASE("census monotonicity and slope") {
  const std::vector<long long> grid = {1000, 10000, 100000};
  const auto rows = census(0, grid);
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    CHECK(rows[i].count <= rows[i + 1].count);
  for (const auto& r : rows) CHECK_FALSE(r.clipped);
  CHECK(rows.back().fit_slope > 0.0);
  CHECK(rows.back().fit_slope <= 0.6);

  // clipping flag fires when K is too small for the level set
  const auto clipped = census(0, {1000}, 4);
  CHECK(clipped[0].clipped);
}

TEST_CASE("census counts dominated by the quadratic level set") {
  // A_N(0) sits inside {|Phi_2| <= sqrt(N)} on the same box
  const long long N = 10000, K = unclipped_box(0, N);
  const auto set = enumerate_resonant(0, N, K);
  long long quad_count = 0;
  const long long root = 100;  // sqrt(N)
  for (long long n1 = -K; n1 <= K; ++n1)
    for (long long n3 = -K; n3 <= K; ++n3) {
      const long long n2 = n1 + n3;
      if (n2 < -K || n2 > K || n1 == 0 || n3 == 0) continue;
      // Phi_2 = 2(n - n1)(n - n3) at n = 0
      if (std::abs(2 * n1 * n3) <= root) ++quad_count;
    }
  CHECK(static_cast<long long>(set.members.size()) <= quad_count);
}

TEST_CASE("divisor counting") {
  CHECK(divisor_count(1) == 1);
  CHECK(divisor_count(12) == 6);
  CHECK(divisor_count(997) == 2);
  CHECK_THROWS_AS(divisor_count(0), std::invalid_argument);
  // frozen growth constant: max d(m)/m^0.2 over m <= 1e6 is below 17
  double worst = 0.0;
  for (long long m = 1; m <= 1000000; m += 1)
    worst = std::max(worst,
                     static_cast<double>(divisor_count(m)) /
                         std::pow(static_cast<double>(m), 0.2));
  CHECK(worst < 17.0);
}

TEST_CASE("near-resonance membership") {
  using honls::phase::Int;
  const auto m = [](int J, long x, long y, long z) {
    return cj_member(J, Int(x), Int(y), Int(z));
  };
  // zero next phase is always a member
  CHECK(m(1, 0, 12345, 999));
  CHECK(cj_member_fast(1, 0, 12345, 999));
  // J=1 example: tilde2 = 1 vs 125 * (1e6)^0.99
  CHECK(m(1, 1, 1000000, 1000000));
  // borderline exactness: 125 * 1^0.99 = 125
  CHECK(m(1, 125, 1, 1));
  CHECK_FALSE(m(1, 126, 1, 1));
  CHECK(cj_member_fast(1, 125, 1, 1));
  CHECK_FALSE(cj_member_fast(1, 126, 1, 1));
  // either base may admit
  CHECK(m(2, 343, 1, 1000000));
  CHECK_FALSE(m(2, 400, 1, 1));

  // fast path agrees with the exact decision across magnitudes
  for (int J = 1; J <= 3; ++J)
    for (long next : {0L, 1L, 117L, 125L, 126L, 5000L, 1000000L})
      for (long tj : {1L, 2L, 999L, 100000L})
        for (long p1 : {1L, 30L, 4000L}) {
          const bool exact = m(J, next, tj, p1);
          const bool fast = cj_member_fast(J, next, tj, p1);
          REQUIRE(exact == fast);
        }
}
