#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "honls/norms.hpp"
#include "honls/rng.hpp"

using namespace honls::norms;
using Complex = std::complex<double>;

TEST_CASE("weighted sequence norm") {
  std::vector<Complex> delta0 = {0, 0, Complex(0.5, -0.25), 0, 0};
  const double a = std::abs(Complex(0.5, -0.25));
  CHECK(lqs_norm(delta0, 2, NormSpec(1.0, 0.0)) == doctest::Approx(a));
  CHECK(lqs_norm(delta0, 2, NormSpec(4.0, 3.0)) == doctest::Approx(a));

  std::vector<Complex> delta1 = {0, 0, 0, Complex(0.7, 0.0), 0};
  CHECK(lqs_norm(delta1, 2, NormSpec(2.0, 1.0)) ==
        doctest::Approx(std::sqrt(2.0) * 0.7));

  // q = 2, s = 0 is the square root of the mass
  std::vector<Complex> v(9);
  std::uint64_t c = 0;
  double mass = 0.0;
  for (auto& z : v) {
    z = honls::rng::uniform_complex(3, c++);
    mass += std::norm(z);
  }
  CHECK(lqs_norm(v, 4, NormSpec(2.0, 0.0)) ==
        doctest::Approx(std::sqrt(mass)));

  // sup norm
  double peak = 0.0;
  for (const auto& z : v) peak = std::max(peak, std::abs(z));
  CHECK(lqs_norm(v, 4,
                 NormSpec(std::numeric_limits<double>::infinity(), 0.0)) ==
        doctest::Approx(peak));

  CHECK_THROWS_AS(NormSpec(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("norm monotonicity") {
  std::vector<Complex> v(17);
  std::uint64_t c = 0;
  for (auto& z : v) z = honls::rng::uniform_complex(9, c++);
  // non-decreasing in s
  CHECK(lqs_norm(v, 8, NormSpec(2.0, 0.0)) <=
        lqs_norm(v, 8, NormSpec(2.0, 0.5)));
  CHECK(lqs_norm(v, 8, NormSpec(2.0, 0.5)) <=
        lqs_norm(v, 8, NormSpec(2.0, 2.0)));
  // ell^q embedding: q1 <= q2 implies norm_{q1} >= norm_{q2}
  CHECK(lqs_norm(v, 8, NormSpec(1.0, 0.3)) >=
        lqs_norm(v, 8, NormSpec(2.0, 0.3)));
  CHECK(lqs_norm(v, 8, NormSpec(2.0, 0.3)) >=
        lqs_norm(v, 8, NormSpec(6.0, 0.3)));
}

TEST_CASE("wellposedness regions") {
  CHECK(existence_region(1.5, 0.0));
  CHECK_FALSE(existence_region(2.0, -0.1));
  CHECK_FALSE(existence_region(3.0, 0.0));

  CHECK(uniqueness_region(1.0, 0.0));
  // strict boundary at q = 2: s must exceed 1/6
  CHECK_FALSE(uniqueness_region(2.0, 1.0 / 6.0 - 1e-9));
  CHECK(uniqueness_region(2.0, 1.0 / 6.0 + 1e-9));
  CHECK_FALSE(uniqueness_region(2.5, 1.0));
  // uniqueness implies existence for q <= 2
  for (double q : {1.0, 1.2, 1.5, 1.7, 2.0})
    for (double s : {0.0, 0.2, 0.7, 1.5})
      if (uniqueness_region(q, s)) CHECK(existence_region(q, s));
}

TEST_CASE("dual exponent") {
  CHECK(NormSpec(2.0, 0.0).dual() == doctest::Approx(2.0));
  CHECK(NormSpec(4.0, 0.0).dual() == doctest::Approx(4.0 / 3.0));
  CHECK(NormSpec(std::numeric_limits<double>::infinity(), 0.0).dual() ==
        doctest::Approx(1.0));
}
