#pragma once

#include <complex>
#include <limits>
#include <span>
#include <stdexcept>

namespace honls::norms {

// Weighted sequence norm parameters: exponent q in [1, inf], weight
// power s >= 0.  q = infinity is the sup norm.
struct NormSpec {
  double q = 2.0;
  double s = 0.0;

  NormSpec() = default;
  NormSpec(double q_, double s_) : q(q_), s(s_) {
    if (q < 1.0) throw std::invalid_argument("NormSpec: q must be >= 1");
  }

  bool is_sup() const { return std::isinf(q); }
  double dual() const { return is_sup() ? 1.0 : q / (q - 1.0); }
};

// (sum_n <n>^{sq} |v_n|^q)^{1/q} with <n> = (1 + n^2)^{1/2}; the
// coefficients span is indexed n = -K..K.
double lqs_norm(std::span<const std::complex<double>> coeffs, long long K,
                const NormSpec& spec);

// Wellposedness-region predicates.
bool existence_region(double q, double s);   // q in [1,2], s >= 0
bool uniqueness_region(double q, double s);  // s>=0, q<=3/2  or  q<=2, s>2/3-1/q

}  // namespace honls::norms
