#include "honls/norms.hpp"

#include <algorithm>
#include <cmath>

namespace honls::norms {

double lqs_norm(std::span<const std::complex<double>> coeffs, long long K,
                const NormSpec& spec) {
  double acc = 0.0;
  for (long long n = -K; n <= K; ++n) {
    const double a = std::abs(coeffs[static_cast<size_t>(n + K)]);
    if (a == 0.0) continue;
    const double bracket = std::sqrt(1.0 + static_cast<double>(n) *
                                               static_cast<double>(n));
    const double w = std::pow(bracket, spec.s) * a;
    if (spec.is_sup())
      acc = std::max(acc, w);
    else
      acc += std::pow(w, spec.q);
  }
  return spec.is_sup() ? acc : std::pow(acc, 1.0 / spec.q);
}

bool existence_region(double q, double s) {
  return q >= 1.0 && q <= 2.0 && s >= 0.0;
}

bool uniqueness_region(double q, double s) {
  if (q >= 1.0 && q <= 1.5 && s >= 0.0) return true;
  if (q > 1.5 && q <= 2.0 && s > 2.0 / 3.0 - 1.0 / q) return true;
  return false;
}

}  // namespace honls::norms
