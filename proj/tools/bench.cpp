// Benchmark: parallel kernels against their serial reference
// implementations.  The build keeps both paths so the comparison stays
// honest on any core count.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "honls/nfr.hpp"
#include "honls/resonance.hpp"
#include "honls/rng.hpp"
#include "honls/spectral.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

honls::spectral::CoefficientState random_state(long long K,
                                               std::uint64_t seed) {
  honls::spectral::CoefficientState s(K);
  std::uint64_t ctr = 0;
  for (auto& c : s.coeffs) c = 0.1 * honls::rng::uniform_complex(seed, ctr++);
  return s;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled\n");
#endif

  const auto spec = honls::spectral::EquationSpec::pure(2);
  const long long K = 64;
  const auto state = random_state(K, 7);
  const honls::spectral::SymbolTable table(spec.weights, K);

  {
    auto t0 = Clock::now();
    auto a = honls::spectral::rhs_direct(state, spec, table);
    const double serial = seconds_since(t0);
    t0 = Clock::now();
    auto b = honls::spectral::rhs(state, spec, table);
    const double par = seconds_since(t0);
    double err = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
      err = std::max(err, std::abs(a[i] - b[i]));
    std::printf(
        "rhs K=%lld: direct %.4fs, convolution %.4fs, speedup %.2fx, max "
        "diff %.2e\n",
        K, serial, par, serial / par, err);
  }

  {
    auto t0 = Clock::now();
    const auto set = honls::resonance::enumerate_resonant(0, 100000, 700);
    std::printf("resonance box K=700 N=1e5: %zu members in %.4fs\n",
                set.members.size(), seconds_since(t0));
  }

  {
    honls::nfr::NfrConfig cfg;
    cfg.K = 16;
    cfg.N = 1000;
    cfg.J = 2;
    auto t0 = Clock::now();
    honls::nfr::GammaOperator gamma(cfg, spec);
    std::printf("gamma tables K=16 N=1e3 J=2: %lld terms in %.4fs\n",
                gamma.term_count(), seconds_since(t0));
    const auto small = random_state(16, 11);
    t0 = Clock::now();
    const auto traj = gamma.solve(small, 0.05);
    std::printf("gamma solve T=0.05: %zu panels, %d iterations, %.4fs\n",
                traj.size() - 1, gamma.last_iterations(),
                seconds_since(t0));
  }
  return 0;
}
