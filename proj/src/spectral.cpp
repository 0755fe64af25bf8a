#include "honls/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace honls::spectral {

namespace {

using i128 = __int128;

i128 from_mpz(const mpz_class& v) {
  mpz_class a;
  mpz_abs(a.get_mpz_t(), v.get_mpz_t());
  static const mpz_class limit = mpz_class(1) << 126;
  if (a >= limit)
    throw std::overflow_error("dispersion symbol exceeds 128-bit range");
  static const mpz_class mask = (mpz_class(1) << 64) - 1;
  const mpz_class hi = a >> 64;
  const mpz_class lo = a & mask;
  i128 r = (static_cast<i128>(hi.get_ui()) << 64) +
           static_cast<i128>(lo.get_ui());
  return v < 0 ? -r : r;
}

}  // namespace

long long CoefficientState::support_radius() const {
  long long r = 0;
  for (long long n = -K; n <= K; ++n)
    if (at(n) != Complex(0.0, 0.0)) r = std::max(r, std::llabs(n));
  return r;
}

SymbolTable::SymbolTable(const phase::MixedOrderWeights& w, long long K)
    : K_(K), num_(static_cast<size_t>(2 * K + 1)) {
  if (K < 0) throw std::invalid_argument("SymbolTable: K < 0");
  mpz_class den = 1;
  for (const auto& e : w.eps)
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), e.get_den().get_mpz_t());
  std::vector<mpz_class> scaled;  // eps_j * den, exact integers
  for (const auto& e : w.eps) scaled.push_back(mpz_class(e * den));
  for (long long n = -K; n <= K; ++n) {
    const long sq = static_cast<long>(n * n);
    mpz_class acc = 0;
    mpz_class p = sq;  // n^{2j}
    for (const auto& c : scaled) {
      acc += c * p;
      p *= sq;
    }
    num_[static_cast<size_t>(n + K)] = from_mpz(acc);
  }
  inv_den_ = 1.0 / den.get_d();
}

double SymbolTable::max_phi_within(long long B) const {
  const long long b = std::min(B, K_);
  i128 best = 0;
  for (long long n1 = -b; n1 <= b; ++n1)
    for (long long n2 = -b; n2 <= b; ++n2)
      for (long long n3 = -b; n3 <= b; ++n3) {
        const long long n = n1 - n2 + n3;
        if (n < -K_ || n > K_) continue;
        i128 p = phi_num(n, n1, n2, n3);
        if (p < 0) p = -p;
        if (p > best) best = p;
      }
  return static_cast<double>(best) * inv_den_;
}

std::vector<Complex> rhs(const CoefficientState& state,
                         const EquationSpec& spec, const SymbolTable& table) {
  const long long K = state.K;
  if (table.K() < K) throw std::invalid_argument("rhs: symbol table too small");
  const int span = static_cast<int>(2 * K + 1);
  // Gauge out the oscillations: w = e^{-it theta} v turns the phase
  // e^{it phi} into a product of per-mode factors, so the sum becomes a
  // plain cubic convolution.
  std::vector<Complex> w(span), gauge(span);
  for (long long n = -K; n <= K; ++n) {
    const Complex g = std::polar(1.0, state.t * table.theta(n));
    gauge[static_cast<size_t>(n + K)] = g;
    w[static_cast<size_t>(n + K)] = std::conj(g) * state.at(n);
  }
  const int pspan = static_cast<int>(4 * K + 1);
  std::vector<Complex> pair_sum(pspan, Complex(0.0, 0.0));
#pragma omp parallel for schedule(static)
  for (int pi = 0; pi < pspan; ++pi) {
    const long long p = pi - 2 * K;
    Complex acc(0.0, 0.0);
    const long long lo = std::max(-K, p - K);
    const long long hi = std::min(K, p + K);
    for (long long a = lo; a <= hi; ++a)
      acc += w[static_cast<size_t>(a + K)] * w[static_cast<size_t>(p - a + K)];
    pair_sum[pi] = acc;
  }
  std::vector<Complex> out(span);
  const Complex unit = spec.unit();
#pragma omp parallel for schedule(static)
  for (int ni = 0; ni < span; ++ni) {
    const long long n = ni - K;
    Complex acc(0.0, 0.0);
    for (long long n2 = -K; n2 <= K; ++n2)
      acc += pair_sum[static_cast<size_t>(n + n2 + 2 * K)] *
             std::conj(w[static_cast<size_t>(n2 + K)]);
    out[ni] = unit * gauge[ni] * acc;
  }
  return out;
}

std::vector<Complex> rhs_direct(const CoefficientState& state,
                                const EquationSpec& spec,
                                const SymbolTable& table) {
  const long long K = state.K;
  if (table.K() < K)
    throw std::invalid_argument("rhs_direct: symbol table too small");
  const int span = static_cast<int>(2 * K + 1);
  std::vector<Complex> out(span);
  const Complex unit = spec.unit();
  for (long long n = -K; n <= K; ++n) {
    Complex acc(0.0, 0.0);
    for (long long n1 = -K; n1 <= K; ++n1)
      for (long long n3 = -K; n3 <= K; ++n3) {
        const long long n2 = n1 + n3 - n;
        if (n2 < -K || n2 > K) continue;
        acc += std::polar(1.0, state.t * table.phi(n, n1, n2, n3)) *
               state.at(n1) * std::conj(state.at(n2)) * state.at(n3);
      }
    out[static_cast<size_t>(n + K)] = unit * acc;
  }
  return out;
}

std::vector<CoefficientState> reference_solve(const CoefficientState& v0,
                                              const EquationSpec& spec,
                                              double T, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("reference_solve: dt <= 0");
  if (T < 0.0) throw std::invalid_argument("reference_solve: T < 0");
  const SymbolTable table(spec.weights, v0.K);
  // The step check uses the fastest phase coupled to the initial
  // support; modes excited later enter with amplitudes too small to
  // dominate the error budget.
  const double max_phase = table.max_phi_within(v0.support_radius());
  if (dt * max_phase > 0.5)
    throw StepSizeError{max_phase, 0.5 / max_phase};

  const long long steps = static_cast<long long>(std::ceil(T / dt - 1e-9));
  std::vector<CoefficientState> traj;
  traj.reserve(static_cast<size_t>(steps) + 1);
  traj.push_back(v0);
  traj.back().t = 0.0;
  const size_t m = v0.coeffs.size();
  CoefficientState cur = traj.back();
  CoefficientState tmp(v0.K);
  for (long long s = 0; s < steps; ++s) {
    const double t0 = static_cast<double>(s) * dt;
    const double h = std::min(dt, T - t0);
    cur.t = t0;
    const auto k1 = rhs(cur, spec, table);
    tmp.t = t0 + h / 2;
    for (size_t i = 0; i < m; ++i)
      tmp.coeffs[i] = cur.coeffs[i] + (h / 2) * k1[i];
    const auto k2 = rhs(tmp, spec, table);
    for (size_t i = 0; i < m; ++i)
      tmp.coeffs[i] = cur.coeffs[i] + (h / 2) * k2[i];
    const auto k3 = rhs(tmp, spec, table);
    tmp.t = t0 + h;
    for (size_t i = 0; i < m; ++i)
      tmp.coeffs[i] = cur.coeffs[i] + h * k3[i];
    const auto k4 = rhs(tmp, spec, table);
    for (size_t i = 0; i < m; ++i)
      cur.coeffs[i] +=
          (h / 6) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    cur.t = t0 + h;
    traj.push_back(cur);
  }
  return traj;
}

double mass(const CoefficientState& state) {
  double acc = 0.0;
  for (const Complex& c : state.coeffs) acc += std::norm(c);
  return acc;
}

double energy(const CoefficientState& state, const EquationSpec& spec) {
  const long long K = state.K;
  const SymbolTable table(spec.weights, K);
  // Physical-space coefficients: u = e^{-it theta} v.
  std::vector<Complex> u(state.coeffs.size());
  double quad = 0.0;
  for (long long n = -K; n <= K; ++n) {
    u[static_cast<size_t>(n + K)] =
        std::polar(1.0, -state.t * table.theta(n)) * state.at(n);
    quad += table.theta(n) * std::norm(state.at(n));
  }
  // Quartic term sum_{n1-n2+n3-n4=0} u1 conj(u2) u3 conj(u4) regrouped
  // as sum_s |sum_{a+c=s} u_a u_c|^2.
  double quartic = 0.0;
  for (long long s = -2 * K; s <= 2 * K; ++s) {
    Complex acc(0.0, 0.0);
    const long long lo = std::max(-K, s - K);
    const long long hi = std::min(K, s + K);
    for (long long a = lo; a <= hi; ++a)
      acc += u[static_cast<size_t>(a + K)] * u[static_cast<size_t>(s - a + K)];
    quartic += std::norm(acc);
  }
  return 0.5 * quad - spec.sign * 0.25 * quartic;
}

void write_trajectory_csv(std::ostream& os,
                          const std::vector<CoefficientState>& traj) {
  os << "t,n,re,im\n";
  char buf[128];
  for (const auto& state : traj)
    for (long long n = -state.K; n <= state.K; ++n) {
      const Complex c = state.at(n);
      std::snprintf(buf, sizeof(buf), "%.17g,%lld,%.17g,%.17g\n", state.t, n,
                    c.real(), c.imag());
      os << buf;
    }
}

void write_snapshot(std::ostream& os, const CoefficientState& state) {
  const int64_t K = state.K;
  const int64_t count = 2 * K + 1;
  os.write(reinterpret_cast<const char*>(&K), sizeof(K));
  os.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const Complex& c : state.coeffs) {
    const double re = c.real(), im = c.imag();
    os.write(reinterpret_cast<const char*>(&re), sizeof(re));
    os.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
}

CoefficientState read_snapshot(std::istream& is) {
  int64_t K = 0, count = 0;
  is.read(reinterpret_cast<char*>(&K), sizeof(K));
  is.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!is || K < 0 || count != 2 * K + 1)
    throw std::runtime_error("snapshot: bad header");
  CoefficientState state(K);
  for (auto& c : state.coeffs) {
    double re = 0, im = 0;
    is.read(reinterpret_cast<char*>(&re), sizeof(re));
    is.read(reinterpret_cast<char*>(&im), sizeof(im));
    c = Complex(re, im);
  }
  if (!is) throw std::runtime_error("snapshot: truncated payload");
  return state;
}

}  // namespace honls::spectral
