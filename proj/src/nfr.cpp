#include "honls/nfr.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "honls/resonance.hpp"
#include "honls/rng.hpp"

namespace honls::nfr {

namespace {

using i128 = __int128;
using spectral::SymbolTable;

i128 abs128(i128 v) { return v < 0 ? -v : v; }

// The reduction divides by phase sums, so phases must be exact
// integers: the dispersion weights may not carry denominators here.
SymbolTable make_table(const EquationSpec& spec, long long K) {
  SymbolTable table(spec.weights, K);
  if (table.den() != 1.0)
    throw std::invalid_argument(
        "normal form operators need integer dispersion weights");
  return table;
}

struct Leaf {
  long long mode;
  bool conj;
};

Complex leaf_value(const CoefficientState& s, const Leaf& l) {
  const Complex c = s.at(l.mode);
  return l.conj ? std::conj(c) : c;
}

// 2 ||v||^2 v_n - |v_n|^2 v_n without the unit prefactor.
std::vector<Complex> resonant_vec(const CoefficientState& state) {
  double total = 0.0;
  for (const Complex& c : state.coeffs) total += std::norm(c);
  std::vector<Complex> out(state.coeffs.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = (2.0 * total - std::norm(state.coeffs[i])) * state.coeffs[i];
  return out;
}

// True when no single expansion of a generation-g node with signed
// phase psi can leave the near-resonance set C_g, i.e. when
// |psi| + max_phi stays below (2g+3)^3 max(|psi|, |psi1|)^{0.99}.
bool cannot_escape(int g, i128 psi, i128 psi1, i128 max_phi) {
  const i128 reach = abs128(psi) + max_phi;
  const i128 base = std::max(abs128(psi), abs128(psi1));
  const i128 c = static_cast<i128>(2 * g + 3) * (2 * g + 3) * (2 * g + 3);
  if ((base >> 62) != 0) return false;
  // |base|^{0.99} >= |base|/1.549 below 2^62; quick certain case.
  if (1549 * reach <= 1000 * c * base) return true;
  if (reach > c * base) return false;
  const double thr =
      static_cast<double>(c) * std::pow(static_cast<double>(base), 0.99);
  return static_cast<double>(reach) * (1.0 + 1e-9) < thr;
}

struct EnumOpts {
  int gmax = 1;
  bool want_inserted = false;
  bool want_near = false;
  bool want_far = false;
};

// Walks every chronicle-ordered tree with an admissible frequency
// assignment rooted at one output mode.  Coefficients carry all unit
// factors: F_1 = u and F_{g+1} = -F_g fsgn(alpha) u / (i psi_g), where
// psi_g are the fsgn-signed phase prefix sums.  Emits boundary terms
// (coefficient F_g/(i psi_g)), resonant insertions and the C_g /
// C_g^c split of each expansion.
template <class Sink>
class Enumerator {
 public:
  Enumerator(const SymbolTable& table, long long N, long long K,
             const EnumOpts& opts, Complex unit, Sink& sink)
      : tab_(table), N_(N), K_(K), opts_(opts), u_(unit), sink_(sink) {
    max_phi_ = static_cast<i128>(std::llround(table.max_phi_within(K)));
  }

  void run(long long root) {
    for (long long n1 = -K_; n1 <= K_; ++n1) {
      if (n1 == root) continue;
      for (long long n3 = -K_; n3 <= K_; ++n3) {
        if (n3 == root) continue;
        const long long n2 = n1 + n3 - root;
        if (n2 < -K_ || n2 > K_) continue;
        const i128 phi1 = tab_.phi_num(root, n1, n2, n3);
        if (abs128(phi1) <= N_) continue;
        psi1_ = phi1;
        leaves_.assign({{n1, false}, {n2, true}, {n3, false}});
        rec(1, phi1, u_);
      }
    }
  }

 private:
  void rec(int g, i128 psi, Complex F) {
    const double psi_d = static_cast<double>(psi);
    const Complex cb = F * Complex(0.0, -1.0 / psi_d);
    sink_.boundary(g, cb, psi_d, leaves_);
    const bool expand =
        g < opts_.gmax || opts_.want_near || opts_.want_far;
    const bool may_skip = !opts_.want_near && !opts_.want_far &&
                          cannot_escape(g, psi, psi1_, max_phi_);
    for (size_t a = 0; a < leaves_.size(); ++a) {
      const double fs = leaves_[a].conj ? -1.0 : 1.0;
      const Complex ci = -fs * cb * u_;
      if (opts_.want_inserted)
        sink_.inserted(g, ci, psi_d, a, leaves_);
      if (!expand || may_skip) continue;
      const Leaf alpha = leaves_[a];
      for (long long m1 = -K_; m1 <= K_; ++m1) {
        if (m1 == alpha.mode) continue;
        for (long long m3 = -K_; m3 <= K_; ++m3) {
          if (m3 == alpha.mode) continue;
          const long long m2 = m1 + m3 - alpha.mode;
          if (m2 < -K_ || m2 > K_) continue;
          const i128 phi = tab_.phi_num(alpha.mode, m1, m2, m3);
          const i128 psi_next = alpha.conj ? psi - phi : psi + phi;
          leaves_[a] = {m1, alpha.conj};
          leaves_.push_back({m2, !alpha.conj});
          leaves_.push_back({m3, alpha.conj});
          if (resonance::cj_member_fast(g, psi_next, psi, psi1_)) {
            if (opts_.want_near)
              sink_.near(g, ci, static_cast<double>(psi_next), leaves_);
          } else if (g < opts_.gmax) {
            rec(g + 1, psi_next, ci);
          } else if (opts_.want_far) {
            sink_.far(g, ci, static_cast<double>(psi_next), leaves_);
          }
          leaves_.resize(leaves_.size() - 2);
          leaves_[a] = alpha;
        }
      }
    }
  }

  const SymbolTable& tab_;
  long long N_, K_;
  EnumOpts opts_;
  Complex u_;
  Sink& sink_;
  i128 max_phi_ = 0;
  i128 psi1_ = 0;
  std::vector<Leaf> leaves_;
};

enum class OpKind { boundary, inserted, near_res, far, full };

// Accumulates one streamed operator value for a single output mode.
struct StreamSink {
  const CoefficientState* state = nullptr;
  const std::vector<Complex>* r0 = nullptr;
  double t = 0.0;
  int target_g = 1;
  OpKind kind = OpKind::boundary;
  Complex acc{0.0, 0.0};
  std::atomic<long long>* counter = nullptr;
  long long budget = 0;

  void tick() {
    if (counter == nullptr) return;
    const long long c = counter->fetch_add(1) + 1;
    if (budget > 0 && c > budget) throw ResourceCapError{c, budget};
  }

  Complex product(const std::vector<Leaf>& leaves) const {
    Complex p(1.0, 0.0);
    for (const Leaf& l : leaves) p *= leaf_value(*state, l);
    return p;
  }

  void add(Complex coeff, double psi, Complex factors) {
    acc += coeff * std::polar(1.0, t * psi) * factors;
  }

  void boundary(int g, Complex coeff, double psi,
                const std::vector<Leaf>& leaves) {
    if (kind != OpKind::boundary || g != target_g) return;
    tick();
    add(coeff, psi, product(leaves));
  }
  void inserted(int g, Complex coeff, double psi, size_t alpha,
                const std::vector<Leaf>& leaves) {
    if (kind != OpKind::inserted || g != target_g) return;
    tick();
    Complex p(1.0, 0.0);
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (i == alpha) {
        const Complex r =
            (*r0)[static_cast<size_t>(leaves[i].mode + state->K)];
        p *= leaves[i].conj ? std::conj(r) : r;
      } else {
        p *= leaf_value(*state, leaves[i]);
      }
    }
    add(coeff, psi, p);
  }
  void near(int g, Complex coeff, double psi,
            const std::vector<Leaf>& leaves) {
    if ((kind != OpKind::near_res && kind != OpKind::full) || g != target_g)
      return;
    tick();
    add(coeff, psi, product(leaves));
  }
  void far(int g, Complex coeff, double psi,
           const std::vector<Leaf>& leaves) {
    if ((kind != OpKind::far && kind != OpKind::full) || g != target_g)
      return;
    tick();
    add(coeff, psi, product(leaves));
  }
};

std::vector<Complex> tree_op(const CoefficientState& state,
                             const EquationSpec& spec, long long N, double t,
                             int g, long long term_budget, OpKind kind) {
  if (N < 1) throw std::invalid_argument("tree operator: N must be >= 1");
  if (g < 1 || g > 4)
    throw std::invalid_argument("tree operator: generation must be in 1..4");
  const long long K = state.K;
  const SymbolTable table = make_table(spec, K);
  const Complex u = spec.unit();
  EnumOpts opts;
  opts.gmax = g;
  opts.want_inserted = kind == OpKind::inserted;
  opts.want_near = kind == OpKind::near_res || kind == OpKind::full;
  opts.want_far = kind == OpKind::far || kind == OpKind::full;
  std::vector<Complex> r0;
  if (opts.want_inserted) r0 = resonant_vec(state);

  const int span = static_cast<int>(2 * K + 1);
  std::vector<Complex> out(span, Complex(0.0, 0.0));
  std::atomic<long long> counter{0};
  std::atomic<bool> capped{false};
  long long cap_seen = 0;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < span; ++i) {
    if (capped.load()) continue;
    StreamSink sink;
    sink.state = &state;
    sink.r0 = &r0;
    sink.t = t;
    sink.target_g = g;
    sink.kind = kind;
    sink.counter = &counter;
    sink.budget = term_budget;
    Enumerator<StreamSink> en(table, N, K, opts, u, sink);
    try {
      en.run(i - K);
      // Public operators are unit-free: the single overall unit
      // (+-i) is divided back out.
      out[i] = sink.acc * std::conj(u);
    } catch (const ResourceCapError& e) {
      capped.store(true);
      cap_seen = e.needed;
    }
  }
  if (capped.load()) throw ResourceCapError{cap_seen, term_budget};
  return out;
}

// Shared level-1 sum: resonant selects |phi| <= N, otherwise the
// complement; both restricted to n1 != n != n3 inside the box.
std::vector<Complex> level1_sum(const CoefficientState& state,
                                const EquationSpec& spec, long long N,
                                double t, bool resonant) {
  if (N < 0) throw std::invalid_argument("level-1 sum: N must be >= 0");
  const long long K = state.K;
  const SymbolTable table(spec.weights, K);
  const int span = static_cast<int>(2 * K + 1);
  std::vector<Complex> out(span, Complex(0.0, 0.0));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < span; ++i) {
    const long long n = i - K;
    Complex acc(0.0, 0.0);
    for (long long n1 = -K; n1 <= K; ++n1) {
      if (n1 == n) continue;
      for (long long n3 = -K; n3 <= K; ++n3) {
        if (n3 == n) continue;
        const long long n2 = n1 + n3 - n;
        if (n2 < -K || n2 > K) continue;
        const double phi = table.phi(n, n1, n2, n3);
        if ((std::abs(phi) <= static_cast<double>(N)) != resonant) continue;
        acc += std::polar(1.0, t * phi) * state.at(n1) *
               std::conj(state.at(n2)) * state.at(n3);
      }
    }
    out[i] = acc;
  }
  return out;
}

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& xs, std::vector<double>& ws) {
  xs.assign(n, 0.0);
  ws.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev initial guess on [-1, 1].
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    xs[i] = 0.5 * (1.0 - x);
    ws[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  std::sort(xs.begin(), xs.end());
}

}  // namespace

void NfrConfig::validate() const {
  if (N < 1) throw std::invalid_argument("NfrConfig: N must be >= 1");
  if (J < 1 || J > 3)
    throw std::invalid_argument("NfrConfig: J must be in 1..3");
  if (K < 1) throw std::invalid_argument("NfrConfig: K must be >= 1");
  if (quad_rule < 1 || quad_rule > 16)
    throw std::invalid_argument("NfrConfig: quad_rule must be in 1..16");
  if (!(contraction_tol > 0.0))
    throw std::invalid_argument("NfrConfig: contraction_tol must be > 0");
  if (max_iter < 1)
    throw std::invalid_argument("NfrConfig: max_iter must be >= 1");
  if (term_budget < 0)
    throw std::invalid_argument("NfrConfig: term_budget must be >= 0");
}

std::vector<Complex> resonant_part(const CoefficientState& state,
                                   const EquationSpec& spec) {
  (void)spec;
  return resonant_vec(state);
}

std::vector<Complex> n11(const CoefficientState& state,
                         const EquationSpec& spec, long long N, double t) {
  return level1_sum(state, spec, N, t, true);
}

std::vector<Complex> nonresonant_tail(const CoefficientState& state,
                                      const EquationSpec& spec, long long N,
                                      double t) {
  return level1_sum(state, spec, N, t, false);
}

std::vector<Complex> boundary_term(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget) {
  return tree_op(state, spec, N, t, g, term_budget, OpKind::boundary);
}

std::vector<Complex> resonant_inserted(const CoefficientState& state,
                                       const EquationSpec& spec, long long N,
                                       double t, int g,
                                       long long term_budget) {
  return tree_op(state, spec, N, t, g, term_budget, OpKind::inserted);
}

std::vector<Complex> near_resonant(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget) {
  return tree_op(state, spec, N, t, g, term_budget, OpKind::near_res);
}

std::vector<Complex> far_remainder(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget) {
  return tree_op(state, spec, N, t, g, term_budget, OpKind::far);
}

std::vector<Complex> full_inserted(const CoefficientState& state,
                                   const EquationSpec& spec, long long N,
                                   double t, int g, long long term_budget) {
  return tree_op(state, spec, N, t, g, term_budget, OpKind::full);
}

// ---------------------------------------------------------------------------
// GammaOperator
//
// The integrand of the partial-sum operator is
//   u R(v) + N11 + sum_{g=1}^{J-1} [inserted_g + near_g].
// Storing the near-resonant sums as explicit index tables is hopeless
// (C_g is almost the whole next generation at desk scale), but they
// factorize: the newest trilinear block summed over *all* admissible
// expansions of a leaf alpha equals the full cubic convolution
// T(alpha) (computable in O(K^2) by the gauge trick; the diagonal
// terms it adds are exactly the resonant insertion R(alpha), which the
// integrand needs anyway).  So
//   inserted_g + full_g = sum_{chains of gen g} e^{it psi_g}
//                         sum_alpha ci_alpha (prod_{beta != alpha} v) T(alpha)
// and near_g = full_g - far_g, where far_g (the C_g^c expansions) is
// exactly the stored chain table of generation g+1.  Only the chain
// tables are materialized; they stay small because escaping C_g
// requires |psi_{g+1}| > (2g+3)^3 |psi|^{0.99}.

namespace {

struct LeafRef {
  std::int32_t idx;  // mode + K
  std::uint8_t conj;
};

struct NTerm {
  double phase;
  std::uint64_t ofs;  // three leaves in the pool
};

// One non-near-resonant chain of generation g: true coefficient F_g
// (all units included), signed phase prefix sum, 2g+1 leaves.
struct PTerm {
  Complex F;
  double psi;
  std::uint64_t ofs;
  std::uint32_t nleaf;
  i128 psi_num;
  i128 psi1_num;
};

struct ModeTables {
  std::vector<NTerm> n11;
  std::vector<std::vector<PTerm>> chain;  // chain[g-1]: generation g
  std::vector<LeafRef> pool;
};

}  // namespace

struct GammaOperator::Impl {
  NfrConfig cfg;
  EquationSpec spec;
  SymbolTable table;
  Complex u;
  std::vector<ModeTables> modes;
  long long term_count_ = 0;
  mutable int last_iterations_ = 0;

  Impl(const NfrConfig& c, const EquationSpec& s)
      : cfg(c), spec(s), table(make_table(s, c.K)), u(s.unit()) {
    cfg.validate();
    const long long K = cfg.K;
    const long long N = cfg.N;
    const int gmax = cfg.J - 1;
    const i128 max_phi =
        static_cast<i128>(std::llround(table.max_phi_within(K)));
    const int span = static_cast<int>(2 * K + 1);
    modes.resize(span);
    std::atomic<long long> stored{0};
    std::atomic<bool> capped{false};
    long long cap_seen = 0;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < span; ++i) {
      if (capped.load()) continue;
      const long long n = i - K;
      ModeTables& mt = modes[static_cast<size_t>(i)];
      mt.chain.resize(static_cast<size_t>(gmax + 1));
      try {
        long long local = 0;
        auto charge = [&](long long add) {
          local += add;
          const long long total = stored.fetch_add(add) + add;
          if (cfg.term_budget > 0 && total > cfg.term_budget)
            throw ResourceCapError{total, cfg.term_budget};
        };
        // Level-1 split: resonant members feed N11, the rest seed the
        // generation-1 chains.
        for (long long n1 = -K; n1 <= K; ++n1) {
          if (n1 == n) continue;
          for (long long n3 = -K; n3 <= K; ++n3) {
            if (n3 == n) continue;
            const long long n2 = n1 + n3 - n;
            if (n2 < -K || n2 > K) continue;
            const i128 phi = table.phi_num(n, n1, n2, n3);
            const std::uint64_t ofs = mt.pool.size();
            mt.pool.push_back({static_cast<std::int32_t>(n1 + K), 0});
            mt.pool.push_back({static_cast<std::int32_t>(n2 + K), 1});
            mt.pool.push_back({static_cast<std::int32_t>(n3 + K), 0});
            if (abs128(phi) <= N) {
              mt.n11.push_back({static_cast<double>(phi), ofs});
            } else if (gmax >= 1) {
              mt.chain[0].push_back(
                  {u, static_cast<double>(phi), ofs, 3, phi, phi});
            } else {
              mt.pool.resize(ofs);
              continue;
            }
            charge(1);
          }
        }
        // Generation g+1 chains: C_g^c expansions of generation g.
        for (int g = 1; g <= gmax; ++g) {
          const std::vector<PTerm>& src = mt.chain[static_cast<size_t>(g - 1)];
          std::vector<PTerm>& dst = mt.chain[static_cast<size_t>(g)];
          for (const PTerm& p : src) {
            if (cannot_escape(g, p.psi_num, p.psi1_num, max_phi)) continue;
            const Complex cb = p.F * Complex(0.0, -1.0 / p.psi);
            for (std::uint32_t a = 0; a < p.nleaf; ++a) {
              const LeafRef alpha = mt.pool[p.ofs + a];
              const long long am = static_cast<long long>(alpha.idx) - K;
              const Complex Fn =
                  (alpha.conj ? 1.0 : -1.0) * cb * u;
              for (long long m1 = -K; m1 <= K; ++m1) {
                if (m1 == am) continue;
                for (long long m3 = -K; m3 <= K; ++m3) {
                  if (m3 == am) continue;
                  const long long m2 = m1 + m3 - am;
                  if (m2 < -K || m2 > K) continue;
                  const i128 phi = table.phi_num(am, m1, m2, m3);
                  const i128 psi_next =
                      alpha.conj ? p.psi_num - phi : p.psi_num + phi;
                  if (resonance::cj_member_fast(g, psi_next, p.psi_num,
                                                p.psi1_num))
                    continue;
                  const std::uint64_t ofs = mt.pool.size();
                  for (std::uint32_t b = 0; b < p.nleaf; ++b) {
                    if (b == a) {
                      mt.pool.push_back(
                          {static_cast<std::int32_t>(m1 + K), alpha.conj});
                    } else {
                      mt.pool.push_back(mt.pool[p.ofs + b]);
                    }
                  }
                  mt.pool.push_back({static_cast<std::int32_t>(m2 + K),
                                     static_cast<std::uint8_t>(!alpha.conj)});
                  mt.pool.push_back(
                      {static_cast<std::int32_t>(m3 + K), alpha.conj});
                  dst.push_back({Fn, static_cast<double>(psi_next), ofs,
                                 p.nleaf + 2, psi_next, p.psi1_num});
                  charge(1);
                }
              }
            }
          }
        }
      } catch (const ResourceCapError& e) {
        capped.store(true);
        cap_seen = e.needed;
      }
    }
    if (capped.load()) throw ResourceCapError{cap_seen, cfg.term_budget};
    term_count_ = stored.load();
  }

  Complex pool_product(const CoefficientState& s, std::uint64_t ofs,
                       std::uint32_t nleaf, const std::vector<LeafRef>& pool)
      const {
    Complex p(1.0, 0.0);
    for (std::uint64_t i = ofs; i < ofs + nleaf; ++i) {
      const Complex c = s.coeffs[static_cast<size_t>(pool[i].idx)];
      p *= pool[i].conj ? std::conj(c) : c;
    }
    return p;
  }

  // Sum of all boundary terms N0^(j), j = 2..J, at (state, t).  Units
  // included.
  std::vector<Complex> eval_boundary(const CoefficientState& state,
                                     double t) const {
    const int span = static_cast<int>(modes.size());
    const int gmax = cfg.J - 1;
    std::vector<Complex> out(span, Complex(0.0, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < span; ++i) {
      const ModeTables& mt = modes[static_cast<size_t>(i)];
      Complex acc(0.0, 0.0);
      for (int g = 1; g <= gmax; ++g)
        for (const PTerm& p : mt.chain[static_cast<size_t>(g - 1)]) {
          const Complex cb = p.F * Complex(0.0, -1.0 / p.psi);
          acc += cb * std::polar(1.0, t * p.psi) *
                 pool_product(state, p.ofs, p.nleaf, mt.pool);
        }
      out[i] = acc;
    }
    return out;
  }

  // The full cubic convolution sum_{m1-m2+m3=m} e^{it phi} v1 conj(v2)
  // v3 for every m, via the gauge trick (unit-free).
  std::vector<Complex> trilinear_full(const CoefficientState& state,
                                      double t) const {
    CoefficientState s = state;
    s.t = t;
    std::vector<Complex> out = spectral::rhs(s, spec, table);
    const Complex cu = std::conj(u);
    for (Complex& c : out) c *= cu;
    return out;
  }

  // u R(v) + N11 + sum_g [inserted_g + near_g], units included.
  std::vector<Complex> eval_integrand(const CoefficientState& state,
                                      double t) const {
    const std::vector<Complex> r0 = resonant_vec(state);
    const std::vector<Complex> tf = trilinear_full(state, t);
    const int span = static_cast<int>(modes.size());
    const int gmax = cfg.J - 1;
    std::vector<Complex> out(span);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < span; ++i) {
      const ModeTables& mt = modes[static_cast<size_t>(i)];
      Complex acc = u * r0[static_cast<size_t>(i)];
      for (const NTerm& term : mt.n11)
        acc += u * std::polar(1.0, t * term.phase) *
               pool_product(state, term.ofs, 3, mt.pool);
      std::array<Complex, 16> pre, suf, vals;
      for (int g = 1; g <= gmax; ++g)
        for (const PTerm& p : mt.chain[static_cast<size_t>(g - 1)]) {
          const Complex cb = p.F * Complex(0.0, -1.0 / p.psi);
          const std::uint32_t L = p.nleaf;
          for (std::uint32_t a = 0; a < L; ++a) {
            const LeafRef& l = mt.pool[p.ofs + a];
            const Complex c = state.coeffs[static_cast<size_t>(l.idx)];
            vals[a] = l.conj ? std::conj(c) : c;
          }
          pre[0] = Complex(1.0, 0.0);
          for (std::uint32_t a = 0; a < L; ++a) pre[a + 1] = pre[a] * vals[a];
          suf[L] = Complex(1.0, 0.0);
          for (std::uint32_t a = L; a > 0; --a)
            suf[a - 1] = suf[a] * vals[a - 1];
          Complex inner(0.0, 0.0);
          for (std::uint32_t a = 0; a < L; ++a) {
            const LeafRef& l = mt.pool[p.ofs + a];
            const Complex h = l.conj
                                  ? std::conj(tf[static_cast<size_t>(l.idx)])
                                  : tf[static_cast<size_t>(l.idx)];
            const Complex ci = (l.conj ? 1.0 : -1.0) * cb * u;
            inner += ci * pre[a] * suf[a + 1] * h;
          }
          acc += std::polar(1.0, t * p.psi) * inner;
        }
      // near_g = full_g - far_g: subtract the generation-(g+1) chains.
      for (int g = 2; g <= gmax + 1; ++g)
        for (const PTerm& p : mt.chain[static_cast<size_t>(g - 1)])
          acc -= p.F * std::polar(1.0, t * p.psi) *
                 pool_product(state, p.ofs, p.nleaf, mt.pool);
      out[i] = acc;
    }
    return out;
  }
};

GammaOperator::GammaOperator(const NfrConfig& cfg, const EquationSpec& spec)
    : impl_(std::make_unique<Impl>(cfg, spec)) {}
GammaOperator::~GammaOperator() = default;
GammaOperator::GammaOperator(GammaOperator&&) noexcept = default;
GammaOperator& GammaOperator::operator=(GammaOperator&&) noexcept = default;

long long GammaOperator::term_count() const { return impl_->term_count_; }
int GammaOperator::last_iterations() const { return impl_->last_iterations_; }

CoefficientState GammaOperator::apply(
    const CoefficientState& v0, const std::vector<CoefficientState>& traj,
    double t) const {
  const Impl& im = *impl_;
  if (v0.K != im.cfg.K) throw std::invalid_argument("gamma: K mismatch");
  if (traj.empty()) throw std::invalid_argument("gamma: empty trajectory");
  for (const auto& s : traj)
    if (s.K != im.cfg.K) throw std::invalid_argument("gamma: K mismatch");
  if (t < 0.0) throw std::invalid_argument("gamma: t must be >= 0");
  if (traj.size() < 2 && t > 0.0)
    throw std::invalid_argument("gamma: trajectory grid does not cover [0,t]");

  const size_t m = v0.coeffs.size();
  CoefficientState out = v0;
  out.t = t;

  const std::vector<Complex> b_end = im.eval_boundary(traj.back(), t);
  const std::vector<Complex> b_start = im.eval_boundary(v0, 0.0);
  for (size_t i = 0; i < m; ++i) out.coeffs[i] += b_end[i] - b_start[i];
  if (t == 0.0) return out;

  std::vector<double> xs, ws;
  gauss_legendre(im.cfg.quad_rule, xs, ws);
  const size_t panels = traj.size() - 1;
  const double h = t / static_cast<double>(panels);
  CoefficientState s(v0.K);
  for (size_t p = 0; p < panels; ++p) {
    for (int q = 0; q < im.cfg.quad_rule; ++q) {
      const double x = xs[static_cast<size_t>(q)];
      const double tau = (static_cast<double>(p) + x) * h;
      for (size_t i = 0; i < m; ++i)
        s.coeffs[i] =
            (1.0 - x) * traj[p].coeffs[i] + x * traj[p + 1].coeffs[i];
      s.t = tau;
      const std::vector<Complex> f = im.eval_integrand(s, tau);
      const double w = ws[static_cast<size_t>(q)] * h;
      for (size_t i = 0; i < m; ++i) out.coeffs[i] += w * f[i];
    }
  }
  return out;
}

std::vector<CoefficientState> GammaOperator::solve(const CoefficientState& v0,
                                                   double T,
                                                   long long panels) const {
  const Impl& im = *impl_;
  if (v0.K != im.cfg.K) throw std::invalid_argument("solve: K mismatch");
  if (T < 0.0) throw std::invalid_argument("solve: T must be >= 0");
  if (panels < 0) throw std::invalid_argument("solve: panels must be >= 0");
  if (panels == 0)
    panels = std::max<long long>(
        1, static_cast<long long>(
               std::ceil(T * static_cast<double>(im.cfg.N))));
  im.last_iterations_ = 0;
  if (T == 0.0) return {v0};

  const size_t P = static_cast<size_t>(panels);
  const double h = T / static_cast<double>(panels);
  const size_t m = v0.coeffs.size();
  const int Q = im.cfg.quad_rule;
  std::vector<double> xs, ws;
  gauss_legendre(Q, xs, ws);

  const std::vector<Complex> b_start = im.eval_boundary(v0, 0.0);
  const double v0_norm = std::sqrt(spectral::mass(v0));

  std::vector<CoefficientState> old_traj(P + 1, v0);
  for (size_t p = 0; p <= P; ++p) old_traj[p].t = static_cast<double>(p) * h;
  std::vector<CoefficientState> new_traj = old_traj;

  double prev_diff = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < im.cfg.max_iter; ++iter) {
    std::vector<Complex> acc(m, Complex(0.0, 0.0));
    CoefficientState s(v0.K);
    new_traj[0] = v0;
    new_traj[0].t = 0.0;
    for (size_t p = 0; p < P; ++p) {
      for (int q = 0; q < Q; ++q) {
        const double x = xs[static_cast<size_t>(q)];
        const double tau = (static_cast<double>(p) + x) * h;
        for (size_t i = 0; i < m; ++i)
          s.coeffs[i] = (1.0 - x) * old_traj[p].coeffs[i] +
                        x * old_traj[p + 1].coeffs[i];
        s.t = tau;
        const std::vector<Complex> f = im.eval_integrand(s, tau);
        const double w = ws[static_cast<size_t>(q)] * h;
        for (size_t i = 0; i < m; ++i) acc[i] += w * f[i];
      }
      const double t_edge = static_cast<double>(p + 1) * h;
      const std::vector<Complex> b =
          im.eval_boundary(old_traj[p + 1], t_edge);
      for (size_t i = 0; i < m; ++i)
        new_traj[p + 1].coeffs[i] =
            v0.coeffs[i] + b[i] - b_start[i] + acc[i];
      new_traj[p + 1].t = t_edge;
    }

    im.last_iterations_ = iter + 1;
    double diff = 0.0;
    for (size_t p = 0; p <= P; ++p) {
      double d2 = 0.0;
      for (size_t i = 0; i < m; ++i)
        d2 += std::norm(new_traj[p].coeffs[i] - old_traj[p].coeffs[i]);
      diff = std::max(diff, std::sqrt(d2));
    }
    if (diff <= im.cfg.contraction_tol) return new_traj;
    if (iter > 0 && diff >= prev_diff)
      throw ContractionError{im.cfg.N, T, v0_norm, diff / prev_diff,
                             iter + 1};
    prev_diff = diff;
    std::swap(old_traj, new_traj);
  }
  throw ContractionError{im.cfg.N, T, v0_norm, 1.0, im.cfg.max_iter};
}

CoefficientState gamma_apply(const CoefficientState& v0,
                             const std::vector<CoefficientState>& traj,
                             double t, const NfrConfig& cfg,
                             const EquationSpec& spec) {
  return GammaOperator(cfg, spec).apply(v0, traj, t);
}

std::vector<CoefficientState> nfr_solve(const CoefficientState& v0,
                                        const NfrConfig& cfg,
                                        const EquationSpec& spec, double T,
                                        long long panels) {
  return GammaOperator(cfg, spec).solve(v0, T, panels);
}

// ---------------------------------------------------------------------------
// Probes

namespace {

CoefficientState random_unit_state(long long K, const norms::NormSpec& norm,
                                   std::uint64_t seed, std::uint64_t& ctr) {
  CoefficientState s(K);
  for (long long n = -K; n <= K; ++n)
    s.at(n) = rng::uniform_complex(seed, ctr++);
  const double x = norms::lqs_norm(s.coeffs, K, norm);
  if (x > 0.0)
    for (auto& c : s.coeffs) c /= x;
  return s;
}

double out_norm(const std::vector<Complex>& v, long long K,
                const norms::NormSpec& norm) {
  return norms::lqs_norm(v, K, norm);
}

ProbeRow make_row(const std::string& id, long long N, int J,
                  const norms::NormSpec& norm, double lhs, double rhs) {
  ProbeRow r;
  r.lemma_id = id;
  r.N = N;
  r.J = J;
  r.q = norm.q;
  r.s = norm.s;
  r.lhs = lhs;
  r.rhs_model = rhs;
  r.fitted_constant = rhs > 0.0 ? lhs / rhs : 0.0;
  return r;
}

}  // namespace

std::vector<ProbeRow> bound_probe(const std::string& lemma_id,
                                  int sample_count, const NfrConfig& cfg,
                                  const EquationSpec& spec,
                                  const norms::NormSpec& norm,
                                  std::uint64_t seed) {
  cfg.validate();
  if (sample_count < 1)
    throw std::invalid_argument("bound_probe: sample_count must be >= 1");
  const long long K = cfg.K;
  const double qp = norm.dual();
  std::vector<ProbeRow> rows;
  std::uint64_t ctr = 0;
  const std::vector<long long> n_grid = {
      std::max<long long>(1, cfg.N / 10), cfg.N, cfg.N * 10};

  for (int sample = 0; sample < sample_count; ++sample) {
    CoefficientState v;
    if (lemma_id == "lem" && sample == 0) {
      // deterministic single-mode case: the resonant value is exactly
      // |a|^3 and the ratio is 1
      v = CoefficientState(K);
      v.at(0) = Complex(1.0, 0.0);
    } else {
      v = random_unit_state(K, norm, seed, ctr);
    }
    const double vn = norms::lqs_norm(v.coeffs, K, norm);

    if (lemma_id == "lem") {
      const double lhs = out_norm(resonant_part(v, spec), K, norm);
      rows.push_back(make_row(lemma_id, cfg.N, 0, norm, lhs, vn * vn * vn));
    } else if (lemma_id == "lemle") {
      for (long long N : n_grid) {
        const double lhs = out_norm(n11(v, spec, N, 0.0), K, norm);
        const double rhs =
            std::pow(static_cast<double>(N), 1.0 / (2.0 * qp)) * vn * vn * vn;
        rows.push_back(make_row(lemma_id, N, 0, norm, lhs, rhs));
      }
    } else if (lemma_id == "fir1") {
      for (long long N : n_grid) {
        const double lhs =
            out_norm(boundary_term(v, spec, N, 0.0, 1), K, norm);
        const double rhs =
            std::pow(static_cast<double>(N), 1.0 / qp - 1.0) * vn * vn * vn;
        rows.push_back(make_row(lemma_id, N, 1, norm, lhs, rhs));
      }
    } else if (lemma_id == "fir2") {
      for (long long N : n_grid) {
        const double lhs =
            out_norm(resonant_inserted(v, spec, N, 0.0, 1), K, norm);
        const double rhs = std::pow(static_cast<double>(N), 1.0 / qp - 1.0) *
                           std::pow(vn, 5.0);
        rows.push_back(make_row(lemma_id, N, 1, norm, lhs, rhs));
      }
    } else if (lemma_id == "fir3") {
      for (long long N : n_grid) {
        const double lhs =
            out_norm(near_resonant(v, spec, N, 0.0, 1), K, norm);
        rows.push_back(
            make_row(lemma_id, N, 1, norm, lhs, std::pow(vn, 5.0)));
      }
    } else if (lemma_id == "finaal") {
      for (int g = 1; g <= 3; ++g) {
        const double lhs =
            out_norm(boundary_term(v, spec, cfg.N, 0.0, g), K, norm);
        const double rhs =
            std::pow(static_cast<double>(cfg.N), -0.5 * g * 0.99) *
            std::pow(vn, static_cast<double>(2 * g + 1));
        rows.push_back(make_row(lemma_id, cfg.N, g, norm, lhs, rhs));
      }
    } else if (lemma_id == "finaal2") {
      for (int g = 1; g <= std::max(1, cfg.J - 1); ++g) {
        const double lhs =
            out_norm(near_resonant(v, spec, cfg.N, 0.0, g), K, norm);
        const double rhs =
            std::pow(static_cast<double>(cfg.N), -0.5 * (g - 1) * 0.99) *
            std::pow(vn, static_cast<double>(2 * g + 3));
        rows.push_back(make_row(lemma_id, cfg.N, g, norm, lhs, rhs));
      }
    } else if (lemma_id == "finafinafina") {
      for (int g = 1; g <= std::max(1, cfg.J - 1); ++g) {
        const double lhs =
            out_norm(boundary_term(v, spec, cfg.N, 0.0, g), K, norm) +
            out_norm(resonant_inserted(v, spec, cfg.N, 0.0, g), K, norm) +
            out_norm(near_resonant(v, spec, cfg.N, 0.0, g), K, norm);
        const double rhs = std::pow(static_cast<double>(g), -0.5 * g) *
                           std::pow(vn, static_cast<double>(2 * g + 3));
        rows.push_back(make_row(lemma_id, cfg.N, g, norm, lhs, rhs));
      }
    } else {
      throw std::invalid_argument("bound_probe: unknown lemma id " +
                                  lemma_id);
    }
  }
  return rows;
}

void write_probe_csv(std::ostream& os, const std::vector<ProbeRow>& rows) {
  os << "lemma_id,N,J,q,s,lhs,rhs_model,fitted_constant\n";
  char buf[256];
  for (const ProbeRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.lemma_id.c_str(), r.N, r.J, r.q, r.s, r.lhs, r.rhs_model,
                  r.fitted_constant);
    os << buf;
  }
}

}  // namespace honls::nfr
