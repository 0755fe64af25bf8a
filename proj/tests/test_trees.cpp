#include <doctest.h>

#include <algorithm>
#include <set>

#include "honls/trees.hpp"

using namespace honls::trees;

TEST_CASE("tree enumeration counts follow the odd double factorial") {
  CHECK(enumerate_trees(1).size() == 1);
  CHECK(enumerate_trees(2).size() == 3);
  CHECK(enumerate_trees(3).size() == 15);
  CHECK(enumerate_trees(4).size() == 105);
  CHECK(double_factorial_odd(6) == 10395);
  CHECK_THROWS_AS(enumerate_trees(7), std::length_error);
  CHECK_THROWS_AS(enumerate_trees(0), std::invalid_argument);
}

TEST_CASE("cardinalities and chronicle reconstruction") {
  for (int J = 1; J <= 4; ++J)
    for (const OrderedTree& t : enumerate_trees(J)) {
      CHECK(t.size() == 3 * J + 1);
      CHECK(t.parental_nodes().size() == static_cast<size_t>(J));
      CHECK(t.terminal_nodes().size() == static_cast<size_t>(2 * J + 1));
      // replaying the chronicle reproduces the node set
      const OrderedTree replay(t.chronicle());
      CHECK(replay.dump() == t.dump());
      // every chronicle step expands a node terminal in the prefix
      for (int j = 1; j < J; ++j) {
        const auto frontier = t.terminal_nodes_at(j);
        CHECK(std::count(frontier.begin(), frontier.end(),
                         t.chronicle()[static_cast<size_t>(j)]) == 1);
      }
    }
}

TEST_CASE("node signs") {
  // chain tree: expand the root, then the root's middle child
  const OrderedTree t({0, 2});
  CHECK(t.psgn(0) == 1);
  CHECK(t.fsgn(0) == 1);
  // middle child of the root: middle slot, no middle strict ancestors
  CHECK(t.psgn(2) == -1);
  CHECK(t.fsgn(2) == -1);
  // left child of the root's middle child: one middle predecessor
  const int left_of_mid = t.node(2).child[0];
  CHECK(t.psgn(left_of_mid) == 1);
  CHECK(t.fsgn(left_of_mid) == -1);
  // middle child of the middle child: sign flips back
  const int mid_of_mid = t.node(2).child[1];
  CHECK(t.psgn(mid_of_mid) == -1);
  CHECK(t.fsgn(mid_of_mid) == 1);
  CHECK_THROWS_AS(t.node(99), std::out_of_range);
}

TEST_CASE("fsgn parity flips with each middle ancestor") {
  // deepen along middle children only: fsgn alternates
  OrderedTree t({0, 2, 5});
  int id = 2;
  int expect = -1;
  while (!t.node(id).terminal()) {
    CHECK(t.fsgn(id) == expect);
    id = t.node(id).child[1];
    expect = -expect;
  }
}

TEST_CASE("index function streams at generation one") {
  const OrderedTree t({0});
  SUBCASE("K=2, N=0 contains the two minimal assignments") {
    const auto all = collect_index_functions(t, 0, 0, 2);
    std::set<std::array<long long, 3>> triples;
    for (const auto& a : all)
      triples.insert({a.freq[1], a.freq[2], a.freq[3]});
    CHECK(triples.count({1, 2, 1}) == 1);
    CHECK(triples.count({-1, -2, -1}) == 1);
    // brute-force oracle over the box
    std::set<std::array<long long, 3>> oracle;
    for (long long n1 = -2; n1 <= 2; ++n1)
      for (long long n3 = -2; n3 <= 2; ++n3) {
        const long long n2 = n1 + n3;
        if (n2 < -2 || n2 > 2 || n1 == 0 || n3 == 0) continue;
        const long long phi = -n1 * n1 * n1 * n1 + n2 * n2 * n2 * n2 -
                              n3 * n3 * n3 * n3;
        if (std::abs(phi) > 0) oracle.insert({n1, n2, n3});
      }
    CHECK(triples == oracle);
  }
  SUBCASE("large threshold empties the stream") {
    CHECK(collect_index_functions(t, 0, 100, 2).empty());
  }
  SUBCASE("K=0 rejects or yields nothing") {
    CHECK(collect_index_functions(t, 0, 0, 0).empty());
  }
}

TEST_CASE("index functions match brute force at depth two") {
  // oracle: fill both quads from the full box and filter
  for (const OrderedTree& t : enumerate_trees(2)) {
    const long long K = 3, N = 5;
    const auto stream = collect_index_functions(t, 1, N, K);
    long long count = 0;
    const int e1 = t.chronicle()[1];
    for (long long a1 = -K; a1 <= K; ++a1)
      for (long long a3 = -K; a3 <= K; ++a3) {
        const long long a2 = a1 + a3 - 1;
        if (a2 < -K || a2 > K || a1 == 1 || a3 == 1) continue;
        const auto p4 = [](long long x) {
          return static_cast<__int128>(x) * x * x * x;
        };
        const __int128 phi = p4(1) - p4(a1) + p4(a2) - p4(a3);
        if ((phi < 0 ? -phi : phi) <= N) continue;
        const long long root2 = (e1 == 1) ? a1 : (e1 == 2) ? a2 : a3;
        for (long long b1 = -K; b1 <= K; ++b1)
          for (long long b3 = -K; b3 <= K; ++b3) {
            const long long b2 = b1 + b3 - root2;
            if (b2 < -K || b2 > K || b1 == root2 || b3 == root2) continue;
            ++count;
          }
      }
    CHECK(static_cast<long long>(stream.size()) == count);
    for (const auto& a : stream) {
      // every parental node satisfies zero-sum and the exclusions
      for (int id : t.parental_nodes()) {
        const Node& nd = t.node(id);
        CHECK(a.freq[id] == a.freq[nd.child[0]] - a.freq[nd.child[1]] +
                                a.freq[nd.child[2]]);
        CHECK(a.freq[nd.child[0]] != a.freq[id]);
        CHECK(a.freq[nd.child[2]] != a.freq[id]);
      }
    }
  }
}

TEST_CASE("generation phases") {
  const OrderedTree t1({0});
  // quad (0, 1, 2, 1) at order two: phi1 = 0 - 1 + 16 - 1 = 14
  IndexAssignment a;
  a.tree = &t1;
  a.freq = {0, 1, 2, 1};
  const GenerationPhases g1 = phases_of(a, 2);
  CHECK(g1.phi[1] == 14);
  CHECK(g1.tilde_phi[1] == 14);
  CHECK(g1.hat_phi == 14);

  // two generations: phi1 = 14, expand the left child (freq 1) with
  // quad (1, 0, -1, 0): phi2 = 1 - 0 + 1 - 0 = 2; prefix sums follow
  const OrderedTree t2({0, 1});
  IndexAssignment b;
  b.tree = &t2;
  b.freq = {0, 1, 2, 1, 0, -1, 0};
  const GenerationPhases g2 = phases_of(b, 2);
  CHECK(g2.phi[1] == 14);
  CHECK(g2.phi[2] == 2);
  CHECK(g2.tilde_phi[2] == 16);
  CHECK(g2.hat_phi == 14 * 16);
  // signed variant: the expanded node (left child) has fsgn +1 here
  CHECK(g2.signed_tilde[2] == 16);
}

TEST_CASE("node-indexed tilde phase agrees on chain trees") {
  const OrderedTree t({0, 1});
  IndexAssignment a;
  a.tree = &t;
  a.freq = {0, 1, 2, 1, 0, -1, 0};
  // for the second expanded node only the root quad lies outside its
  // subtree; for the root nothing does
  CHECK(tilde_phi_node(a, 2, 1) == 14);
  CHECK(tilde_phi_node(a, 2, 0) == 0);
}
