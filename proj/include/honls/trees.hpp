#pragma once

#include <functional>
#include <string>
#include <vector>

#include "honls/phase.hpp"

namespace honls::trees {

using phase::Int;

inline constexpr int kNoNode = -1;

// Slot of a node under its parent.
enum class Slot { root = -1, left = 0, middle = 1, right = 2 };

struct Node {
  int parent = kNoNode;
  int child[3] = {kNoNode, kNoNode, kNoNode};
  Slot slot = Slot::root;
  int generation = 0;  // chronicle step at which this node was created

  bool terminal() const { return child[0] == kNoNode; }
};

// Ternary tree grown by a chronicle: step j turns one terminal node of
// the generation-(j-1) tree into a parent of three children.  Node ids
// are birth order (root = 0, then left/middle/right per expansion).
class OrderedTree {
 public:
  // Builds the tree from the chronicle; chronicle[j] is the id of the
  // node expanded at step j+1 (chronicle[0] must be the root).
  explicit OrderedTree(const std::vector<int>& chronicle);

  int generations() const { return static_cast<int>(chronicle_.size()); }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_.at(id); }
  const std::vector<int>& chronicle() const { return chronicle_; }

  std::vector<int> parental_nodes() const;  // T^0, |.| = J
  std::vector<int> terminal_nodes() const;  // T^infty, |.| = 2J+1

  // Terminal set of the prefix tree after the first j chronicle steps.
  std::vector<int> terminal_nodes_at(int j) const;

  int psgn(int id) const;
  int fsgn(int id) const;

  // One node per line: id, parent, slot, psgn, fsgn.
  std::string dump() const;

 private:
  std::vector<Node> nodes_;
  std::vector<int> chronicle_;
};

// All ordered trees of generation J; count is (2J-1)!!.  Expansion
// candidates are taken left-before-middle-before-right within each
// generation, which fixes the output order.
std::vector<OrderedTree> enumerate_trees(int J, int max_J = 6);

inline Int double_factorial_odd(int J) {
  Int r = 1;
  for (int j = 1; j <= J; ++j) r *= 2 * j - 1;
  return r;
}

// Admissible frequency assignment on an ordered tree: node id -> n_a.
struct IndexAssignment {
  const OrderedTree* tree = nullptr;
  std::vector<long long> freq;   // indexed by node id
  long long N = 0;
  long long K = 0;
};

// Streams every admissible assignment with root frequency root_freq:
// exact zero-sum n_a = n_a1 - n_a2 + n_a3, n_a1 != n_a != n_a3 at every
// parent, |Phi_4(root quad)| > N, all |n| <= K.  The visitor returns
// false to stop early.  Assignments are generated chronicle step by
// chronicle step, (n_a1, n_a3) in lexicographic order.
void index_functions(const OrderedTree& tree, long long root_freq,
                     long long N, long long K,
                     const std::function<bool(const IndexAssignment&)>& visit);

// Materialized variant, for small cases and tests.
std::vector<IndexAssignment> collect_index_functions(const OrderedTree& tree,
                                                     long long root_freq,
                                                     long long N,
                                                     long long K);

// Exact generation phases of an assignment at dispersion order k:
// phi[j] = Phi_2k of the generation-j quad, tilde prefix sums, hat
// product.  signed_phi[j] carries the extra factor fsgn(expanded node),
// i.e. the phase increment as it actually enters the oscillatory factor
// when a conjugated node is expanded; signed_tilde are its prefix sums.
struct GenerationPhases {
  std::vector<Int> phi;           // phi[0] unused; phi[1..J]
  std::vector<Int> tilde_phi;     // tilde_phi[j] = sum_{i<=j} phi[i]
  Int hat_phi;                    // prod_j tilde_phi[j]
  std::vector<Int> signed_phi;
  std::vector<Int> signed_tilde;
};

GenerationPhases phases_of(const IndexAssignment& a, unsigned k);

// Node-indexed variant of Eq-style tilde phase: sum of phi over
// parental nodes outside the subtree of `node`.  Diagnostic only; for
// non-chain trees it differs from the chronicle prefix sums.
Int tilde_phi_node(const IndexAssignment& a, unsigned k, int node);

}  // namespace honls::trees
