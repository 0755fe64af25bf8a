#include "honls/trees.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace honls::trees {

namespace {

using i128 = __int128;

i128 pow4(long long x) {
  const i128 v = x;
  return v * v * v * v;
}

i128 phi4_fast(long long n, long long n1, long long n2, long long n3) {
  return pow4(n) - pow4(n1) + pow4(n2) - pow4(n3);
}

i128 abs128(i128 v) { return v < 0 ? -v : v; }

}  // namespace

OrderedTree::OrderedTree(const std::vector<int>& chronicle)
    : chronicle_(chronicle) {
  if (chronicle_.empty() || chronicle_[0] != 0)
    throw std::invalid_argument("chronicle must start at the root");
  nodes_.push_back(Node{});
  for (int j = 0; j < static_cast<int>(chronicle_.size()); ++j) {
    const int id = chronicle_[j];
    if (id < 0 || id >= static_cast<int>(nodes_.size()) ||
        !nodes_[id].terminal())
      throw std::invalid_argument("chronicle expands a non-terminal node");
    for (int s = 0; s < 3; ++s) {
      Node child;
      child.parent = id;
      child.slot = static_cast<Slot>(s);
      child.generation = j + 1;
      nodes_[id].child[s] = static_cast<int>(nodes_.size());
      nodes_.push_back(child);
    }
  }
}

std::vector<int> OrderedTree::parental_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (!nodes_[i].terminal()) out.push_back(i);
  return out;
}

std::vector<int> OrderedTree::terminal_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (nodes_[i].terminal()) out.push_back(i);
  return out;
}

std::vector<int> OrderedTree::terminal_nodes_at(int j) const {
  std::vector<int> out;
  const int node_count = 3 * j + 1;
  for (int i = 0; i < node_count; ++i) {
    const Node& n = nodes_[i];
    const bool expanded_by_prefix = !n.terminal() && n.child[0] < node_count;
    if (!expanded_by_prefix) out.push_back(i);
  }
  return out;
}

int OrderedTree::psgn(int id) const {
  return node(id).slot == Slot::middle ? -1 : +1;
}

int OrderedTree::fsgn(int id) const {
  int middles = 0;
  for (int a = node(id).parent; a != kNoNode; a = nodes_[a].parent)
    if (nodes_[a].slot == Slot::middle) ++middles;
  return (middles % 2 == 0) ? psgn(id) : -psgn(id);
}

std::string OrderedTree::dump() const {
  static const char* slot_names[] = {"left", "middle", "right"};
  std::ostringstream os;
  for (int i = 0; i < size(); ++i) {
    const Node& n = nodes_[i];
    os << i << ' ' << n.parent << ' '
       << (n.slot == Slot::root ? "root" : slot_names[static_cast<int>(n.slot)])
       << ' ' << (psgn(i) > 0 ? "+1" : "-1") << ' '
       << (fsgn(i) > 0 ? "+1" : "-1") << '\n';
  }
  return os.str();
}

std::vector<OrderedTree> enumerate_trees(int J, int max_J) {
  if (J < 1) throw std::invalid_argument("enumerate_trees: J must be >= 1");
  if (J > max_J)
    throw std::length_error("enumerate_trees: J exceeds the configured cap");
  std::vector<OrderedTree> out;
  std::vector<int> chronicle{0};
  const std::function<void()> grow = [&] {
    if (static_cast<int>(chronicle.size()) == J) {
      out.emplace_back(chronicle);
      return;
    }
    // Candidates: terminal nodes of the current prefix, in id order.
    OrderedTree prefix(chronicle);
    for (int cand : prefix.terminal_nodes()) {
      chronicle.push_back(cand);
      grow();
      chronicle.pop_back();
    }
  };
  grow();
  return out;
}

void index_functions(
    const OrderedTree& tree, long long root_freq, long long N, long long K,
    const std::function<bool(const IndexAssignment&)>& visit) {
  if (std::abs(root_freq) > K)
    throw std::invalid_argument("index_functions: |root_freq| > K");
  IndexAssignment a;
  a.tree = &tree;
  a.N = N;
  a.K = K;
  a.freq.assign(tree.size(), 0);
  a.freq[0] = root_freq;
  const int J = tree.generations();

  bool stopped = false;
  const std::function<void(int)> step = [&](int j) {
    if (stopped) return;
    if (j > J) {
      if (!visit(a)) stopped = true;
      return;
    }
    const int id = tree.chronicle()[j - 1];
    const Node& node = tree.node(id);
    const long long n = a.freq[id];
    for (long long n1 = -K; n1 <= K && !stopped; ++n1) {
      if (n1 == n) continue;
      for (long long n3 = -K; n3 <= K && !stopped; ++n3) {
        if (n3 == n) continue;
        const long long n2 = n1 + n3 - n;
        if (n2 < -K || n2 > K) continue;
        if (j == 1 && abs128(phi4_fast(n, n1, n2, n3)) <= N) continue;
        a.freq[node.child[0]] = n1;
        a.freq[node.child[1]] = n2;
        a.freq[node.child[2]] = n3;
        step(j + 1);
      }
    }
  };
  step(1);
}

std::vector<IndexAssignment> collect_index_functions(const OrderedTree& tree,
                                                     long long root_freq,
                                                     long long N,
                                                     long long K) {
  std::vector<IndexAssignment> out;
  index_functions(tree, root_freq, N, K, [&](const IndexAssignment& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

GenerationPhases phases_of(const IndexAssignment& a, unsigned k) {
  const OrderedTree& tree = *a.tree;
  const int J = tree.generations();
  GenerationPhases g;
  g.phi.assign(J + 1, Int(0));
  g.tilde_phi.assign(J + 1, Int(0));
  g.signed_phi.assign(J + 1, Int(0));
  g.signed_tilde.assign(J + 1, Int(0));
  g.hat_phi = 1;
  for (int j = 1; j <= J; ++j) {
    const int id = tree.chronicle()[j - 1];
    const Node& node = tree.node(id);
    const phase::FrequencyQuad quad(a.freq[id], a.freq[node.child[0]],
                                    a.freq[node.child[1]],
                                    a.freq[node.child[2]]);
    g.phi[j] = phase::phi(k, quad);
    g.tilde_phi[j] = g.tilde_phi[j - 1] + g.phi[j];
    g.signed_phi[j] = tree.fsgn(id) * g.phi[j];
    g.signed_tilde[j] = g.signed_tilde[j - 1] + g.signed_phi[j];
    g.hat_phi *= g.tilde_phi[j];
  }
  return g;
}

Int tilde_phi_node(const IndexAssignment& a, unsigned k, int node) {
  const OrderedTree& tree = *a.tree;
  Int total = 0;
  for (int b : tree.parental_nodes()) {
    // Skip the subtree rooted at `node`, the node itself included.
    if (b == node) continue;
    bool descendant = false;
    for (int p = tree.node(b).parent; p != kNoNode; p = tree.node(p).parent)
      if (p == node) { descendant = true; break; }
    if (descendant) continue;
    const Node& nb = tree.node(b);
    const phase::FrequencyQuad quad(a.freq[b], a.freq[nb.child[0]],
                                    a.freq[nb.child[1]], a.freq[nb.child[2]]);
    total += phase::phi(k, quad);
  }
  return total;
}

}  // namespace honls::trees
