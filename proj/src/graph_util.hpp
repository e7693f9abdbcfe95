#pragma once

// Small graph helpers shared by MQG discovery and the lattice. Graphs here are
// undirected views over indexed edges: edge i joins ends[i].first and
// ends[i].second.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace gqbe::detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), edges_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  // Joins the endpoints of one edge and counts it in the merged set.
  void add_edge(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent_[a] = b;
      edges_[b] += edges_[a];
    }
    ++edges_[b];
  }

  std::size_t edge_count(std::size_t x) { return edges_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> edges_;
};

using EdgeEnds = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

// Marks every edge lying on some simple undirected path between two distinct
// terminals. Uses the block-cut tree: inside a biconnected block every edge
// lies on a simple path between any two distinct vertices of the block, so the
// answer is the union of the blocks on the minimal subtree spanning the
// terminals.
inline std::vector<bool> edges_between_terminals(std::size_t node_count, const EdgeEnds& ends,
                                                 const std::vector<std::uint32_t>& terminals) {
  std::vector<bool> marked(ends.size(), false);
  if (terminals.size() < 2 || ends.empty()) return marked;

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(node_count);  // (edge, neighbour)
  for (std::uint32_t i = 0; i < ends.size(); ++i) {
    adj[ends[i].first].emplace_back(i, ends[i].second);
    adj[ends[i].second].emplace_back(i, ends[i].first);
  }

  std::vector<int> disc(node_count, 0), low(node_count, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> blocks;
  int timer = 0;
  std::function<void(std::uint32_t, std::int64_t)> dfs = [&](std::uint32_t u, std::int64_t parent_edge) {
    disc[u] = low[u] = ++timer;
    for (auto [e, v] : adj[u]) {
      if (static_cast<std::int64_t>(e) == parent_edge) continue;
      if (disc[v] == 0) {
        stack.push_back(e);
        dfs(v, e);
        low[u] = std::min(low[u], low[v]);
        if (low[v] >= disc[u]) {
          std::vector<std::uint32_t> block;
          while (true) {
            auto top = stack.back();
            stack.pop_back();
            block.push_back(top);
            if (top == e) break;
          }
          blocks.push_back(std::move(block));
        }
      } else if (disc[v] < disc[u]) {
        stack.push_back(e);
        low[u] = std::min(low[u], disc[v]);
      }
    }
  };
  for (std::uint32_t v = 0; v < node_count; ++v) {
    if (disc[v] == 0 && !adj[v].empty()) dfs(v, -1);
  }

  // node -> blocks containing it
  std::vector<std::vector<std::uint32_t>> node_blocks(node_count);
  for (std::uint32_t b = 0; b < blocks.size(); ++b) {
    std::vector<std::uint32_t> members;
    for (auto e : blocks[b]) {
      members.push_back(ends[e].first);
      members.push_back(ends[e].second);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (auto v : members) node_blocks[v].push_back(b);
  }

  // Tree nodes: blocks [0, B), then one per articulation point.
  const std::size_t block_count = blocks.size();
  std::vector<std::int64_t> cut_index(node_count, -1);
  std::size_t tree_size = block_count;
  for (std::uint32_t v = 0; v < node_count; ++v) {
    if (node_blocks[v].size() > 1) cut_index[v] = static_cast<std::int64_t>(tree_size++);
  }
  std::vector<std::vector<std::size_t>> tree(tree_size);
  for (std::uint32_t v = 0; v < node_count; ++v) {
    if (cut_index[v] < 0) continue;
    for (auto b : node_blocks[v]) {
      tree[b].push_back(static_cast<std::size_t>(cut_index[v]));
      tree[static_cast<std::size_t>(cut_index[v])].push_back(b);
    }
  }

  std::size_t attached = 0;
  for (auto q : terminals) attached += node_blocks[q].empty() ? 0 : 1;
  if (attached < 2) return marked;

  std::vector<bool> terminal(tree_size, false);
  for (auto q : terminals) {
    if (cut_index[q] >= 0) {
      terminal[static_cast<std::size_t>(cut_index[q])] = true;
    } else if (!node_blocks[q].empty()) {
      terminal[node_blocks[q].front()] = true;
    }
  }

  std::vector<bool> alive(tree_size, true);
  std::vector<std::size_t> degree(tree_size);
  std::vector<std::size_t> leaves;
  for (std::size_t x = 0; x < tree_size; ++x) {
    degree[x] = tree[x].size();
    if (degree[x] <= 1 && !terminal[x]) leaves.push_back(x);
  }
  while (!leaves.empty()) {
    auto x = leaves.back();
    leaves.pop_back();
    if (!alive[x]) continue;
    alive[x] = false;
    for (auto y : tree[x]) {
      if (alive[y] && --degree[y] <= 1 && !terminal[y]) leaves.push_back(y);
    }
  }
  for (std::size_t b = 0; b < block_count; ++b) {
    if (!alive[b]) continue;
    for (auto e : blocks[b]) marked[e] = true;
  }
  return marked;
}

}  // namespace gqbe::detail
