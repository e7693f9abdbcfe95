#include "gqbe/mqg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>
#include <unordered_map>

#include "graph_util.hpp"

namespace gqbe {
namespace {

using detail::DisjointSets;
using detail::EdgeEnds;

constexpr int kUnreached = std::numeric_limits<int>::max();

std::pair<int, std::uint32_t> node_key(const MqgNode& n) {
  if (n.is_virtual()) return {0, static_cast<std::uint32_t>(n.query_position)};
  return {1, n.entity->value};
}

EdgeEnds ends_of(const MaximalQueryGraph& m) {
  EdgeEnds ends;
  ends.reserve(m.edges.size());
  for (const auto& e : m.edges) ends.emplace_back(e.src, e.dst);
  return ends;
}

std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adjacency(const MaximalQueryGraph& m) {
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(m.nodes.size());  // (edge, neighbour)
  for (std::uint32_t i = 0; i < m.edges.size(); ++i) {
    adj[m.edges[i].src].emplace_back(i, m.edges[i].dst);
    adj[m.edges[i].dst].emplace_back(i, m.edges[i].src);
  }
  return adj;
}

// Undirected BFS distances from a set of sources, optionally restricted to a
// subset of edges.
std::vector<int> bfs(const MaximalQueryGraph& m, const std::vector<std::uint32_t>& sources,
                     const std::vector<bool>* allowed = nullptr) {
  auto adj = adjacency(m);
  std::vector<int> dist(m.nodes.size(), kUnreached);
  std::deque<std::uint32_t> queue;
  for (auto s : sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto [e, v] : adj[u]) {
      if (allowed && !(*allowed)[e]) continue;
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

// Edges on simple undirected paths of at most `bound` edges joining two
// distinct query nodes.
std::vector<bool> bounded_core(const MaximalQueryGraph& m, int bound) {
  std::vector<bool> core(m.edges.size(), false);
  const auto n = m.query_nodes.size();
  if (n < 2) return core;
  auto adj = adjacency(m);
  std::vector<std::vector<int>> dist;
  for (auto q : m.query_nodes) dist.push_back(bfs(m, {q}));

  std::vector<bool> on_path(m.nodes.size(), false);
  std::vector<std::uint32_t> path_edges;
  for (std::size_t i = 0; i < n; ++i) {
    auto remaining = [&](std::uint32_t v) {
      int best = kUnreached;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) best = std::min(best, dist[j][v]);
      }
      return best;
    };
    std::function<void(std::uint32_t, int)> dfs = [&](std::uint32_t u, int len) {
      if (len > 0 && m.nodes[u].is_query()) {
        for (auto e : path_edges) core[e] = true;
        return;
      }
      for (auto [e, v] : adj[u]) {
        if (on_path[v]) continue;
        int rest = remaining(v);
        if (rest == kUnreached || len + 1 + rest > bound) continue;
        on_path[v] = true;
        path_edges.push_back(e);
        dfs(v, len + 1);
        path_edges.pop_back();
        on_path[v] = false;
      }
    };
    const auto q = m.query_nodes[i];
    on_path[q] = true;
    dfs(q, 0);
    on_path[q] = false;
  }
  return core;
}

struct Group {
  std::vector<std::uint32_t> edges;    // candidate edge indices
  std::vector<std::uint32_t> anchors;  // nodes the component must contain
};

// Splits edges into the core group plus one group per query node. A non-core
// edge belongs to the query node that reaches it first through non-core
// edges; unreachable leftovers join the core group.
std::vector<Group> split_groups(const MaximalQueryGraph& m, const std::vector<bool>& core) {
  const auto n = m.query_nodes.size();
  std::vector<Group> groups(n + 1);
  groups[0].anchors = m.query_nodes;
  for (std::size_t i = 0; i < n; ++i) groups[i + 1].anchors = {m.query_nodes[i]};

  auto adj = adjacency(m);
  std::vector<int> dist(m.nodes.size(), kUnreached);
  std::vector<int> owner(m.nodes.size(), -1);
  std::deque<std::uint32_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = m.query_nodes[i];
    dist[q] = 0;
    owner[q] = static_cast<int>(i);
    queue.push_back(q);
  }
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto [e, v] : adj[u]) {
      if (core[e] || dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      owner[v] = owner[u];
      queue.push_back(v);
    }
  }

  for (std::uint32_t e = 0; e < m.edges.size(); ++e) {
    if (core[e]) {
      groups[0].edges.push_back(e);
      continue;
    }
    const auto a = m.edges[e].src;
    const auto b = m.edges[e].dst;
    if (owner[a] < 0 && owner[b] < 0) {
      groups[0].edges.push_back(e);
      continue;
    }
    int o;
    if (owner[a] < 0) {
      o = owner[b];
    } else if (owner[b] < 0) {
      o = owner[a];
    } else if (dist[a] != dist[b]) {
      o = dist[a] < dist[b] ? owner[a] : owner[b];
    } else {
      o = std::min(owner[a], owner[b]);
    }
    groups[static_cast<std::size_t>(o) + 1].edges.push_back(e);
  }
  return groups;
}

void sort_by_weight(const MaximalQueryGraph& m, std::vector<std::uint32_t>& edges) {
  std::sort(edges.begin(), edges.end(), [&](std::uint32_t x, std::uint32_t y) {
    const auto& a = m.edges[x];
    const auto& b = m.edges[y];
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.label != b.label) return a.label < b.label;
    auto ka = std::make_pair(node_key(m.nodes[a.src]), node_key(m.nodes[a.dst]));
    auto kb = std::make_pair(node_key(m.nodes[b.src]), node_key(m.nodes[b.dst]));
    return ka < kb;
  });
}

// Weakly connected component of the top-s edges holding every anchor.
std::optional<std::vector<std::uint32_t>> component(const MaximalQueryGraph& m,
                                                    const std::vector<std::uint32_t>& sorted, std::size_t s,
                                                    const std::vector<std::uint32_t>& anchors) {
  DisjointSets sets(m.nodes.size());
  std::vector<bool> touched(m.nodes.size(), false);
  for (std::size_t i = 0; i < s; ++i) {
    const auto& e = m.edges[sorted[i]];
    sets.add_edge(e.src, e.dst);
    touched[e.src] = touched[e.dst] = true;
  }
  for (auto a : anchors) {
    if (!touched[a] || sets.find(a) != sets.find(anchors.front())) return std::nullopt;
  }
  const auto root = sets.find(anchors.front());
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < s; ++i) {
    if (sets.find(m.edges[sorted[i]].src) == root) out.push_back(sorted[i]);
  }
  return out;
}

// Greedy search over s for the component closest to m edges: exactly m if
// possible, else the largest undershoot, else the smallest overshoot.
std::vector<std::uint32_t> greedy_component(const MaximalQueryGraph& g, std::vector<std::uint32_t> edges,
                                            const std::vector<std::uint32_t>& anchors, std::size_t m) {
  if (edges.empty()) return {};
  sort_by_weight(g, edges);
  const std::size_t cap = edges.size();
  auto whole = [&] {
    auto c = component(g, edges, cap, anchors);
    return c ? *c : edges;
  };

  int step = 1;
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  std::size_t s = m;
  while (s > 0) {
    if (s > cap) {
      if (s1 > 0) return *component(g, edges, s1, anchors);
      return whole();
    }
    auto ms = component(g, edges, s, anchors);
    if (ms) {
      if (ms->size() == m) return *ms;
      if (ms->size() < m) {
        s1 = s;
        if (step == -1) return *ms;
      }
      if (ms->size() > m) {
        if (s1 > 0) return *component(g, edges, s1, anchors);
        s2 = s;
        step = -1;
      }
    }
    s = step > 0 ? s + 1 : s - 1;
  }
  if (s2 > 0) return *component(g, edges, s2, anchors);
  return whole();
}

// Shortest-path tree joining the query nodes, topped up with the heaviest
// adjacent edges until it holds `target` edges.
std::vector<std::uint32_t> connecting_tree(const MaximalQueryGraph& m, std::size_t target) {
  auto adj = adjacency(m);
  const auto root = m.query_nodes.front();
  std::vector<int> dist(m.nodes.size(), kUnreached);
  std::vector<std::int64_t> via(m.nodes.size(), -1);
  std::deque<std::uint32_t> queue{root};
  dist[root] = 0;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto [e, v] : adj[u]) {
      if (dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      via[v] = e;
      queue.push_back(v);
    }
  }
  std::vector<bool> chosen(m.edges.size(), false);
  std::vector<bool> in_tree(m.nodes.size(), false);
  in_tree[root] = true;
  for (auto q : m.query_nodes) {
    for (auto v = q; !in_tree[v];) {
      in_tree[v] = true;
      const auto e = static_cast<std::uint32_t>(via[v]);
      chosen[e] = true;
      v = m.edges[e].src == v ? m.edges[e].dst : m.edges[e].src;
    }
  }
  std::vector<std::uint32_t> rest;
  for (std::uint32_t e = 0; e < m.edges.size(); ++e) rest.push_back(e);
  sort_by_weight(m, rest);
  auto count = static_cast<std::size_t>(std::count(chosen.begin(), chosen.end(), true));
  bool grew = true;
  while (count < target && grew) {
    grew = false;
    for (auto e : rest) {
      if (chosen[e]) continue;
      const auto& edge = m.edges[e];
      if (!in_tree[edge.src] && !in_tree[edge.dst]) continue;
      chosen[e] = true;
      in_tree[edge.src] = in_tree[edge.dst] = true;
      ++count;
      grew = true;
      break;
    }
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t e = 0; e < m.edges.size(); ++e) {
    if (chosen[e]) out.push_back(e);
  }
  return out;
}

struct Selection {
  std::vector<std::uint32_t> edges;
  std::vector<bool> core;  // per selected edge
};

// Balanced selection of about r edges from a candidate graph. A positive
// `path_bound` limits core paths to that many edges; zero leaves them
// unbounded.
Selection select_balanced(const MaximalQueryGraph& c, int r, int path_bound) {
  const auto n = c.query_nodes.size();
  const auto target = static_cast<std::size_t>(std::max(1, (r + static_cast<int>(n)) / static_cast<int>(n + 1)));
  const auto hard_cap = 2 * static_cast<std::size_t>(r);

  std::vector<bool> core = path_bound > 0 ? bounded_core(c, path_bound)
                                          : detail::edges_between_terminals(c.nodes.size(), ends_of(c), c.query_nodes);
  auto groups = split_groups(c, core);

  std::vector<bool> chosen(c.edges.size(), false);
  std::vector<bool> from_core(c.edges.size(), false);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (auto e : greedy_component(c, groups[i].edges, groups[i].anchors, target)) {
      chosen[e] = true;
      if (i == 0) from_core[e] = true;
    }
  }
  auto picked = static_cast<std::size_t>(std::count(chosen.begin(), chosen.end(), true));

  if (picked > hard_cap) {
    std::vector<std::uint32_t> all(c.edges.size());
    std::iota(all.begin(), all.end(), 0u);
    auto single = greedy_component(c, all, c.query_nodes, static_cast<std::size_t>(r));
    if (single.size() > hard_cap) single = connecting_tree(c, static_cast<std::size_t>(r));
    std::fill(chosen.begin(), chosen.end(), false);
    for (auto e : single) chosen[e] = true;
  }

  Selection out;
  for (std::uint32_t e = 0; e < c.edges.size(); ++e) {
    if (!chosen[e]) continue;
    out.edges.push_back(e);
    out.core.push_back(core[e]);
  }
  if (out.edges.size() > kMaxMqgEdges) {
    throw ResourceLimitError("maximal query graph exceeds " + std::to_string(kMaxMqgEdges) + " edges");
  }
  return out;
}

// Rebuilds the graph over the selected edges in canonical order: query nodes
// by position, other nodes by entity id, edges by (src, label, dst).
MaximalQueryGraph canonical_subgraph(const MaximalQueryGraph& c, const Selection& sel) {
  std::vector<std::uint32_t> keep;
  std::vector<bool> used(c.nodes.size(), false);
  for (auto q : c.query_nodes) used[q] = true;
  for (auto e : sel.edges) used[c.edges[e].src] = used[c.edges[e].dst] = true;
  for (std::uint32_t v = 0; v < c.nodes.size(); ++v) {
    if (used[v] && !c.nodes[v].is_query()) keep.push_back(v);
  }
  std::sort(keep.begin(), keep.end(),
            [&](std::uint32_t a, std::uint32_t b) { return node_key(c.nodes[a]) < node_key(c.nodes[b]); });

  MaximalQueryGraph out;
  std::vector<std::uint32_t> remap(c.nodes.size(), 0);
  for (auto q : c.query_nodes) {
    remap[q] = static_cast<std::uint32_t>(out.nodes.size());
    out.query_nodes.push_back(remap[q]);
    out.nodes.push_back(c.nodes[q]);
  }
  for (auto v : keep) {
    remap[v] = static_cast<std::uint32_t>(out.nodes.size());
    out.nodes.push_back(c.nodes[v]);
  }

  std::vector<std::pair<MqgEdge, bool>> edges;
  for (std::size_t i = 0; i < sel.edges.size(); ++i) {
    auto e = c.edges[sel.edges[i]];
    e.src = remap[e.src];
    e.dst = remap[e.dst];
    edges.emplace_back(e, sel.core[i]);
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.src, a.first.label, a.first.dst) < std::tie(b.first.src, b.first.label, b.first.dst);
  });
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out.edges.push_back(edges[i].first);
    if (edges[i].second && i < kMaxMqgEdges) out.core_edges |= std::uint64_t{1} << i;
  }
  return out;
}

Selection select_all(const MaximalQueryGraph& c, const std::vector<bool>& core) {
  Selection s;
  for (std::uint32_t e = 0; e < c.edges.size(); ++e) {
    s.edges.push_back(e);
    s.core.push_back(core[e]);
  }
  return s;
}

void check_target(int r, std::size_t n) {
  if (r < static_cast<int>(n) + 1 || r > kMaxTargetSize) {
    throw InvalidArgument("target size r must be between " + std::to_string(n + 1) + " and " +
                          std::to_string(kMaxTargetSize));
  }
}

}  // namespace

std::size_t MaximalQueryGraph::degree(std::uint32_t node) const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [&](const MqgEdge& e) { return e.src == node || e.dst == node; }));
}

std::string MaximalQueryGraph::node_name(const DataGraph& g, std::uint32_t node) const {
  const auto& n = nodes.at(node);
  if (n.is_virtual()) return "w" + std::to_string(n.query_position + 1);
  return g.name(*n.entity);
}

std::vector<WeightedEdge> weigh(const DataGraph& g, const NeighborhoodGraph& h) {
  std::vector<WeightedEdge> out;
  out.reserve(h.edges.size());
  for (auto e : h.edges) {
    out.push_back({e, g.ief(g.edge(e).label) / static_cast<double>(g.participation(e))});
  }
  return out;
}

MaximalQueryGraph discover(const DataGraph& g, const NeighborhoodGraph& reduced,
                           std::span<const WeightedEdge> weighted, int r) {
  const auto n = reduced.query.size();
  if (n == 0) throw InvalidArgument("query tuple is empty");
  check_target(r, n);

  MaximalQueryGraph c;
  std::unordered_map<EntityId, std::uint32_t> index;
  auto node_of = [&](EntityId v) {
    auto [it, inserted] = index.emplace(v, static_cast<std::uint32_t>(c.nodes.size()));
    if (inserted) c.nodes.push_back({v, -1});
    return it->second;
  };
  for (std::size_t i = 0; i < n; ++i) {
    c.query_nodes.push_back(node_of(reduced.query[i]));
    c.nodes.back().query_position = static_cast<int>(i);
  }
  for (const auto& we : weighted) {
    if (!reduced.has_edge(we.edge)) continue;
    const auto& t = g.edge(we.edge);
    c.edges.push_back({node_of(t.subj), node_of(t.obj), t.label, we.weight, 0});
  }
  for (auto q : c.query_nodes) {
    if (std::none_of(c.edges.begin(), c.edges.end(), [&](const MqgEdge& e) { return e.src == q || e.dst == q; })) {
      throw DisconnectedTupleError("query entity '" + c.node_name(g, q) + "' has no weighted neighborhood edges");
    }
  }

  Selection sel;
  if (c.edges.size() <= static_cast<std::size_t>(r)) {
    sel = select_all(c, bounded_core(c, reduced.d));
  } else {
    sel = select_balanced(c, r, reduced.d);
  }
  return assign_depths(canonical_subgraph(c, sel));
}

MaximalQueryGraph assign_depths(MaximalQueryGraph m) {
  auto dist = bfs(m, m.query_nodes);
  for (auto& e : m.edges) {
    const int d = std::min(dist[e.src], dist[e.dst]);
    if (d == kUnreached) throw InvalidArgument("maximal query graph is not weakly connected");
    e.depth = d;
  }
  return m;
}

MaximalQueryGraph merge(std::span<const MaximalQueryGraph> mqgs, int r) {
  if (mqgs.empty()) throw InvalidArgument("nothing to merge");
  const auto n = mqgs.front().arity();
  for (const auto& m : mqgs) {
    if (m.arity() != n) throw InvalidArgument("query tuples differ in arity");
  }
  check_target(r, n);

  MaximalQueryGraph c;
  std::map<std::pair<int, std::uint32_t>, std::uint32_t> index;
  for (std::size_t j = 0; j < n; ++j) {
    index.emplace(std::make_pair(0, static_cast<std::uint32_t>(j)), static_cast<std::uint32_t>(j));
    c.nodes.push_back({std::nullopt, static_cast<int>(j)});
    c.query_nodes.push_back(static_cast<std::uint32_t>(j));
  }
  struct Merged {
    std::size_t count = 0;
    double max_weight = 0.0;
  };
  std::map<std::tuple<std::uint32_t, LabelId, std::uint32_t>, Merged> merged;
  for (const auto& m : mqgs) {
    std::vector<std::uint32_t> local(m.nodes.size());
    for (std::uint32_t v = 0; v < m.nodes.size(); ++v) {
      const auto& node = m.nodes[v];
      std::pair<int, std::uint32_t> key =
          node.is_query() ? std::make_pair(0, static_cast<std::uint32_t>(node.query_position)) : node_key(node);
      auto [it, inserted] = index.emplace(key, static_cast<std::uint32_t>(c.nodes.size()));
      if (inserted) c.nodes.push_back(node);
      local[v] = it->second;
    }
    for (const auto& e : m.edges) {
      auto& slot = merged[{local[e.src], e.label, local[e.dst]}];
      ++slot.count;
      slot.max_weight = std::max(slot.max_weight, e.weight);
    }
  }
  for (const auto& [key, agg] : merged) {
    const auto& [src, label, dst] = key;
    c.edges.push_back({src, dst, label, static_cast<double>(agg.count) * agg.max_weight, 0});
  }

  Selection sel;
  if (c.edges.size() <= static_cast<std::size_t>(r)) {
    sel = select_all(c, std::vector<bool>(c.edges.size(), false));
  } else {
    sel = select_balanced(c, r, 0);
  }
  auto out = canonical_subgraph(c, sel);
  out.core_edges = 0;
  auto core = detail::edges_between_terminals(out.nodes.size(), ends_of(out), out.query_nodes);
  for (std::size_t i = 0; i < core.size(); ++i) {
    if (core[i]) out.core_edges |= std::uint64_t{1} << i;
  }
  return assign_depths(std::move(out));
}

std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", w);
  return buf;
}

void write_mqg(std::ostream& out, const DataGraph& g, const MaximalQueryGraph& m) {
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const auto& e = m.edges[i];
    out << i << '\t' << m.node_name(g, e.src) << '\t' << g.label_name(e.label) << '\t' << m.node_name(g, e.dst)
        << '\t' << format_weight(e.weight) << '\t' << e.depth << '\n';
  }
}

}  // namespace gqbe
