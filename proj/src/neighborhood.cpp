#include "gqbe/neighborhood.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_set>

namespace gqbe {
namespace {

EntityId other_end(const Triple& t, EntityId v) { return t.subj == v ? t.obj : t.subj; }

void validate_tuple(const DataGraph& g, const Tuple& t) {
  if (t.empty()) throw InvalidArgument("query tuple is empty");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t[i].valid() || t[i].value >= g.entity_count()) throw InvalidArgument("query entity out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (t[i] == t[j]) throw InvalidArgument("query tuple repeats entity '" + g.name(t[i]) + "'");
    }
  }
}

// Adjacency restricted to an edge subset of the data graph.
class EdgeSubset {
 public:
  EdgeSubset(const DataGraph& g, const std::vector<EdgeId>& edges) : g_(g) {
    for (auto e : edges) {
      const auto& t = g.edge(e);
      adj_[t.subj].push_back(e);
      adj_[t.obj].push_back(e);
    }
  }

  const std::vector<EdgeId>& incident(EntityId v) const {
    static const std::vector<EdgeId> kEmpty;
    auto it = adj_.find(v);
    return it == adj_.end() ? kEmpty : it->second;
  }

  // Shortest distance from `from` to any target, never entering `banned`,
  // searching at most `limit` hops. Returns -1 when none is found.
  int distance_to(EntityId from, const std::unordered_set<EntityId>& targets, EntityId banned, int limit) const {
    if (targets.contains(from)) return 0;
    std::unordered_map<EntityId, int> seen{{from, 0}};
    std::deque<EntityId> queue{from};
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      int du = seen[u];
      if (du == limit) continue;
      for (auto e : incident(u)) {
        auto w = other_end(g_.edge(e), u);
        if (w == banned || seen.contains(w)) continue;
        if (targets.contains(w)) return du + 1;
        seen.emplace(w, du + 1);
        queue.push_back(w);
      }
    }
    return -1;
  }

 private:
  const DataGraph& g_;
  std::unordered_map<EntityId, std::vector<EdgeId>> adj_;
};

}  // namespace

bool NeighborhoodGraph::has_edge(EdgeId e) const { return std::binary_search(edges.begin(), edges.end(), e); }

std::size_t EdgeClassification::index_of(EdgeId e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) throw NotFoundError("edge #" + std::to_string(e.value) + " not classified");
  return static_cast<std::size_t>(it - edges_.begin());
}

EdgeClass EdgeClassification::at(const DataGraph& g, EntityId v, EdgeId e) const {
  const auto& t = g.edge(e);
  if (t.subj != v && t.obj != v) throw InvalidArgument("edge is not incident to node");
  return classes_[index_of(e)][t.subj == v ? 0 : 1];
}

bool EdgeClassification::unimportant(EdgeId e) const {
  const auto& c = classes_[index_of(e)];
  return c[0] == EdgeClass::Unimportant || c[1] == EdgeClass::Unimportant;
}

std::vector<EdgeId> EdgeClassification::edges_of_class(const DataGraph& g, EntityId v, EdgeClass c) const {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& t = g.edge(edges_[i]);
    if (t.subj == v && classes_[i][0] == c) out.push_back(edges_[i]);
    if (t.obj == v && classes_[i][1] == c) out.push_back(edges_[i]);
  }
  return out;
}

NeighborhoodGraph extract(const DataGraph& g, const Tuple& t, int d) {
  if (d < 1) throw InvalidArgument("path length threshold d must be >= 1");
  validate_tuple(g, t);

  NeighborhoodGraph h;
  h.query = t;
  h.d = d;

  std::deque<EntityId> queue;
  for (auto v : t) {
    h.dist_to_tuple.emplace(v, 0);
    queue.push_back(v);
  }
  std::set<EdgeId> edges;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    int du = h.dist_to_tuple.at(u);
    if (du + 1 > d) continue;
    for (auto e : g.incident(u)) {
      edges.insert(e);
      auto w = other_end(g.edge(e), u);
      if (h.dist_to_tuple.emplace(w, du + 1).second) queue.push_back(w);
    }
  }
  h.edges.assign(edges.begin(), edges.end());
  for (const auto& [v, dist] : h.dist_to_tuple) h.nodes.push_back(v);
  std::sort(h.nodes.begin(), h.nodes.end());

  // Query entities must chain together through pairs within distance d.
  if (t.size() > 1) {
    EdgeSubset sub(g, h.edges);
    std::vector<std::size_t> parent(t.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = i + 1; j < t.size(); ++j) {
        if (sub.distance_to(t[i], {t[j]}, EntityId{}, d) >= 0) parent[find(i)] = find(j);
      }
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (find(i) != find(0)) {
        throw DisconnectedTupleError("query entities '" + g.name(t[0]) + "' and '" + g.name(t[i]) +
                                     "' are not connected within distance " + std::to_string(d));
      }
    }
  }
  return h;
}

EdgeClassification classify_edges(const DataGraph& g, const NeighborhoodGraph& h) {
  EdgeSubset sub(g, h.edges);
  const std::unordered_set<EntityId> targets(h.query.begin(), h.query.end());

  // e = (v, w) is important at v iff a simple path of length <= d starts at v,
  // crosses e first and ends at a query entity other than v.
  auto important_at = [&](EntityId v, EntityId w) {
    if (targets.contains(w)) return true;
    if (h.d < 2) return false;
    auto it = h.dist_to_tuple.find(w);
    if (it == h.dist_to_tuple.end() || it->second > h.d - 1) return false;
    return sub.distance_to(w, targets, v, h.d - 1) >= 0;
  };

  std::vector<std::array<EdgeClass, 2>> classes(h.edges.size(), {EdgeClass::Neutral, EdgeClass::Neutral});
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const auto& t = g.edge(h.edges[i]);
    if (important_at(t.subj, t.obj)) classes[i][0] = EdgeClass::Important;
    if (important_at(t.obj, t.subj)) classes[i][1] = EdgeClass::Important;
  }

  // (node, label, outgoing) triples carried by important edges
  std::set<std::tuple<EntityId, LabelId, bool>> important_kinds;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const auto& t = g.edge(h.edges[i]);
    if (classes[i][0] == EdgeClass::Important) important_kinds.emplace(t.subj, t.label, true);
    if (classes[i][1] == EdgeClass::Important) important_kinds.emplace(t.obj, t.label, false);
  }
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const auto& t = g.edge(h.edges[i]);
    if (classes[i][0] != EdgeClass::Important && important_kinds.contains({t.subj, t.label, true})) {
      classes[i][0] = EdgeClass::Unimportant;
    }
    if (classes[i][1] != EdgeClass::Important && important_kinds.contains({t.obj, t.label, false})) {
      classes[i][1] = EdgeClass::Unimportant;
    }
  }
  return EdgeClassification(h.edges, std::move(classes));
}

NeighborhoodGraph reduce(const DataGraph& g, const NeighborhoodGraph& h, const EdgeClassification& classes) {
  std::vector<EdgeId> kept;
  for (auto e : h.edges) {
    if (!classes.unimportant(e)) kept.push_back(e);
  }
  EdgeSubset sub(g, kept);

  std::unordered_set<EntityId> reached{h.query.front()};
  std::deque<EntityId> queue{h.query.front()};
  std::set<EdgeId> component;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto e : sub.incident(u)) {
      component.insert(e);
      auto w = other_end(g.edge(e), u);
      if (reached.insert(w).second) queue.push_back(w);
    }
  }
  for (auto v : h.query) {
    if (!reached.contains(v)) {
      throw std::logic_error("edge reduction separated query entity '" + g.name(v) + "'");
    }
  }

  NeighborhoodGraph out;
  out.query = h.query;
  out.d = h.d;
  out.edges.assign(component.begin(), component.end());
  for (auto v : reached) out.dist_to_tuple.emplace(v, h.dist_to_tuple.at(v));
  out.nodes.assign(reached.begin(), reached.end());
  std::sort(out.nodes.begin(), out.nodes.end());
  return out;
}

void write_neighborhood(std::ostream& out, const DataGraph& g, const NeighborhoodGraph& h) {
  for (auto e : h.edges) {
    const auto& t = g.edge(e);
    out << g.name(t.subj) << '\t' << g.label_name(t.label) << '\t' << g.name(t.obj) << '\n';
  }
  for (auto v : h.nodes) out << "# dist " << g.name(v) << ' ' << h.dist_to_tuple.at(v) << '\n';
}

}  // namespace gqbe
