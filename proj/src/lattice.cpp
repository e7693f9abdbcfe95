#include "gqbe/lattice.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <set>

#include "graph_util.hpp"

namespace gqbe {
namespace {

constexpr std::size_t kMaxSpanningTrees = 1'000'000;

std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

}  // namespace

std::vector<std::size_t> QueryGraphId::edges() const {
  std::vector<std::size_t> out;
  for (auto b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
  return out;
}

std::string QueryGraphId::hex() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(bits_));
  return buf;
}

Lattice::Lattice(const MaximalQueryGraph& mqg) : mqg_(&mqg), incident_(mqg.nodes.size(), 0) {
  if (mqg.edges.size() > kMaxMqgEdges) throw InvalidArgument("lattice supports at most 64 edges");
  if (mqg.query_nodes.empty()) throw InvalidArgument("maximal query graph has no query nodes");
  for (std::size_t i = 0; i < mqg.edges.size(); ++i) {
    incident_[mqg.edges[i].src] |= bit(i);
    incident_[mqg.edges[i].dst] |= bit(i);
    full_ |= bit(i);
  }
}

QueryGraphId Lattice::query_component(std::uint64_t bits) const {
  bits &= full_;
  std::uint64_t comp = incident_[mqg_->query_nodes.front()] & bits;
  std::uint64_t frontier = comp;
  while (frontier != 0) {
    std::uint64_t next = 0;
    for (auto b = frontier; b != 0; b &= b - 1) {
      const auto& e = mqg_->edges[static_cast<std::size_t>(std::countr_zero(b))];
      next |= (incident_[e.src] | incident_[e.dst]) & bits;
    }
    frontier = next & ~comp;
    comp |= next;
  }
  if (comp == 0) return {};
  for (auto q : mqg_->query_nodes) {
    if ((incident_[q] & comp) == 0) return {};
  }
  return QueryGraphId{comp};
}

bool Lattice::is_valid(QueryGraphId q) const {
  return !q.empty() && q.subset_of(root()) && query_component(q.bits()) == q;
}

std::vector<bool> Lattice::nodes_of(QueryGraphId q) const {
  std::vector<bool> out(mqg_->nodes.size(), false);
  for (auto i : q.edges()) out[mqg_->edges[i].src] = out[mqg_->edges[i].dst] = true;
  return out;
}

std::vector<QueryGraphId> Lattice::minimal_query_trees() const {
  const auto& m = *mqg_;
  std::set<std::uint64_t> found;
  if (m.query_nodes.size() == 1) {
    for (auto b = incident_[m.query_nodes.front()]; b != 0; b &= b - 1) found.insert(b & ~(b - 1));
    return {found.begin(), found.end()};
  }

  detail::EdgeEnds ends;
  for (const auto& e : m.edges) ends.emplace_back(e.src, e.dst);
  auto marked = detail::edges_between_terminals(m.nodes.size(), ends, m.query_nodes);
  std::vector<std::size_t> core;
  std::vector<bool> core_node(m.nodes.size(), false);
  for (std::size_t i = 0; i < marked.size(); ++i) {
    if (!marked[i]) continue;
    core.push_back(i);
    core_node[m.edges[i].src] = core_node[m.edges[i].dst] = true;
  }
  const auto node_count = static_cast<std::size_t>(std::count(core_node.begin(), core_node.end(), true));
  if (core.empty()) return {};
  const std::size_t need = node_count - 1;

  std::vector<bool> is_query(m.nodes.size(), false);
  for (auto q : m.query_nodes) is_query[q] = true;

  // Strips non-query leaves until every leaf is a query node.
  auto trim = [&](std::uint64_t tree) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto b = tree; b != 0; b &= b - 1) {
        const auto i = static_cast<std::size_t>(std::countr_zero(b));
        const auto& e = m.edges[i];
        for (auto v : {e.src, e.dst}) {
          if (!is_query[v] && std::popcount(incident_[v] & tree) == 1) {
            tree &= ~bit(i);
            changed = true;
            break;
          }
        }
      }
    }
    return tree;
  };

  auto spans = [&](std::uint64_t mask) {
    detail::DisjointSets sets(m.nodes.size());
    std::size_t joins = 0;
    for (auto b = mask; b != 0; b &= b - 1) {
      const auto& e = m.edges[static_cast<std::size_t>(std::countr_zero(b))];
      if (sets.find(e.src) != sets.find(e.dst)) ++joins;
      sets.add_edge(e.src, e.dst);
    }
    return joins == need;
  };

  std::size_t trees = 0;
  std::vector<std::uint64_t> suffix(core.size() + 1, 0);
  for (std::size_t i = core.size(); i-- > 0;) suffix[i] = suffix[i + 1] | bit(core[i]);

  std::function<void(std::size_t, std::uint64_t, std::size_t)> grow = [&](std::size_t i, std::uint64_t chosen,
                                                                          std::size_t count) {
    if (count == need) {
      if (++trees > kMaxSpanningTrees) throw ResourceLimitError("too many spanning trees in the core graph");
      found.insert(trim(chosen));
      return;
    }
    if (i == core.size() || count + (core.size() - i) < need) return;
    const auto& e = m.edges[core[i]];
    // include when it does not close a cycle
    detail::DisjointSets sets(m.nodes.size());
    for (auto b = chosen; b != 0; b &= b - 1) {
      const auto& c = m.edges[static_cast<std::size_t>(std::countr_zero(b))];
      sets.add_edge(c.src, c.dst);
    }
    if (sets.find(e.src) != sets.find(e.dst)) grow(i + 1, chosen | bit(core[i]), count + 1);
    if (spans(chosen | suffix[i + 1])) grow(i + 1, chosen, count);
  };
  grow(0, 0, 0);
  return {found.begin(), found.end()};
}

std::vector<QueryGraphId> Lattice::children(QueryGraphId q) const {
  std::vector<QueryGraphId> out;
  for (auto i : q.edges()) {
    auto c = q.without(i);
    if (is_valid(c)) out.push_back(c);
  }
  return out;
}

std::vector<QueryGraphId> Lattice::parents(QueryGraphId q) const {
  std::vector<QueryGraphId> out;
  auto nodes = nodes_of(q);
  for (std::size_t i = 0; i < mqg_->edges.size(); ++i) {
    if (q.contains(i)) continue;
    const auto& e = mqg_->edges[i];
    if (nodes[e.src] || nodes[e.dst]) out.push_back(q.with(i));
  }
  return out;
}

double Lattice::s_score(QueryGraphId q) const {
  double s = 0.0;
  for (auto i : q.edges()) s += mqg_->edges[i].scoring_weight();
  return s;
}

LatticeState::LatticeState(const Lattice& lattice, std::ostream* trace) : lattice_(&lattice), trace_(trace) {
  upper_.insert(lattice.root());
  this->trace(TraceEvent::UfAdd, lattice.root(), lattice.s_score(lattice.root()));
  for (auto q : lattice.minimal_query_trees()) add_to_frontier(q);
}

bool LatticeState::is_pruned(QueryGraphId q) const {
  return std::any_of(nulls_.begin(), nulls_.end(), [&](QueryGraphId n) { return n.subset_of(q); });
}

std::vector<QueryGraphId> LatticeState::lower_frontier() const {
  std::vector<QueryGraphId> out;
  for (const auto& [q, bound] : lower_) out.push_back(q);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<QueryGraphId> LatticeState::upper_boundary(QueryGraphId q) const {
  std::vector<QueryGraphId> out;
  for (auto u : upper_) {
    if (q.subset_of(u)) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double LatticeState::compute_bound(QueryGraphId q) const {
  double best = -std::numeric_limits<double>::infinity();
  for (auto u : upper_) {
    if (q.subset_of(u)) best = std::max(best, lattice_->s_score(u));
  }
  return best;
}

double LatticeState::upper_bound(QueryGraphId q) const {
  auto it = lower_.find(q);
  return it != lower_.end() ? it->second : compute_bound(q);
}

void LatticeState::push(QueryGraphId q) { heap_.push({lower_.at(q), q.size(), q.bits()}); }

void LatticeState::drop_stale() {
  while (!heap_.empty()) {
    const auto& top = heap_.top();
    auto it = lower_.find(QueryGraphId{top.bits});
    if (it != lower_.end() && it->second == top.bound) return;
    heap_.pop();
  }
}

std::optional<QueryGraphId> LatticeState::best() {
  drop_stale();
  if (heap_.empty()) return std::nullopt;
  return QueryGraphId{heap_.top().bits};
}

std::optional<double> LatticeState::max_upper_bound() {
  drop_stale();
  if (heap_.empty()) return std::nullopt;
  return heap_.top().bound;
}

void LatticeState::mark_evaluated(QueryGraphId q) {
  lower_.erase(q);
  evaluated_.insert(q);
}

void LatticeState::add_to_frontier(QueryGraphId q) {
  if (evaluated_.contains(q) || lower_.contains(q) || is_pruned(q)) return;
  lower_.emplace(q, compute_bound(q));
  push(q);
}

void LatticeState::record_null(QueryGraphId q) {
  lower_.erase(q);
  evaluated_.insert(q);
  std::erase_if(nulls_, [&](QueryGraphId n) { return q.subset_of(n); });
  nulls_.push_back(q);
  ++pruned_count_;
  trace(TraceEvent::Prune, q, lattice_->s_score(q));

  std::vector<QueryGraphId> removed;
  for (auto u : upper_) {
    if (q.subset_of(u)) removed.push_back(u);
  }
  std::sort(removed.begin(), removed.end());
  for (auto u : removed) upper_.erase(u);

  std::vector<QueryGraphId> frontier = lower_frontier();
  std::vector<QueryGraphId> dirty;
  for (auto f : frontier) {
    if (q.subset_of(f)) {
      lower_.erase(f);
      ++pruned_count_;
      trace(TraceEvent::Prune, f, lattice_->s_score(f));
      continue;
    }
    if (std::any_of(removed.begin(), removed.end(), [&](QueryGraphId u) { return f.subset_of(u); })) {
      dirty.push_back(f);
    }
  }

  // Candidate boundary nodes: drop one edge of the null node from a removed
  // boundary node and keep the part still holding the query nodes.
  std::set<QueryGraphId> batch;
  for (auto f : dirty) {
    const QueryGraphId missing{q.bits() & ~f.bits()};
    for (auto u : removed) {
      if (!f.subset_of(u)) continue;
      for (auto e : missing.edges()) {
        auto sub = lattice_->query_component(u.without(e).bits());
        if (!sub.empty()) batch.insert(sub);
      }
    }
  }
  std::vector<QueryGraphId> added;
  for (auto c : batch) {
    bool covered = std::any_of(upper_.begin(), upper_.end(), [&](QueryGraphId u) { return c.subset_of(u); }) ||
                   std::any_of(batch.begin(), batch.end(), [&](QueryGraphId o) { return c.strict_subset_of(o); });
    if (!covered) added.push_back(c);
  }
  std::erase_if(upper_, [&](QueryGraphId u) {
    return std::any_of(added.begin(), added.end(), [&](QueryGraphId a) { return u.strict_subset_of(a); });
  });
  for (auto a : added) {
    upper_.insert(a);
    trace(TraceEvent::UfAdd, a, lattice_->s_score(a));
  }

  for (auto f : dirty) {
    lower_[f] = compute_bound(f);
    push(f);
  }
}

void LatticeState::trace(TraceEvent ev, QueryGraphId q, double score) const {
  if (trace_ == nullptr) return;
  const char* tag = ev == TraceEvent::Eval ? "EVAL" : ev == TraceEvent::Prune ? "PRUNE" : "UFADD";
  *trace_ << tag << ' ' << q.hex() << ' ' << format_weight(score) << '\n';
}

}  // namespace gqbe
