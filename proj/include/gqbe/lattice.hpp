#pragma once

// The query lattice: every weakly connected subgraph of the MQG that keeps
// all query nodes, ordered by edge-set inclusion. Nodes are 64-bit edge sets
// and are generated lazily; nothing here materializes the full lattice.

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gqbe/mqg.hpp"

namespace gqbe {

class QueryGraphId {
 public:
  constexpr QueryGraphId() = default;
  constexpr explicit QueryGraphId(std::uint64_t bits) : bits_(bits) {}

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t edge) const { return (bits_ >> edge) & 1u; }
  constexpr bool subset_of(QueryGraphId o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool strict_subset_of(QueryGraphId o) const { return subset_of(o) && bits_ != o.bits_; }
  constexpr QueryGraphId with(std::size_t edge) const { return QueryGraphId{bits_ | (std::uint64_t{1} << edge)}; }
  constexpr QueryGraphId without(std::size_t edge) const { return QueryGraphId{bits_ & ~(std::uint64_t{1} << edge)}; }

  std::vector<std::size_t> edges() const;
  std::string hex() const;

  constexpr auto operator<=>(const QueryGraphId&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

struct QueryGraphIdHash {
  std::size_t operator()(QueryGraphId q) const noexcept { return std::hash<std::uint64_t>{}(q.bits()); }
};

using QueryGraphSet = std::unordered_set<QueryGraphId, QueryGraphIdHash>;

// Structural view of one MQG. Cheap to copy-free share; holds a reference.
class Lattice {
 public:
  explicit Lattice(const MaximalQueryGraph& mqg);

  const MaximalQueryGraph& mqg() const { return *mqg_; }
  std::size_t edge_count() const { return mqg_->edges.size(); }
  QueryGraphId root() const { return QueryGraphId{full_}; }

  // Nonempty, weakly connected and covering every query node.
  bool is_valid(QueryGraphId q) const;
  // The weakly connected component of `bits` holding the query nodes, or an
  // empty id when the query nodes are split or absent.
  QueryGraphId query_component(std::uint64_t bits) const;
  // Nodes touched by the edge set, as a mask over MQG node indices.
  std::vector<bool> nodes_of(QueryGraphId q) const;

  std::vector<QueryGraphId> minimal_query_trees() const;
  std::vector<QueryGraphId> children(QueryGraphId q) const;
  std::vector<QueryGraphId> parents(QueryGraphId q) const;

  double s_score(QueryGraphId q) const;

 private:
  const MaximalQueryGraph* mqg_;
  std::uint64_t full_ = 0;
  std::vector<std::uint64_t> incident_;  // per node, mask of incident edges
};

enum class TraceEvent { Eval, Prune, UfAdd };

// Exploration bookkeeping for one best-first run: evaluated nodes, minimal
// null nodes (their supersets are pruned), the lower frontier with cached
// upper bounds, and the upper frontier of maximal unpruned nodes.
class LatticeState {
 public:
  // Seeds the lower frontier with the minimal query trees and the upper
  // frontier with the root.
  explicit LatticeState(const Lattice& lattice, std::ostream* trace = nullptr);

  const Lattice& lattice() const { return *lattice_; }

  bool is_evaluated(QueryGraphId q) const { return evaluated_.contains(q); }
  bool is_pruned(QueryGraphId q) const;
  bool in_lower_frontier(QueryGraphId q) const { return lower_.contains(q); }

  const QueryGraphSet& evaluated() const { return evaluated_; }
  const std::vector<QueryGraphId>& null_nodes() const { return nulls_; }
  const QueryGraphSet& upper_frontier() const { return upper_; }
  std::vector<QueryGraphId> lower_frontier() const;

  // UF nodes subsuming q.
  std::vector<QueryGraphId> upper_boundary(QueryGraphId q) const;
  // Largest structure score among q's upper boundary; cached for LF nodes.
  double upper_bound(QueryGraphId q) const;

  // LF node with the highest upper bound; ties go to fewer edges, then to the
  // lower bit pattern.
  std::optional<QueryGraphId> best();
  std::optional<double> max_upper_bound();

  // Removes q from the lower frontier and records it as evaluated.
  void mark_evaluated(QueryGraphId q);
  // Adds an unevaluated, unpruned node to the lower frontier.
  void add_to_frontier(QueryGraphId q);
  // Records an evaluated node without answers: prunes its supersets and
  // rebuilds the upper frontier around it.
  void record_null(QueryGraphId q);

  std::size_t pruned_count() const { return pruned_count_; }
  void trace(TraceEvent ev, QueryGraphId q, double score) const;

 private:
  struct Entry {
    double bound;
    int size;
    std::uint64_t bits;
  };
  struct EntryOrder {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;
      if (a.size != b.size) return a.size > b.size;
      return a.bits > b.bits;
    }
  };

  double compute_bound(QueryGraphId q) const;
  void push(QueryGraphId q);
  void drop_stale();

  const Lattice* lattice_;
  std::ostream* trace_;
  QueryGraphSet evaluated_;
  std::vector<QueryGraphId> nulls_;  // minimal null nodes
  std::unordered_map<QueryGraphId, double, QueryGraphIdHash> lower_;
  QueryGraphSet upper_;
  std::priority_queue<Entry, std::vector<Entry>, EntryOrder> heap_;
  std::size_t pruned_count_ = 0;
};

}  // namespace gqbe
