#pragma once

// Maximal query graph (MQG): a small, weighted, weakly connected subgraph of
// the reduced neighborhood that keeps the edges most characteristic of the
// query tuple. Edges are indexed 0..m-1 so lattice nodes can be bit-sets.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gqbe/graph_store.hpp"
#include "gqbe/neighborhood.hpp"

namespace gqbe {

// Upper bound on MQG edges; lattice nodes are 64-bit edge sets.
inline constexpr std::size_t kMaxMqgEdges = 64;
inline constexpr int kMaxTargetSize = static_cast<int>(kMaxMqgEdges / 2);

struct WeightedEdge {
  EdgeId edge;
  double weight = 0.0;
};

// w(e) = ief(e) / p(e) for every neighborhood edge.
std::vector<WeightedEdge> weigh(const DataGraph& g, const NeighborhoodGraph& h);

struct MqgNode {
  std::optional<EntityId> entity;  // empty for a virtual entity w_j
  int query_position = -1;         // tuple position for query nodes, -1 otherwise

  bool is_query() const { return query_position >= 0; }
  bool is_virtual() const { return !entity.has_value(); }
};

struct MqgEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  LabelId label;
  double weight = 0.0;  // discovery weight: ief/p, or c * w_max after merging
  int depth = 0;        // smallest distance to a query node within the MQG

  // Weight used for answer scoring: weight / max(depth, 1)^2.
  double scoring_weight() const {
    const double d = depth < 1 ? 1.0 : static_cast<double>(depth);
    return weight / (d * d);
  }
};

struct MaximalQueryGraph {
  std::vector<MqgNode> nodes;
  std::vector<MqgEdge> edges;
  std::vector<std::uint32_t> query_nodes;  // node index per tuple position
  std::uint64_t core_edges = 0;            // edges selected from the core graph

  std::size_t arity() const { return query_nodes.size(); }
  std::size_t degree(std::uint32_t node) const;
  // Entity name, or "w<j>" for virtual entities (1-based).
  std::string node_name(const DataGraph& g, std::uint32_t node) const;
};

// Greedy divide-and-conquer selection over the reduced neighborhood: one
// component of about r/(n+1) edges from the core graph and from each query
// entity's own subgraph. Throws InvalidArgument unless n+1 <= r <= 32.
MaximalQueryGraph discover(const DataGraph& g, const NeighborhoodGraph& reduced,
                           std::span<const WeightedEdge> weighted, int r);

// Sets every edge depth to its smallest endpoint distance from a query node.
MaximalQueryGraph assign_depths(MaximalQueryGraph m);

// Unifies per-tuple MQGs through virtual entities w_1..w_n. Edges with equal
// label and endpoints merge with weight c * w_max; the result is trimmed back
// towards r edges when larger. Throws InvalidArgument on arity mismatch.
MaximalQueryGraph merge(std::span<const MaximalQueryGraph> mqgs, int r);

// One `idx\tsubj\tlabel\tobj\tweight\tdepth` row per edge.
void write_mqg(std::ostream& out, const DataGraph& g, const MaximalQueryGraph& m);
std::string format_weight(double w);

}  // namespace gqbe
