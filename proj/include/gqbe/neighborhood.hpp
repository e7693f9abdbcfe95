#pragma once

#include <array>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "gqbe/graph_store.hpp"

namespace gqbe {

// d-bounded neighborhood of a query tuple: every node within undirected
// distance d of some query entity, and every edge on such a path.
struct NeighborhoodGraph {
  Tuple query;
  int d = 2;
  std::vector<EdgeId> edges;    // ascending
  std::vector<EntityId> nodes;  // ascending
  // Shortest undirected distance in the data graph to the nearest query entity.
  std::unordered_map<EntityId, int> dist_to_tuple;

  bool has_node(EntityId v) const { return dist_to_tuple.contains(v); }
  bool has_edge(EdgeId e) const;
};

enum class EdgeClass { Important, Unimportant, Neutral };

// Classification of every neighborhood edge from the perspective of each of
// its two endpoints (IE(v) / UE(v) / the rest).
class EdgeClassification {
 public:
  EdgeClassification() = default;
  EdgeClassification(std::vector<EdgeId> edges, std::vector<std::array<EdgeClass, 2>> classes)
      : edges_(std::move(edges)), classes_(std::move(classes)) {}

  // Class of e as seen from its endpoint v.
  EdgeClass at(const DataGraph& g, EntityId v, EdgeId e) const;
  // Unimportant from the perspective of either end.
  bool unimportant(EdgeId e) const;

  std::vector<EdgeId> edges_of_class(const DataGraph& g, EntityId v, EdgeClass c) const;

 private:
  std::size_t index_of(EdgeId e) const;

  std::vector<EdgeId> edges_;                          // same order as the neighborhood
  std::vector<std::array<EdgeClass, 2>> classes_;      // [0] at subj, [1] at obj
};

// Throws DisconnectedTupleError when some query entities cannot be linked by a
// chain of query entities pairwise within distance d, InvalidArgument for
// d < 1, empty tuples or repeated entities.
NeighborhoodGraph extract(const DataGraph& g, const Tuple& t, int d);

EdgeClassification classify_edges(const DataGraph& g, const NeighborhoodGraph& h);

// Drops every edge unimportant from either end and keeps the weakly connected
// component holding the query entities.
NeighborhoodGraph reduce(const DataGraph& g, const NeighborhoodGraph& h, const EdgeClassification& classes);

// Triple rows followed by one `# dist <node> <k>` comment per node.
void write_neighborhood(std::ostream& out, const DataGraph& g, const NeighborhoodGraph& h);

}  // namespace gqbe
