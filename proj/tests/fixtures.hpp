#pragma once

// Shared test inputs: data files and random pipeline instances.

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gqbe/graph_store.hpp"
#include "gqbe/mqg.hpp"
#include "gqbe/neighborhood.hpp"
#include "oracle.hpp"

namespace fixtures {

inline std::string data_path(const std::string& file) { return std::string(GQBE_DATA_DIR) + "/" + file; }

inline gqbe::DataGraph load(const std::string& file) { return gqbe::DataGraph::load_file(data_path(file)); }

inline gqbe::Tuple tuple(const gqbe::DataGraph& g, std::initializer_list<const char*> names) {
  gqbe::Tuple t;
  for (auto n : names) t.push_back(g.entity(n));
  return t;
}

inline gqbe::MaximalQueryGraph mqg_for(const gqbe::DataGraph& g, const gqbe::Tuple& t, int d, int r) {
  auto h = gqbe::extract(g, t, d);
  auto reduced = gqbe::reduce(g, h, gqbe::classify_edges(g, h));
  return gqbe::discover(g, reduced, gqbe::weigh(g, reduced), r);
}

struct Instance {
  gqbe::DataGraph g;
  std::vector<gqbe::Tuple> tuples;
  gqbe::MaximalQueryGraph m;
};

// Random store, one or two query tuples, and the MQG built from them. Returns
// nullopt when the draw is unusable (disconnected tuple, oversized MQG).
inline std::optional<Instance> random_instance(std::mt19937_64& rng, std::size_t max_mqg_edges, bool two_tuples) {
  oracle::RandomGraphSpec spec;
  spec.entities = std::uniform_int_distribution<int>(6, 14)(rng);
  spec.labels = std::uniform_int_distribution<int>(1, 4)(rng);
  spec.max_edges = 60;
  auto g = gqbe::DataGraph::from_triples(oracle::random_triples(rng, spec));
  const std::size_t arity = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
  const int r = std::uniform_int_distribution<int>(static_cast<int>(arity) + 1, static_cast<int>(max_mqg_edges))(rng);

  std::vector<gqbe::Tuple> tuples;
  std::vector<gqbe::MaximalQueryGraph> mqgs;
  for (int i = 0; i < (two_tuples ? 2 : 1); ++i) {
    auto t = oracle::random_tuple(rng, g, arity, 2);
    if (!t || std::find(tuples.begin(), tuples.end(), *t) != tuples.end()) return std::nullopt;
    try {
      mqgs.push_back(mqg_for(g, *t, 2, r));
    } catch (const gqbe::DisconnectedTupleError&) {
      return std::nullopt;
    }
    tuples.push_back(*t);
  }
  auto m = mqgs.size() == 1 ? std::move(mqgs.front()) : gqbe::merge(mqgs, r);
  if (m.edges.empty() || m.edges.size() > max_mqg_edges) return std::nullopt;
  return Instance{std::move(g), std::move(tuples), std::move(m)};
}

}  // namespace fixtures
