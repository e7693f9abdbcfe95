#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "fixtures.hpp"
#include "gqbe/mqg.hpp"
#include "oracle.hpp"

using namespace gqbe;

namespace {

using EdgeKey = std::tuple<std::string, std::string, std::string>;

std::map<EdgeKey, double> weights_by_name(const DataGraph& g, const MaximalQueryGraph& m) {
  std::map<EdgeKey, double> out;
  for (const auto& e : m.edges) out[{m.node_name(g, e.src), g.label_name(e.label), m.node_name(g, e.dst)}] = e.weight;
  return out;
}

// Builds an MQG over named entities; the first `arity` names are the query
// entities in tuple order.
MaximalQueryGraph hand_mqg(const DataGraph& g, std::vector<std::string> names, std::size_t arity,
                           std::vector<std::tuple<int, std::string, int, double>> edges) {
  MaximalQueryGraph m;
  for (std::size_t i = 0; i < names.size(); ++i) {
    m.nodes.push_back({g.entity(names[i]), i < arity ? static_cast<int>(i) : -1});
    if (i < arity) m.query_nodes.push_back(static_cast<std::uint32_t>(i));
  }
  for (auto& [s, l, d, w] : edges) {
    m.edges.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(d), g.label(l), w, 0});
  }
  return assign_depths(std::move(m));
}

// Smallest undirected hop count from a query node to each node.
std::vector<int> node_depths(const MaximalQueryGraph& m) {
  std::vector<int> dist(m.nodes.size(), 1 << 20);
  for (auto q : m.query_nodes) dist[q] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : m.edges) {
      for (auto [a, b] : {std::pair{e.src, e.dst}, std::pair{e.dst, e.src}}) {
        if (dist[a] + 1 < dist[b]) {
          dist[b] = dist[a] + 1;
          changed = true;
        }
      }
    }
  }
  return dist;
}

}  // namespace

TEST_CASE("edge weight is ief over participation") {
  auto g = fixtures::load("founders.tsv");
  auto h = extract(g, fixtures::tuple(g, {"Jerry Yang", "Yahoo!"}), 2);
  for (const auto& w : weigh(g, h)) {
    const auto& t = g.edge(w.edge);
    const double total = static_cast<double>(g.edge_count());
    double same = 0, shared = 0;
    for (const auto& f : g.edges()) {
      same += f.label == t.label;
      shared += f.label == t.label && (f.subj == t.subj || f.obj == t.obj);
    }
    CHECK(w.weight == doctest::Approx(std::log(total / same) / shared).epsilon(1e-12));
  }
}

TEST_CASE("small reduced neighborhood becomes the MQG as is") {
  auto g = fixtures::load("founders.tsv");
  const auto t = fixtures::tuple(g, {"Jerry Yang", "Yahoo!"});
  auto m = fixtures::mqg_for(g, t, 2, 15);
  CHECK(m.edges.size() == 10);
  CHECK(m.arity() == 2);
  CHECK(m.node_name(g, m.query_nodes[0]) == "Jerry Yang");
  CHECK(m.node_name(g, m.query_nodes[1]) == "Yahoo!");

  std::ostringstream out;
  write_mqg(out, g, m);
  std::istringstream rows(out.str());
  std::string first;
  std::getline(rows, first);
  const double education = std::log(30.0 / 5.0) / 4.0;
  CHECK(first == "0\tJerry Yang\teducation\tStanford\t" + format_weight(education) + "\t0");

  auto small = fixtures::mqg_for(g, t, 2, 5);
  CHECK(small.edges.size() <= 10);
  CHECK(oracle::valid(small, (std::uint64_t{1} << small.edges.size()) - 1));
}

TEST_CASE("target size must fit the tuple and the lattice") {
  auto g = fixtures::load("founders.tsv");
  const auto t = fixtures::tuple(g, {"Jerry Yang", "Yahoo!"});
  auto h = extract(g, t, 2);
  auto reduced = reduce(g, h, classify_edges(g, h));
  auto w = weigh(g, reduced);
  CHECK_THROWS_AS(discover(g, reduced, w, 2), InvalidArgument);
  CHECK_THROWS_AS(discover(g, reduced, w, kMaxTargetSize + 1), InvalidArgument);
  CHECK_NOTHROW(discover(g, reduced, w, 3));
}

TEST_CASE("merging two founder MQGs") {
  auto g = fixtures::load("founders.tsv");
  auto woz = hand_mqg(g, {"Steve Wozniak", "Apple Inc.", "San Jose", "Cupertino", "USA"}, 2,
                      {{0, "founded", 1, 0.8}, {0, "places_lived", 2, 1.2}, {1, "headquartered_in", 3, 2.0},
                       {0, "nationality", 4, 0.4}});
  auto jerry = hand_mqg(g, {"Jerry Yang", "Yahoo!", "San Jose", "Sunnyvale", "Stanford"}, 2,
                        {{0, "founded", 1, 0.9}, {0, "places_lived", 2, 1.1}, {1, "headquartered_in", 3, 1.5},
                         {0, "education", 4, 0.45}});
  std::vector<MaximalQueryGraph> both{woz, jerry};
  auto merged = merge(both, 15);

  CHECK(weights_by_name(g, merged) == std::map<EdgeKey, double>{
                                          {{"w1", "founded", "w2"}, 2 * 0.9},
                                          {{"w1", "places_lived", "San Jose"}, 2 * 1.2},
                                          {{"w2", "headquartered_in", "Cupertino"}, 2.0},
                                          {{"w2", "headquartered_in", "Sunnyvale"}, 1.5},
                                          {{"w1", "nationality", "USA"}, 0.4},
                                          {{"w1", "education", "Stanford"}, 0.45},
                                      });
  CHECK(merged.nodes.size() == 7);
  for (auto q : merged.query_nodes) CHECK(merged.nodes[q].is_virtual());
  for (const auto& e : merged.edges) CHECK(e.depth == 0);
}

TEST_CASE("self-merge doubles weights and disjoint labels merge nothing") {
  auto g = fixtures::load("founders.tsv");
  auto m = fixtures::mqg_for(g, fixtures::tuple(g, {"Jerry Yang", "Yahoo!"}), 2, 15);
  std::vector<MaximalQueryGraph> twice{m, m};
  auto doubled = merge(twice, 15);
  std::vector<MaximalQueryGraph> once{m};
  auto single = merge(once, 15);
  auto base = weights_by_name(g, single);
  auto dbl = weights_by_name(g, doubled);
  REQUIRE(base.size() == m.edges.size());
  REQUIRE(dbl.size() == base.size());
  for (auto& [k, w] : base) CHECK(dbl.at(k) == doctest::Approx(2 * w).epsilon(1e-12));

  auto a = hand_mqg(g, {"Jerry Yang", "Yahoo!"}, 2, {{0, "founded", 1, 0.7}});
  auto b = hand_mqg(g, {"Bill Gates", "Microsoft", "USA"}, 2, {{0, "nationality", 2, 0.3}, {1, "founded", 0, 0.6}});
  std::vector<MaximalQueryGraph> ab{a, b};
  CHECK(weights_by_name(g, merge(ab, 15)) == std::map<EdgeKey, double>{
                                                 {{"w1", "founded", "w2"}, 0.7},
                                                 {{"w1", "nationality", "USA"}, 0.3},
                                                 {{"w2", "founded", "w1"}, 0.6},
                                             });
}

TEST_CASE("merge rejects mismatched arity") {
  auto g = fixtures::load("founders.tsv");
  auto a = hand_mqg(g, {"Jerry Yang", "Yahoo!"}, 2, {{0, "founded", 1, 0.7}});
  auto b = hand_mqg(g, {"Bill Gates", "USA"}, 1, {{0, "nationality", 1, 0.3}});
  std::vector<MaximalQueryGraph> ab{a, b};
  CHECK_THROWS_AS(merge(ab, 15), InvalidArgument);
  CHECK_THROWS_AS(merge(std::span<const MaximalQueryGraph>{}, 15), InvalidArgument);
}

TEST_CASE("random MQGs are valid, weighted from the neighborhood and depth-consistent") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int round = 0; round < 600 && checked < 200; ++round) {
    auto g = DataGraph::from_triples(oracle::random_triples(rng, {14, 3, 10, 60}));
    const std::size_t arity = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const int r = std::uniform_int_distribution<int>(static_cast<int>(arity) + 1, 20)(rng);
    auto t = oracle::random_tuple(rng, g, arity, 2);
    if (!t) continue;
    NeighborhoodGraph reduced;
    MaximalQueryGraph m;
    try {
      auto h = extract(g, *t, 2);
      reduced = reduce(g, h, classify_edges(g, h));
      m = discover(g, reduced, weigh(g, reduced), r);
    } catch (const DisconnectedTupleError&) {
      continue;
    }
    ++checked;
    REQUIRE(!m.edges.empty());
    CHECK(m.edges.size() <= 2 * static_cast<std::size_t>(r));
    if (reduced.edges.size() <= static_cast<std::size_t>(r)) CHECK(m.edges.size() == reduced.edges.size());
    CHECK(oracle::valid(m, (std::uint64_t{1} << m.edges.size()) - 1));
    for (std::size_t j = 0; j < arity; ++j) CHECK(m.nodes[m.query_nodes[j]].entity == (*t)[j]);

    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, double> hw;
    for (const auto& w : weigh(g, reduced)) {
      const auto& tr = g.edge(w.edge);
      hw[{tr.subj.value, tr.label.value, tr.obj.value}] = w.weight;
    }
    const auto depth = node_depths(m);
    for (const auto& e : m.edges) {
      auto it = hw.find({m.nodes[e.src].entity->value, e.label.value, m.nodes[e.dst].entity->value});
      REQUIRE(it != hw.end());
      CHECK(e.weight == it->second);
      CHECK(e.depth == std::min(depth[e.src], depth[e.dst]));
      if (m.nodes[e.src].is_query() || m.nodes[e.dst].is_query()) CHECK(e.depth == 0);
    }
  }
  CHECK(checked >= 150);
}

TEST_CASE("merge ignores input order") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int round = 0; round < 800 && checked < 60; ++round) {
    auto g = DataGraph::from_triples(oracle::random_triples(rng, {12, 3, 15, 50}));
    auto t1 = oracle::random_tuple(rng, g, 2, 2);
    auto t2 = oracle::random_tuple(rng, g, 2, 2);
    if (!t1 || !t2) continue;
    std::vector<MaximalQueryGraph> ms;
    try {
      ms.push_back(fixtures::mqg_for(g, *t1, 2, 8));
      ms.push_back(fixtures::mqg_for(g, *t2, 2, 8));
    } catch (const DisconnectedTupleError&) {
      continue;
    }
    ++checked;
    auto ab = merge(ms, 32);
    std::swap(ms[0], ms[1]);
    auto ba = merge(ms, 32);
    CHECK(weights_by_name(g, ab) == weights_by_name(g, ba));
    CHECK(oracle::valid(ab, (std::uint64_t{1} << ab.edges.size()) - 1));
    const auto depth = node_depths(ab);
    for (const auto& e : ab.edges) CHECK(e.depth == std::min(depth[e.src], depth[e.dst]));
  }
  CHECK(checked >= 40);
}
