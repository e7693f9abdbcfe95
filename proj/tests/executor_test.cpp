#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "gqbe/executor.hpp"
#include "oracle.hpp"

using namespace gqbe;

namespace {

std::vector<std::string> names(const DataGraph& g, const Tuple& t) {
  std::vector<std::string> out;
  for (auto e : t) out.push_back(g.name(e));
  return out;
}

}  // namespace

TEST_CASE("evaluation matches backtracking in any evaluation order") {
  std::mt19937_64 rng(7);
  int instances = 0;
  while (instances < 80) {
    auto inst = fixtures::random_instance(rng, 8, instances % 4 == 0);
    if (!inst) continue;
    ++instances;
    const auto& m = inst->m;
    Lattice lat(m);
    Evaluator ev(inst->g, lat, inst->tuples);
    auto order = oracle::all_query_graphs(m);
    std::shuffle(order.begin(), order.end(), rng);
    for (auto b : order) {
      const QueryGraphId q{b};
      const auto& rows = ev.evaluate(q);
      std::set<oracle::Key> got;
      const auto bound = lat.nodes_of(q);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = rows.row(i);
        std::set<std::uint32_t> used;
        for (std::size_t v = 0; v < row.size(); ++v) {
          CHECK((row[v] != kUnbound) == static_cast<bool>(bound[v]));
          if (row[v] != kUnbound) CHECK(used.insert(row[v]).second);
        }
        for (auto e : q.edges()) {
          const auto& me = m.edges[e];
          CHECK(inst->g.has_edge(EntityId{row[me.src]}, me.label, EntityId{row[me.dst]}));
        }
        got.insert(oracle::key_of(ev.project(row)));
      }
      CHECK(got == oracle::answers(inst->g, m, b, inst->tuples));
    }
  }
}

TEST_CASE("row cap raises a resource error") {
  auto g = fixtures::load("founders.tsv");
  auto m = fixtures::mqg_for(g, fixtures::tuple(g, {"Jerry Yang", "Yahoo!"}), 2, 15);
  Lattice lat(m);
  Evaluator ev(g, lat, {}, 2);
  CHECK_THROWS_AS(ev.evaluate(lat.root()), ResourceLimitError);
}

TEST_CASE("content score credits identical nodes") {
  auto g = fixtures::load("founders.tsv");
  const auto t = fixtures::tuple(g, {"Jerry Yang", "Yahoo!"});
  auto m = fixtures::mqg_for(g, t, 2, 15);
  Lattice lat(m);
  // Jerry's nationality edge alone, answered by David Filo's.
  std::size_t nat = m.edges.size();
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    if (g.label_name(m.edges[i].label) == "nationality" && m.nodes[m.edges[i].src].is_query()) nat = i;
  }
  REQUIRE(nat < m.edges.size());
  const auto& e = m.edges[nat];
  std::vector<std::uint32_t> mapping(m.nodes.size(), kUnbound);
  mapping[e.src] = g.entity("David Filo").value;
  mapping[e.dst] = g.entity("USA").value;
  // USA has two MQG edges (Jerry's and David's nationality).
  CHECK(c_score(m, QueryGraphId{}.with(nat), mapping) == doctest::Approx(e.scoring_weight() / 2.0));
  mapping[e.dst] = g.entity("California").value;
  CHECK(c_score(m, QueryGraphId{}.with(nat), mapping) == 0.0);
}

TEST_CASE("ranking orders by full score, then structure, then names") {
  auto g = fixtures::load("founders.tsv");
  auto t = [&](const char* a, const char* b) { return fixtures::tuple(g, {a, b}); };
  RecordMap records;
  auto add = [&](Tuple tuple, double s, double c) {
    records[tuple] = AnswerTupleRecord{tuple, s, {Witness{QueryGraphId{1}, s, c, {}}}};
  };
  add(t("Larry Page", "Google"), 3.0, 0.0);
  add(t("Sergey Brin", "Google"), 2.0, 1.0);
  add(t("Bill Gates", "Microsoft"), 2.5, 0.5);
  add(t("Steve Wozniak", "Apple Inc."), 1.0, 0.0);

  auto ranked = rank_answers(g, records, 3, 4);
  REQUIRE(ranked.size() == 3);
  CHECK(names(g, ranked[0].tuple) == std::vector<std::string>{"Larry Page", "Google"});
  CHECK(names(g, ranked[1].tuple) == std::vector<std::string>{"Bill Gates", "Microsoft"});
  CHECK(names(g, ranked[2].tuple) == std::vector<std::string>{"Sergey Brin", "Google"});
  CHECK(ranked[2].rank == 3);
  CHECK(ranked[1].full_score == 3.0);

  // k' cuts on structure score before content is considered.
  auto cut = rank_answers(g, records, 2, 2);
  CHECK(names(g, cut[1].tuple) == std::vector<std::string>{"Bill Gates", "Microsoft"});
  CHECK(top_records(g, records, 10).back()->best_structure == 1.0);
}

TEST_CASE("exploration on the founders graph") {
  auto g = fixtures::load("founders.tsv");
  const auto t = fixtures::tuple(g, {"Jerry Yang", "Yahoo!"});
  auto m = fixtures::mqg_for(g, t, 2, 15);
  std::vector<Tuple> excluded{t};

  ExplorationOptions exhaustive;
  exhaustive.early_termination = false;
  exhaustive.k = 1000;
  exhaustive.k_prime = 1000;
  auto best = best_first(g, m, excluded, exhaustive);
  auto level = breadth_first(g, m, excluded, exhaustive);
  CHECK_FALSE(best.records.contains(t));
  CHECK(best.records.size() == level.records.size());
  for (const auto& [tuple, rec] : level.records) CHECK(best.records.at(tuple).best_structure == rec.best_structure);

  auto fast = best_first(g, m, excluded, {});
  CHECK(fast.stats.nodes_evaluated <= best.stats.nodes_evaluated);
  CHECK(fast.answers.size() == 10);
  for (std::size_t i = 1; i < fast.answers.size(); ++i) CHECK(fast.answers[i - 1].full_score >= fast.answers[i].full_score);

  ExplorationOptions bad;
  bad.k = 0;
  CHECK_THROWS_AS(best_first(g, m, excluded, bad), InvalidArgument);
  bad.k = 5;
  bad.k_prime = 4;
  CHECK_THROWS_AS(best_first(g, m, excluded, bad), InvalidArgument);
}

TEST_CASE("witnesses are capped and ordered") {
  auto g = fixtures::load("founders.tsv");
  const auto t = fixtures::tuple(g, {"Jerry Yang", "Yahoo!"});
  auto m = fixtures::mqg_for(g, t, 2, 15);
  ExplorationOptions o;
  o.early_termination = false;
  o.witness_cap = 3;
  auto res = best_first(g, m, std::vector<Tuple>{t}, o);
  for (const auto& [tuple, rec] : res.records) {
    REQUIRE(!rec.witnesses.empty());
    CHECK(rec.witnesses.size() <= 3);
    CHECK(rec.witnesses.front().structure == rec.best_structure);
    for (std::size_t i = 1; i < rec.witnesses.size(); ++i) {
      const auto& a = rec.witnesses[i - 1];
      const auto& b = rec.witnesses[i];
      CHECK((a.structure > b.structure || (a.structure == b.structure && a.content >= b.content)));
    }
  }
}
