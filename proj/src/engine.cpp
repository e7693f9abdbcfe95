#include "gqbe/engine.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "gqbe/lattice.hpp"
#include "gqbe/neighborhood.hpp"

namespace gqbe {

void to_json(nlohmann::json& j, const QueryRequest& r) {
  j = {{"tuples", r.tuples}, {"k", r.k}, {"k_prime", r.k_prime}, {"d", r.d}, {"r", r.r}};
}

void from_json(const nlohmann::json& j, QueryRequest& r) {
  r = QueryRequest{};
  j.at("tuples").get_to(r.tuples);
  if (j.contains("k")) j.at("k").get_to(r.k);
  if (j.contains("k_prime")) j.at("k_prime").get_to(r.k_prime);
  if (j.contains("d")) j.at("d").get_to(r.d);
  if (j.contains("r")) j.at("r").get_to(r.r);
}

void to_json(nlohmann::json& j, const AnswerView& a) {
  j = {{"entities", a.entities}, {"score", a.score}, {"rank", a.rank}};
}

void from_json(const nlohmann::json& j, AnswerView& a) {
  j.at("entities").get_to(a.entities);
  j.at("score").get_to(a.score);
  j.at("rank").get_to(a.rank);
}

void to_json(nlohmann::json& j, const MqgEdgeView& e) {
  j = {{"index", e.index}, {"subj", e.subj},     {"label", e.label},
       {"obj", e.obj},     {"weight", e.weight}, {"depth", e.depth}};
}

void from_json(const nlohmann::json& j, MqgEdgeView& e) {
  j.at("index").get_to(e.index);
  j.at("subj").get_to(e.subj);
  j.at("label").get_to(e.label);
  j.at("obj").get_to(e.obj);
  j.at("weight").get_to(e.weight);
  j.at("depth").get_to(e.depth);
}

void to_json(nlohmann::json& j, const QueryStats& s) {
  j = {{"nodes_evaluated", s.nodes_evaluated}, {"nodes_pruned", s.nodes_pruned}, {"millis", s.millis}};
}

void from_json(const nlohmann::json& j, QueryStats& s) {
  j.at("nodes_evaluated").get_to(s.nodes_evaluated);
  j.at("nodes_pruned").get_to(s.nodes_pruned);
  j.at("millis").get_to(s.millis);
}

void to_json(nlohmann::json& j, const QueryResponse& r) {
  j = {{"answers", r.answers}, {"mqg", r.mqg}, {"stats", r.stats}};
}

void from_json(const nlohmann::json& j, QueryResponse& r) {
  j.at("answers").get_to(r.answers);
  j.at("mqg").get_to(r.mqg);
  j.at("stats").get_to(r.stats);
}

std::string answers_json(const std::vector<AnswerView>& answers) { return nlohmann::json(answers).dump(); }

std::vector<Tuple> resolve_tuples(const DataGraph& g, const std::vector<std::vector<std::string>>& tuples) {
  std::vector<std::string> unknown;
  std::vector<Tuple> out;
  for (const auto& names : tuples) {
    Tuple t;
    for (const auto& name : names) {
      if (auto id = g.find_entity(name)) {
        t.push_back(*id);
      } else if (std::find(unknown.begin(), unknown.end(), name) == unknown.end()) {
        unknown.push_back(name);
      }
    }
    out.push_back(std::move(t));
  }
  if (!unknown.empty()) throw NotFoundError(std::move(unknown));
  return out;
}

QueryResponse run_query(const DataGraph& g, const QueryRequest& request, const QueryDiagnostics& diag) {
  const auto start = std::chrono::steady_clock::now();
  if (request.tuples.empty()) throw InvalidArgument("at least one query tuple is required");
  const auto arity = request.tuples.front().size();
  if (arity == 0) throw InvalidArgument("query tuples must hold at least one entity");
  for (const auto& t : request.tuples) {
    if (t.size() != arity) throw InvalidArgument("query tuples differ in arity");
  }
  if (request.k < 1) throw InvalidArgument("k must be >= 1");
  if (request.k_prime < request.k) throw InvalidArgument("k_prime must be >= k");
  if (request.d < 1) throw InvalidArgument("d must be >= 1");
  const auto tuples = resolve_tuples(g, request.tuples);

  std::vector<MaximalQueryGraph> mqgs;
  for (const auto& t : tuples) {
    auto h = extract(g, t, request.d);
    auto reduced = reduce(g, h, classify_edges(g, h));
    if (diag.neighborhood) write_neighborhood(*diag.neighborhood, g, reduced);
    mqgs.push_back(discover(g, reduced, weigh(g, reduced), request.r));
  }
  MaximalQueryGraph mqg = mqgs.size() == 1 ? std::move(mqgs.front()) : merge(mqgs, request.r);
  if (diag.mqg) write_mqg(*diag.mqg, g, mqg);

  ExplorationOptions options;
  options.k = request.k;
  options.k_prime = request.k_prime;
  options.trace = diag.lattice_trace;
  auto result = best_first(g, mqg, tuples, options);

  QueryResponse resp;
  for (const auto& a : result.answers) {
    AnswerView view;
    for (auto e : a.tuple) view.entities.push_back(g.name(e));
    view.score = a.full_score;
    view.rank = a.rank;
    resp.answers.push_back(std::move(view));
  }
  for (std::size_t i = 0; i < mqg.edges.size(); ++i) {
    const auto& e = mqg.edges[i];
    resp.mqg.push_back({i, mqg.node_name(g, e.src), g.label_name(e.label), mqg.node_name(g, e.dst), e.weight, e.depth});
  }
  resp.stats.nodes_evaluated = result.stats.nodes_evaluated;
  resp.stats.nodes_pruned = result.stats.nodes_pruned;
  resp.stats.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return resp;
}

}  // namespace gqbe
