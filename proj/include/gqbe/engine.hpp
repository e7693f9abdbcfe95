#pragma once

// Whole query pipeline behind the CLI and the HTTP service: resolve names,
// build and reduce each tuple's neighborhood, discover (and merge) the MQG,
// explore the lattice and rank the answers.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gqbe/executor.hpp"
#include "gqbe/graph_store.hpp"
#include "gqbe/mqg.hpp"

namespace gqbe {

struct QueryRequest {
  std::vector<std::vector<std::string>> tuples;
  std::size_t k = 10;
  std::size_t k_prime = 100;
  int d = 2;
  int r = 15;

  bool operator==(const QueryRequest&) const = default;
};

struct AnswerView {
  std::vector<std::string> entities;
  double score = 0.0;
  int rank = 0;

  bool operator==(const AnswerView&) const = default;
};

struct MqgEdgeView {
  std::size_t index = 0;
  std::string subj;
  std::string label;
  std::string obj;
  double weight = 0.0;
  int depth = 0;

  bool operator==(const MqgEdgeView&) const = default;
};

struct QueryStats {
  std::size_t nodes_evaluated = 0;
  std::size_t nodes_pruned = 0;
  double millis = 0.0;

  bool operator==(const QueryStats&) const = default;
};

struct QueryResponse {
  std::vector<AnswerView> answers;
  std::vector<MqgEdgeView> mqg;
  QueryStats stats;

  bool operator==(const QueryResponse&) const = default;
};

void to_json(nlohmann::json& j, const QueryRequest& r);
void from_json(const nlohmann::json& j, QueryRequest& r);
void to_json(nlohmann::json& j, const AnswerView& a);
void from_json(const nlohmann::json& j, AnswerView& a);
void to_json(nlohmann::json& j, const MqgEdgeView& e);
void from_json(const nlohmann::json& j, MqgEdgeView& e);
void to_json(nlohmann::json& j, const QueryStats& s);
void from_json(const nlohmann::json& j, QueryStats& s);
void to_json(nlohmann::json& j, const QueryResponse& r);
void from_json(const nlohmann::json& j, QueryResponse& r);

// Compact JSON array of {entities, score, rank}; shared by CLI and service.
std::string answers_json(const std::vector<AnswerView>& answers);

struct QueryDiagnostics {
  std::ostream* neighborhood = nullptr;  // reduced neighborhoods, one per tuple
  std::ostream* mqg = nullptr;           // final MQG rows
  std::ostream* lattice_trace = nullptr;
};

// Throws NotFoundError listing every unknown name, InvalidArgument for bad
// shapes or parameters, DisconnectedTupleError when a tuple has no query
// graph.
QueryResponse run_query(const DataGraph& g, const QueryRequest& request, const QueryDiagnostics& diag = {});

// Resolves every name, collecting unknown ones into a single NotFoundError.
std::vector<Tuple> resolve_tuples(const DataGraph& g, const std::vector<std::vector<std::string>>& tuples);

}  // namespace gqbe
