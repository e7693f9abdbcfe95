#include "gqbe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "gqbe/engine.hpp"

namespace gqbe {
namespace {

std::set<NameTuple> as_set(std::span<const NameTuple> truth) { return {truth.begin(), truth.end()}; }

void require_k(std::size_t k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
}

void require_truth(std::span<const NameTuple> truth) {
  if (truth.empty()) throw InvalidArgument("ground truth is empty");
}

std::vector<NameTuple> tuples_from(const nlohmann::json& j, const char* field, std::size_t line) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw InvalidArgument("suite line " + std::to_string(line) + ": missing array '" + field + "'");
  }
  return j[field].get<std::vector<NameTuple>>();
}

}  // namespace

double precision_at_k(std::span<const NameTuple> results, std::span<const NameTuple> truth, std::size_t k) {
  require_k(k);
  const auto relevant = as_set(truth);
  const auto n = std::min(k, results.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += relevant.contains(results[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(std::span<const NameTuple> results, std::span<const NameTuple> truth, std::size_t k) {
  require_k(k);
  require_truth(truth);
  const auto relevant = as_set(truth);
  const auto n = std::min(k, results.size());
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!relevant.contains(results[i])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

double ndcg(std::span<const NameTuple> results, std::span<const NameTuple> truth, std::size_t k) {
  require_k(k);
  require_truth(truth);
  const auto relevant = as_set(truth);
  auto gain = [](std::size_t rank) { return rank == 1 ? 1.0 : 1.0 / std::log2(static_cast<double>(rank)); };
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, results.size()); ++i) {
    if (relevant.contains(results[i])) dcg += gain(i + 1);
  }
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i) ideal += gain(i + 1);
  return dcg / ideal;
}

std::vector<SuiteCase> parse_suite(std::istream& in) {
  std::vector<SuiteCase> cases;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("suite line " + std::to_string(line_no) + ": " + e.what());
    }
    SuiteCase c;
    try {
      c.query = tuples_from(j, "query", line_no);
      c.truth = tuples_from(j, "truth", line_no);
      if (j.contains("k")) c.k = j.at("k").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("suite line " + std::to_string(line_no) + ": " + e.what());
    }
    if (c.query.empty()) throw InvalidArgument("suite line " + std::to_string(line_no) + ": empty query");
    if (c.k < 1) throw InvalidArgument("suite line " + std::to_string(line_no) + ": k must be >= 1");
    const auto truth = as_set(c.truth);
    for (const auto& q : c.query) {
      if (truth.contains(q)) {
        throw InvalidArgument("suite line " + std::to_string(line_no) + ": query tuple also listed as truth");
      }
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<SuiteRow> run_suite(const DataGraph& g, std::span<const SuiteCase> cases, const QueryDefaults& defaults) {
  std::vector<SuiteRow> rows;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    QueryRequest req;
    req.tuples = c.query;
    req.k = c.k;
    req.k_prime = std::max(defaults.k_prime, c.k);
    req.d = defaults.d;
    req.r = defaults.r;
    QueryResponse resp;
    try {
      resp = run_query(g, req);
    } catch (const Error& e) {
      throw InvalidArgument("suite query " + std::to_string(i + 1) + ": " + e.what());
    }
    std::vector<NameTuple> results;
    for (const auto& a : resp.answers) results.push_back(a.entities);
    SuiteRow row;
    row.query_id = i + 1;
    row.precision = precision_at_k(results, c.truth, c.k);
    row.avg_precision = c.truth.empty() ? 0.0 : average_precision(results, c.truth, c.k);
    row.ndcg = c.truth.empty() ? 0.0 : ndcg(results, c.truth, c.k);
    row.nodes_evaluated = resp.stats.nodes_evaluated;
    row.millis = resp.stats.millis;
    rows.push_back(row);
  }
  return rows;
}

void write_report(std::ostream& out, std::span<const SuiteRow> rows) {
  out << "query_id,P@k,AvgP,nDCG,nodes_evaluated,millis\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%zu,%.3f\n", r.query_id, r.precision, r.avg_precision, r.ndcg,
                  r.nodes_evaluated, r.millis);
    out << buf;
  }
}

}  // namespace gqbe
