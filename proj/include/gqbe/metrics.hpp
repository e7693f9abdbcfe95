#pragma once

// Ranking accuracy against ground-truth tables, plus batch suite support.
// Tuples are compared by entity names, position by position.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gqbe/graph_store.hpp"

namespace gqbe {

using NameTuple = std::vector<std::string>;

// Hits among the first k results divided by k, even when fewer than k
// results exist.
double precision_at_k(std::span<const NameTuple> results, std::span<const NameTuple> truth, std::size_t k);
// Sum of P@i over relevant ranks i <= k, divided by |truth|.
double average_precision(std::span<const NameTuple> results, std::span<const NameTuple> truth, std::size_t k);
// DCG with rel_1 undiscounted and rel_i / log2(i) afterwards, normalized by
// the DCG of min(k, |truth|) leading hits.
double ndcg(std::span<const NameTuple> results, std::span<const NameTuple> truth, std::size_t k);

struct SuiteCase {
  std::vector<NameTuple> query;
  std::vector<NameTuple> truth;
  std::size_t k = 10;
};

// One JSON object per line: {"query": [[...]], "truth": [[...]], "k": n}.
// Blank lines are skipped. Throws InvalidArgument on malformed lines or when
// a query tuple also appears in its truth table.
std::vector<SuiteCase> parse_suite(std::istream& in);

struct SuiteRow {
  std::size_t query_id = 0;
  double precision = 0.0;
  double avg_precision = 0.0;
  double ndcg = 0.0;
  std::size_t nodes_evaluated = 0;
  double millis = 0.0;
};

struct QueryDefaults {
  std::size_t k_prime = 100;
  int d = 2;
  int r = 15;
};

std::vector<SuiteRow> run_suite(const DataGraph& g, std::span<const SuiteCase> cases, const QueryDefaults& defaults);

// CSV with header query_id,P@k,AvgP,nDCG,nodes_evaluated,millis.
void write_report(std::ostream& out, std::span<const SuiteRow> rows);

}  // namespace gqbe
