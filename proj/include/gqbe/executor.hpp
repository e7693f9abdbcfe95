#pragma once

// Query-graph evaluation by hash joins over the label partitions, best-first
// lattice exploration with upper-bound ordering and early termination, and
// the final two-stage ranking of answer tuples.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "gqbe/graph_store.hpp"
#include "gqbe/lattice.hpp"
#include "gqbe/mqg.hpp"

namespace gqbe {

inline constexpr std::uint32_t kUnbound = std::numeric_limits<std::uint32_t>::max();

// Answer graphs of one query graph, one row per mapping. Each row holds an
// entity id per MQG node; nodes outside the query graph stay kUnbound.
class AnswerSet {
 public:
  AnswerSet() = default;
  explicit AnswerSet(std::size_t width) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return width_ == 0 ? 0 : cells_.size() / width_; }
  bool empty() const { return cells_.empty(); }

  std::span<const std::uint32_t> row(std::size_t i) const { return {cells_.data() + i * width_, width_}; }
  void append(std::span<const std::uint32_t> row) { cells_.insert(cells_.end(), row.begin(), row.end()); }
  void reserve(std::size_t rows) { cells_.reserve(rows * width_); }

 private:
  std::size_t width_ = 0;
  std::vector<std::uint32_t> cells_;
};

struct Witness {
  QueryGraphId query;
  double structure = 0.0;
  double content = 0.0;
  std::vector<std::uint32_t> mapping;  // entity per MQG node, kUnbound outside the query graph
};

struct AnswerTupleRecord {
  Tuple tuple;
  double best_structure = 0.0;
  std::vector<Witness> witnesses;  // by structure desc, then content desc
};

struct ScoredResult {
  Tuple tuple;
  double full_score = 0.0;
  double structure_score = 0.0;
  int rank = 0;
};

struct ExplorationOptions {
  std::size_t k = 10;
  std::size_t k_prime = 100;
  bool early_termination = true;
  std::size_t row_cap = 2'000'000;  // per materialized answer set
  std::size_t witness_cap = 16;
  std::ostream* trace = nullptr;
};

struct ExplorationStats {
  std::size_t nodes_evaluated = 0;
  std::size_t nodes_pruned = 0;
  bool terminated_early = false;
};

using RecordMap = std::unordered_map<Tuple, AnswerTupleRecord, TupleHash>;

struct ExplorationResult {
  std::vector<ScoredResult> answers;
  RecordMap records;  // every tuple seen during stage one
  ExplorationStats stats;
  std::vector<QueryGraphId> evaluated;   // in evaluation order
  std::vector<QueryGraphId> null_nodes;  // evaluated without answers
};

// Evaluates query graphs against the data graph and keeps their answers for
// reuse by parents. Rows projecting onto an excluded tuple are dropped.
class Evaluator {
 public:
  Evaluator(const DataGraph& g, const Lattice& lattice, std::vector<Tuple> excluded,
            std::size_t row_cap = ExplorationOptions{}.row_cap);

  // Joins from scratch for nodes with no materialized child, otherwise
  // extends the smallest materialized child by the one missing edge.
  const AnswerSet& evaluate(QueryGraphId q);
  const AnswerSet* materialized(QueryGraphId q) const;
  void release(QueryGraphId q) { cache_.erase(q); }

  Tuple project(std::span<const std::uint32_t> row) const;

 private:
  AnswerSet join_from_scratch(QueryGraphId q) const;
  AnswerSet extend(const AnswerSet& base, QueryGraphId base_id, std::size_t edge) const;
  void check_cap(std::size_t rows) const;

  const DataGraph* g_;
  const Lattice* lattice_;
  std::vector<Tuple> excluded_;
  std::size_t row_cap_;
  std::unordered_map<QueryGraphId, AnswerSet, QueryGraphIdHash> cache_;
};

// Content credit for answer nodes identical to their MQG counterparts.
double c_score(const MaximalQueryGraph& m, QueryGraphId q, std::span<const std::uint32_t> mapping);

// Best-first exploration of the lattice followed by re-ranking of the top
// k_prime tuples on structure plus content score.
ExplorationResult best_first(const DataGraph& g, const MaximalQueryGraph& m, std::span<const Tuple> excluded,
                             const ExplorationOptions& options);

// Level-order baseline: evaluates every non-pruned node reachable from the
// minimal query trees, without early termination.
ExplorationResult breadth_first(const DataGraph& g, const MaximalQueryGraph& m, std::span<const Tuple> excluded,
                                const ExplorationOptions& options);

// Keeps the k_prime best records by structure score, scores each by its best
// witness and returns the top k. Ties: structure score, then entity names.
std::vector<ScoredResult> rank_answers(const DataGraph& g, const RecordMap& records, std::size_t k,
                                       std::size_t k_prime);

// Stage-one order: best structure score desc, then entity names.
std::vector<const AnswerTupleRecord*> top_records(const DataGraph& g, const RecordMap& records, std::size_t limit);

}  // namespace gqbe
