#include "gqbe/executor.hpp"

#include <algorithm>
#include <set>

namespace gqbe {
namespace {

bool holds(std::span<const std::uint32_t> row, std::uint32_t value) {
  return std::find(row.begin(), row.end(), value) != row.end();
}

bool names_less(const DataGraph& g, const Tuple& a, const Tuple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [&](EntityId x, EntityId y) { return g.name(x) < g.name(y); });
}

class ContentScorer {
 public:
  explicit ContentScorer(const MaximalQueryGraph& m) : m_(m), degree_(m.nodes.size(), 0) {
    for (const auto& e : m.edges) {
      ++degree_[e.src];
      ++degree_[e.dst];
    }
  }

  double operator()(QueryGraphId q, std::span<const std::uint32_t> mapping) const {
    double total = 0.0;
    for (auto i : q.edges()) {
      const auto& e = m_.edges[i];
      const bool same_src = identical(e.src, mapping);
      const bool same_dst = identical(e.dst, mapping);
      if (!same_src && !same_dst) continue;
      std::size_t deg;
      if (same_src && same_dst) {
        deg = std::min(degree_[e.src], degree_[e.dst]);
      } else {
        deg = same_src ? degree_[e.src] : degree_[e.dst];
      }
      total += e.scoring_weight() / static_cast<double>(deg);
    }
    return total;
  }

 private:
  bool identical(std::uint32_t node, std::span<const std::uint32_t> mapping) const {
    const auto& n = m_.nodes[node];
    return !n.is_virtual() && mapping[node] == n.entity->value;
  }

  const MaximalQueryGraph& m_;
  std::vector<std::size_t> degree_;
};

// Stage-one bookkeeping: best structure score and retained witnesses per
// answer tuple, plus the multiset of best scores for the termination test.
class RecordBook {
 public:
  RecordBook(const MaximalQueryGraph& m, std::size_t witness_cap) : scorer_(m), witness_cap_(witness_cap) {}

  void add(const Evaluator& ev, QueryGraphId q, double structure, const AnswerSet& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto row = rows.row(i);
      auto tuple = ev.project(row);
      auto [it, inserted] = records_.try_emplace(tuple);
      auto& rec = it->second;
      if (inserted) {
        rec.tuple = std::move(tuple);
        rec.best_structure = structure;
        scores_.insert(structure);
      } else if (structure > rec.best_structure) {
        scores_.erase(scores_.find(rec.best_structure));
        rec.best_structure = structure;
        scores_.insert(structure);
      }
      const double content = scorer_(q, row);
      auto better = [](const Witness& a, double s, double c) { return a.structure > s || (a.structure == s && a.content >= c); };
      if (rec.witnesses.size() >= witness_cap_ && better(rec.witnesses.back(), structure, content)) continue;
      auto pos = std::find_if(rec.witnesses.begin(), rec.witnesses.end(),
                              [&](const Witness& w) { return !better(w, structure, content); });
      rec.witnesses.insert(pos, Witness{q, structure, content, {row.begin(), row.end()}});
      if (rec.witnesses.size() > witness_cap_) rec.witnesses.pop_back();
    }
  }

  // k-th best structure score among tuples, if at least k tuples exist.
  std::optional<double> kth_score(std::size_t k) const {
    if (k == 0 || scores_.size() < k) return std::nullopt;
    return *std::next(scores_.rbegin(), static_cast<std::ptrdiff_t>(k - 1));
  }

  RecordMap take() { return std::move(records_); }

 private:
  ContentScorer scorer_;
  std::size_t witness_cap_;
  RecordMap records_;
  std::multiset<double> scores_;
};

void validate(const MaximalQueryGraph& m, const ExplorationOptions& options) {
  if (options.k < 1) throw InvalidArgument("k must be >= 1");
  if (options.k_prime < options.k) throw InvalidArgument("k_prime must be >= k");
  if (m.edges.empty()) throw InvalidArgument("maximal query graph has no edges");
}

}  // namespace

Evaluator::Evaluator(const DataGraph& g, const Lattice& lattice, std::vector<Tuple> excluded, std::size_t row_cap)
    : g_(&g), lattice_(&lattice), excluded_(std::move(excluded)), row_cap_(row_cap) {}

const AnswerSet* Evaluator::materialized(QueryGraphId q) const {
  auto it = cache_.find(q);
  return it == cache_.end() ? nullptr : &it->second;
}

Tuple Evaluator::project(std::span<const std::uint32_t> row) const {
  Tuple t;
  for (auto q : lattice_->mqg().query_nodes) t.emplace_back(row[q]);
  return t;
}

void Evaluator::check_cap(std::size_t rows) const {
  if (rows > row_cap_) {
    throw ResourceLimitError("intermediate answers exceed " + std::to_string(row_cap_) + " rows");
  }
}

const AnswerSet& Evaluator::evaluate(QueryGraphId q) {
  if (auto* done = materialized(q)) return *done;

  const AnswerSet* base = nullptr;
  std::size_t added = 0;
  for (auto e : q.edges()) {
    auto* child = materialized(q.without(e));
    if (child && (!base || child->size() < base->size())) {
      base = child;
      added = e;
    }
  }
  AnswerSet rows = base ? extend(*base, q.without(added), added) : join_from_scratch(q);

  if (!excluded_.empty()) {
    AnswerSet kept(rows.width());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto t = project(rows.row(i));
      if (std::find(excluded_.begin(), excluded_.end(), t) == excluded_.end()) kept.append(rows.row(i));
    }
    rows = std::move(kept);
  }
  return cache_.emplace(q, std::move(rows)).first->second;
}

AnswerSet Evaluator::extend(const AnswerSet& base, QueryGraphId base_id, std::size_t edge) const {
  const auto& m = lattice_->mqg();
  const auto bound = lattice_->nodes_of(base_id);
  const auto& e = m.edges[edge];
  AnswerSet out(base.width());
  std::vector<std::uint32_t> scratch(base.width());

  for (std::size_t i = 0; i < base.size(); ++i) {
    auto row = base.row(i);
    if (bound[e.src] && bound[e.dst]) {
      if (g_->has_edge(EntityId{row[e.src]}, e.label, EntityId{row[e.dst]})) out.append(row);
      continue;
    }
    const bool from_src = bound[e.src];
    const auto probe = from_src ? g_->objects_of(e.label, EntityId{row[e.src]})
                                : g_->subjects_of(e.label, EntityId{row[e.dst]});
    const auto slot = from_src ? e.dst : e.src;
    for (auto v : probe) {
      if (holds(row, v.value)) continue;
      std::copy(row.begin(), row.end(), scratch.begin());
      scratch[slot] = v.value;
      out.append(scratch);
    }
    check_cap(out.size());
  }
  return out;
}

AnswerSet Evaluator::join_from_scratch(QueryGraphId q) const {
  const auto& m = lattice_->mqg();
  auto remaining = q.edges();
  auto cheapest = [&](auto&& usable) {
    std::size_t best = remaining.size();
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (!usable(remaining[i])) continue;
      if (best == remaining.size() ||
          g_->label_edge_count(m.edges[remaining[i]].label) < g_->label_edge_count(m.edges[remaining[best]].label)) {
        best = i;
      }
    }
    return best;
  };

  const auto first_at = cheapest([](std::size_t) { return true; });
  const auto first = remaining[first_at];
  remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(first_at));
  const auto& e0 = m.edges[first];

  AnswerSet rows(m.nodes.size());
  std::vector<std::uint32_t> scratch(m.nodes.size(), kUnbound);
  for (auto id : g_->edges_with_label(e0.label)) {
    const auto& t = g_->edge(id);
    scratch[e0.src] = t.subj.value;
    scratch[e0.dst] = t.obj.value;
    rows.append(scratch);
  }
  check_cap(rows.size());

  QueryGraphId done{std::uint64_t{1} << first};
  while (!remaining.empty() && !rows.empty()) {
    const auto bound = lattice_->nodes_of(done);
    const auto at = cheapest([&](std::size_t i) { return bound[m.edges[i].src] || bound[m.edges[i].dst]; });
    if (at == remaining.size()) throw InvalidArgument("query graph is not weakly connected");
    const auto next = remaining[at];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(at));
    rows = extend(rows, done, next);
    done = done.with(next);
  }
  if (!remaining.empty()) return AnswerSet(m.nodes.size());
  return rows;
}

double c_score(const MaximalQueryGraph& m, QueryGraphId q, std::span<const std::uint32_t> mapping) {
  return ContentScorer(m)(q, mapping);
}

std::vector<const AnswerTupleRecord*> top_records(const DataGraph& g, const RecordMap& records, std::size_t limit) {
  std::vector<const AnswerTupleRecord*> out;
  out.reserve(records.size());
  for (const auto& [t, rec] : records) out.push_back(&rec);
  std::sort(out.begin(), out.end(), [&](const AnswerTupleRecord* a, const AnswerTupleRecord* b) {
    if (a->best_structure != b->best_structure) return a->best_structure > b->best_structure;
    return names_less(g, a->tuple, b->tuple);
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::vector<ScoredResult> rank_answers(const DataGraph& g, const RecordMap& records, std::size_t k,
                                       std::size_t k_prime) {
  std::vector<ScoredResult> out;
  for (const auto* rec : top_records(g, records, k_prime)) {
    ScoredResult r{rec->tuple, rec->best_structure, rec->best_structure, 0};
    for (const auto& w : rec->witnesses) r.full_score = std::max(r.full_score, w.structure + w.content);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [&](const ScoredResult& a, const ScoredResult& b) {
    if (a.full_score != b.full_score) return a.full_score > b.full_score;
    if (a.structure_score != b.structure_score) return a.structure_score > b.structure_score;
    return names_less(g, a.tuple, b.tuple);
  });
  if (out.size() > k) out.resize(k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

ExplorationResult best_first(const DataGraph& g, const MaximalQueryGraph& m, std::span<const Tuple> excluded,
                             const ExplorationOptions& options) {
  validate(m, options);
  const Lattice lattice(m);
  LatticeState state(lattice, options.trace);
  Evaluator ev(g, lattice, {excluded.begin(), excluded.end()}, options.row_cap);
  RecordBook book(m, options.witness_cap);
  ExplorationResult result;

  while (auto next = state.best()) {
    const auto q = *next;
    if (options.early_termination) {
      auto kth = book.kth_score(options.k_prime);
      if (kth && *kth >= *state.max_upper_bound()) {
        result.stats.terminated_early = true;
        break;
      }
    }
    state.trace(TraceEvent::Eval, q, state.upper_bound(q));
    const auto& rows = ev.evaluate(q);
    state.mark_evaluated(q);
    ++result.stats.nodes_evaluated;
    result.evaluated.push_back(q);
    if (rows.empty()) {
      result.null_nodes.push_back(q);
      state.record_null(q);
      ev.release(q);
      continue;
    }
    book.add(ev, q, lattice.s_score(q), rows);
    for (auto p : lattice.parents(q)) state.add_to_frontier(p);
  }

  result.stats.nodes_pruned = state.pruned_count();
  result.records = book.take();
  result.answers = rank_answers(g, result.records, options.k, options.k_prime);
  return result;
}

ExplorationResult breadth_first(const DataGraph& g, const MaximalQueryGraph& m, std::span<const Tuple> excluded,
                                const ExplorationOptions& options) {
  validate(m, options);
  const Lattice lattice(m);
  Evaluator ev(g, lattice, {excluded.begin(), excluded.end()}, options.row_cap);
  RecordBook book(m, options.witness_cap);
  ExplorationResult result;

  auto level_order = [](QueryGraphId a, QueryGraphId b) {
    return std::make_pair(a.size(), a.bits()) < std::make_pair(b.size(), b.bits());
  };
  std::set<QueryGraphId, decltype(level_order)> queue(level_order);
  QueryGraphSet seen;
  for (auto t : lattice.minimal_query_trees()) {
    queue.insert(t);
    seen.insert(t);
  }
  std::vector<QueryGraphId> nulls;
  while (!queue.empty()) {
    const auto q = *queue.begin();
    queue.erase(queue.begin());
    if (std::any_of(nulls.begin(), nulls.end(), [&](QueryGraphId n) { return n.subset_of(q); })) {
      ++result.stats.nodes_pruned;
      continue;
    }
    const auto& rows = ev.evaluate(q);
    ++result.stats.nodes_evaluated;
    result.evaluated.push_back(q);
    if (rows.empty()) {
      nulls.push_back(q);
      result.null_nodes.push_back(q);
      ++result.stats.nodes_pruned;
      ev.release(q);
      continue;
    }
    book.add(ev, q, lattice.s_score(q), rows);
    for (auto p : lattice.parents(q)) {
      if (seen.insert(p).second) queue.insert(p);
    }
  }

  result.records = book.take();
  result.answers = rank_answers(g, result.records, options.k, options.k_prime);
  return result;
}

}  // namespace gqbe
