#pragma once

// Immutable, vertically partitioned data graph.
//
// Every distinct edge label owns a two-column (subj, obj) table plus two hash
// indexes keyed on subj and obj. Entity and label ids are assigned in sorted
// name order after ingestion, so the same triple set always yields the same
// ids regardless of row order.
//
// Per-edge statistics used by edge weighting are computed once at load:
//   ief(l) = ln(|E| / #edges labelled l)
//   p(e)   = #edges sharing e's label and its subject or its object (e included)

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gqbe/types.hpp"

namespace gqbe {

struct NamedTriple {
  std::string subj;
  std::string label;
  std::string obj;
};

class DataGraph {
 public:
  // Parses `<subject>\t<label>\t<object>` rows; `#` lines and blank lines are
  // skipped. Throws IngestError on malformed rows, self-loops or empty input.
  static DataGraph load(std::istream& in);
  static DataGraph load_file(const std::filesystem::path& path);
  static DataGraph from_triples(std::span<const NamedTriple> triples);

  std::size_t entity_count() const { return entity_names_.size(); }
  std::size_t label_count() const { return label_names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<EntityId> find_entity(std::string_view name) const;
  EntityId entity(std::string_view name) const;  // throws NotFoundError
  const std::string& name(EntityId id) const { return entity_names_.at(id.value); }

  std::optional<LabelId> find_label(std::string_view label) const;
  LabelId label(std::string_view label) const;  // throws NotFoundError
  const std::string& label_name(LabelId id) const { return label_names_.at(id.value); }

  const Triple& edge(EdgeId id) const { return edges_[id.value]; }
  std::span<const Triple> edges() const { return edges_; }
  std::optional<EdgeId> find_edge(EntityId subj, LabelId label, EntityId obj) const;

  // Edges incident to v in either direction, ascending edge id.
  std::span<const EdgeId> incident(EntityId v) const;

  // Rows of the label's partition table.
  std::span<const EdgeId> edges_with_label(LabelId label) const;
  std::size_t label_edge_count(LabelId label) const;

  // Hash-index probes; empty span when the key has no rows.
  std::span<const EntityId> objects_of(LabelId label, EntityId subj) const;
  std::span<const EntityId> subjects_of(LabelId label, EntityId obj) const;
  bool has_edge(EntityId subj, LabelId label, EntityId obj) const;

  double ief(LabelId label) const;  // throws NotFoundError for unknown ids
  std::uint32_t participation(EdgeId e) const { return participation_[e.value]; }
  std::uint32_t participation(EntityId subj, LabelId label, EntityId obj) const;

  // Case-insensitive prefix match, sorted by name, at most `limit` entries.
  std::vector<std::pair<EntityId, std::string>> autocomplete(std::string_view prefix, std::size_t limit) const;

 private:
  struct LabelTable {
    std::vector<EdgeId> rows;
    std::unordered_map<EntityId, std::vector<EntityId>> by_subj;
    std::unordered_map<EntityId, std::vector<EntityId>> by_obj;
  };

  DataGraph() = default;
  void build(std::vector<std::pair<NamedTriple, std::size_t>> rows);

  std::vector<std::string> entity_names_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::vector<std::string> label_names_;
  std::unordered_map<std::string, LabelId> label_ids_;

  std::vector<Triple> edges_;  // sorted (subj, label, obj), deduplicated
  std::vector<LabelTable> tables_;
  std::vector<std::uint32_t> incident_offsets_;
  std::vector<EdgeId> incident_edges_;

  std::vector<double> ief_;
  std::vector<std::uint32_t> participation_;

  // (lower-cased name, id), sorted
  std::vector<std::pair<std::string, EntityId>> completion_index_;
};

}  // namespace gqbe
