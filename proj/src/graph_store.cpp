#include "gqbe/graph_store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>

namespace gqbe {
namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

DataGraph DataGraph::load(std::istream& in) {
  std::vector<std::pair<NamedTriple, std::size_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw IngestError("line " + std::to_string(line_no) + ": expected 3 tab-separated fields", line_no);
    }
    NamedTriple t{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)};
    if (t.subj.empty() || t.label.empty() || t.obj.empty()) {
      throw IngestError("line " + std::to_string(line_no) + ": empty field", line_no);
    }
    rows.emplace_back(std::move(t), line_no);
  }
  DataGraph g;
  g.build(std::move(rows));
  return g;
}

DataGraph DataGraph::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string(), 0);
  return load(in);
}

DataGraph DataGraph::from_triples(std::span<const NamedTriple> triples) {
  std::vector<std::pair<NamedTriple, std::size_t>> rows;
  rows.reserve(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    if (t.subj.empty() || t.label.empty() || t.obj.empty()) {
      throw IngestError("row " + std::to_string(i + 1) + ": empty field", i + 1);
    }
    rows.emplace_back(t, i + 1);
  }
  DataGraph g;
  g.build(std::move(rows));
  return g;
}

void DataGraph::build(std::vector<std::pair<NamedTriple, std::size_t>> rows) {
  if (rows.empty()) throw IngestError("no triples in source", 0);
  for (const auto& [t, line] : rows) {
    if (t.subj == t.obj) {
      throw IngestError("line " + std::to_string(line) + ": self-loop on '" + t.subj + "'", line);
    }
  }

  for (const auto& [t, line] : rows) {
    entity_names_.push_back(t.subj);
    entity_names_.push_back(t.obj);
    label_names_.push_back(t.label);
  }
  auto sort_unique = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(entity_names_);
  sort_unique(label_names_);
  for (std::uint32_t i = 0; i < entity_names_.size(); ++i) entity_ids_.emplace(entity_names_[i], EntityId{i});
  for (std::uint32_t i = 0; i < label_names_.size(); ++i) label_ids_.emplace(label_names_[i], LabelId{i});

  edges_.reserve(rows.size());
  for (const auto& [t, line] : rows) {
    edges_.push_back({entity_ids_.at(t.subj), label_ids_.at(t.label), entity_ids_.at(t.obj)});
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  tables_.resize(label_names_.size());
  std::vector<std::uint32_t> degree(entity_names_.size() + 1, 0);
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    auto& table = tables_[e.label.value];
    table.rows.push_back(EdgeId{i});
    table.by_subj[e.subj].push_back(e.obj);
    table.by_obj[e.obj].push_back(e.subj);
    ++degree[e.subj.value];
    ++degree[e.obj.value];
  }

  incident_offsets_.assign(entity_names_.size() + 1, 0);
  for (std::size_t v = 0; v < entity_names_.size(); ++v) incident_offsets_[v + 1] = incident_offsets_[v] + degree[v];
  incident_edges_.resize(incident_offsets_.back());
  std::vector<std::uint32_t> fill(incident_offsets_.begin(), incident_offsets_.end() - 1);
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    incident_edges_[fill[edges_[i].subj.value]++] = EdgeId{i};
    incident_edges_[fill[edges_[i].obj.value]++] = EdgeId{i};
  }

  const double total = static_cast<double>(edges_.size());
  ief_.resize(label_names_.size());
  for (std::size_t l = 0; l < tables_.size(); ++l) {
    ief_[l] = std::log(total / static_cast<double>(tables_[l].rows.size()));
  }

  participation_.resize(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const auto& table = tables_[e.label.value];
    // out(subj) and in(obj) overlap exactly in e itself (no duplicate triples)
    participation_[i] = static_cast<std::uint32_t>(table.by_subj.at(e.subj).size() + table.by_obj.at(e.obj).size() - 1);
  }

  completion_index_.reserve(entity_names_.size());
  for (std::uint32_t i = 0; i < entity_names_.size(); ++i) {
    completion_index_.emplace_back(to_lower(entity_names_[i]), EntityId{i});
  }
  std::sort(completion_index_.begin(), completion_index_.end(), [this](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return entity_names_[a.second.value] < entity_names_[b.second.value];
  });
}

std::optional<EntityId> DataGraph::find_entity(std::string_view name) const {
  auto it = entity_ids_.find(std::string(name));
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

EntityId DataGraph::entity(std::string_view name) const {
  if (auto id = find_entity(name)) return *id;
  throw NotFoundError(std::string(name));
}

std::optional<LabelId> DataGraph::find_label(std::string_view label) const {
  auto it = label_ids_.find(std::string(label));
  if (it == label_ids_.end()) return std::nullopt;
  return it->second;
}

LabelId DataGraph::label(std::string_view label) const {
  if (auto id = find_label(label)) return *id;
  throw NotFoundError(std::string(label));
}

std::optional<EdgeId> DataGraph::find_edge(EntityId subj, LabelId label, EntityId obj) const {
  Triple key{subj, label, obj};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return EdgeId{static_cast<std::uint32_t>(it - edges_.begin())};
}

std::span<const EdgeId> DataGraph::incident(EntityId v) const {
  return {incident_edges_.data() + incident_offsets_[v.value],
          incident_edges_.data() + incident_offsets_[v.value + 1]};
}

std::span<const EdgeId> DataGraph::edges_with_label(LabelId label) const {
  if (!label.valid() || label.value >= tables_.size()) return {};
  return tables_[label.value].rows;
}

std::size_t DataGraph::label_edge_count(LabelId label) const { return edges_with_label(label).size(); }

std::span<const EntityId> DataGraph::objects_of(LabelId label, EntityId subj) const {
  if (!label.valid() || label.value >= tables_.size()) return {};
  const auto& idx = tables_[label.value].by_subj;
  auto it = idx.find(subj);
  if (it == idx.end()) return {};
  return it->second;
}

std::span<const EntityId> DataGraph::subjects_of(LabelId label, EntityId obj) const {
  if (!label.valid() || label.value >= tables_.size()) return {};
  const auto& idx = tables_[label.value].by_obj;
  auto it = idx.find(obj);
  if (it == idx.end()) return {};
  return it->second;
}

bool DataGraph::has_edge(EntityId subj, LabelId label, EntityId obj) const {
  auto objs = objects_of(label, subj);
  auto subs = subjects_of(label, obj);
  if (objs.size() <= subs.size()) return std::find(objs.begin(), objs.end(), obj) != objs.end();
  return std::find(subs.begin(), subs.end(), subj) != subs.end();
}

double DataGraph::ief(LabelId label) const {
  if (!label.valid() || label.value >= ief_.size()) throw NotFoundError("label #" + std::to_string(label.value));
  return ief_[label.value];
}

std::uint32_t DataGraph::participation(EntityId subj, LabelId label, EntityId obj) const {
  auto e = find_edge(subj, label, obj);
  if (!e) throw NotFoundError("edge (" + std::to_string(subj.value) + ", " + std::to_string(label.value) + ", " +
                              std::to_string(obj.value) + ")");
  return participation_[e->value];
}

std::vector<std::pair<EntityId, std::string>> DataGraph::autocomplete(std::string_view prefix,
                                                                     std::size_t limit) const {
  std::vector<std::pair<EntityId, std::string>> out;
  const std::string key = to_lower(prefix);
  auto it = std::lower_bound(completion_index_.begin(), completion_index_.end(), key,
                             [](const auto& entry, const std::string& k) { return entry.first < k; });
  for (; it != completion_index_.end() && out.size() < limit; ++it) {
    if (it->first.compare(0, key.size(), key) != 0) break;
    out.emplace_back(it->second, entity_names_[it->second.value]);
  }
  return out;
}

}  // namespace gqbe
