#include "seafloor/label_mapping.hpp"

#include <algorithm>
#include <set>

#include "seafloor/error.hpp"

namespace seafloor {

std::string_view to_string(MappingStatus status) noexcept {
  switch (status) {
    case MappingStatus::Ok: return "ok";
    case MappingStatus::Malformed: return "malformed";
    case MappingStatus::TooManyClasses: return "too_many_classes";
    case MappingStatus::EntryOutOfRange: return "entry_out_of_range";
    case MappingStatus::NotSurjective: return "not_surjective";
    case MappingStatus::DuplicateRank: return "duplicate_rank";
  }
  return "unknown";
}

MappingStatus check_mapping(const LabelMapping& m) noexcept {
  if (m.P == 0 || m.map.size() != m.P || m.classes.size() != m.C) return MappingStatus::Malformed;
  if (m.C > m.P) return MappingStatus::TooManyClasses;
  std::vector<bool> hit(m.C, false);
  for (int v : m.map) {
    if (v < 0 || static_cast<std::size_t>(v) >= m.C) return MappingStatus::EntryOutOfRange;
    hit[static_cast<std::size_t>(v)] = true;
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) return MappingStatus::NotSurjective;
  std::set<int> ranks;
  for (const ClassSpec& c : m.classes)
    if (!ranks.insert(c.complexity_rank).second) return MappingStatus::DuplicateRank;
  return MappingStatus::Ok;
}

void validate_mapping(const LabelMapping& m) {
  const MappingStatus status = check_mapping(m);
  switch (status) {
    case MappingStatus::Ok: return;
    case MappingStatus::Malformed:
      throw Error(ErrorCode::MappingMismatch, "map length must equal P and class list length must equal C");
    case MappingStatus::TooManyClasses:
      throw Error(ErrorCode::TooManyClasses,
                  "C = " + std::to_string(m.C) + " exceeds P = " + std::to_string(m.P));
    case MappingStatus::EntryOutOfRange:
      throw Error(ErrorCode::EntryOutOfRange, "map entries must lie in [0, " + std::to_string(m.C) + ")");
    case MappingStatus::NotSurjective:
      throw Error(ErrorCode::NotSurjective, "every class must receive at least one cluster");
    case MappingStatus::DuplicateRank:
      throw Error(ErrorCode::DuplicateRank, "complexity ranks must be unique");
  }
}

LabelMapping identity_mapping(std::size_t P) {
  LabelMapping m;
  m.P = P;
  m.C = P;
  for (std::size_t i = 0; i < P; ++i) {
    m.map.push_back(static_cast<int>(i));
    m.classes.push_back({"cluster_" + std::to_string(i), static_cast<int>(i)});
  }
  return m;
}

Json mapping_to_json(const LabelMapping& m) {
  Json classes = Json::array();
  for (const ClassSpec& c : m.classes) classes.push_back({{"name", c.name}, {"complexity_rank", c.complexity_rank}});
  return {{"P", m.P}, {"C", m.C}, {"map", m.map}, {"classes", classes}};
}

LabelMapping mapping_from_json(const Json& j) {
  LabelMapping m;
  try {
    m.P = j.at("P").get<std::size_t>();
    m.C = j.at("C").get<std::size_t>();
    m.map = j.at("map").get<std::vector<int>>();
    for (const Json& c : j.at("classes"))
      m.classes.push_back({c.at("name").get<std::string>(), c.at("complexity_rank").get<int>()});
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad label mapping: ") + e.what());
  }
  return m;
}

void write_mapping(const std::filesystem::path& path, const LabelMapping& mapping) {
  write_json(path, mapping_to_json(mapping));
}

LabelMapping read_mapping(const std::filesystem::path& path) { return mapping_from_json(read_json(path)); }

std::string_view to_string(MergePolicy policy) noexcept {
  return policy == MergePolicy::MaxVotes ? "max_votes" : "max_complexity";
}

MergePolicy merge_policy_from_string(std::string_view text) {
  if (text == "max_votes") return MergePolicy::MaxVotes;
  if (text == "max_complexity") return MergePolicy::MaxComplexity;
  throw Error(ErrorCode::InvalidParams, "unknown merge policy '" + std::string(text) + "'");
}

int merge_labels(std::span<const int> labels, const LabelMapping& mapping, MergePolicy policy) {
  std::vector<std::size_t> votes(mapping.C, 0);
  bool any = false;
  for (int v : labels) {
    if (v == kNoLabel) continue;
    if (v < 0 || static_cast<std::size_t>(v) >= mapping.C)
      throw Error(ErrorCode::EntryOutOfRange, "label " + std::to_string(v) + " outside the mapping's classes");
    ++votes[static_cast<std::size_t>(v)];
    any = true;
  }
  if (!any) return kNoLabel;
  int best = kNoLabel;
  for (std::size_t c = 0; c < mapping.C; ++c) {
    if (votes[c] == 0) continue;
    if (best == kNoLabel) {
      best = static_cast<int>(c);
      continue;
    }
    const auto b = static_cast<std::size_t>(best);
    const bool higher_rank = mapping.classes[c].complexity_rank > mapping.classes[b].complexity_rank;
    if (policy == MergePolicy::MaxComplexity) {
      if (higher_rank) best = static_cast<int>(c);
    } else if (votes[c] > votes[b] || (votes[c] == votes[b] && higher_rank)) {
      best = static_cast<int>(c);
    }
  }
  return best;
}

TerrainLabelMap merge_maps(std::span<const TerrainLabelMap> maps, const LabelMapping& mapping,
                           MergePolicy policy) {
  if (maps.empty()) throw Error(ErrorCode::EmptyInput, "no label maps to merge");
  validate_mapping(mapping);
  const GridGeometry& g = maps.front().grid.geometry;
  for (const TerrainLabelMap& m : maps)
    if (m.grid.geometry != g || m.grid.size() != g.cell_count())
      throw Error(ErrorCode::GridMismatch, "label maps do not share one grid geometry");

  TerrainLabelMap out;
  out.grid = make_label_grid(g);
  out.policy = std::string(to_string(policy));
  for (const TerrainLabelMap& m : maps)
    out.provenance.insert(out.provenance.end(), m.provenance.begin(), m.provenance.end());
  std::vector<int> cell(maps.size());
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    for (std::size_t k = 0; k < maps.size(); ++k) cell[k] = maps[k].grid.values[i];
    out.grid.values[i] = merge_labels(cell, mapping, policy);
  }
  return out;
}

}  // namespace seafloor
