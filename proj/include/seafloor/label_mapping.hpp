#ifndef SEAFLOOR_LABEL_MAPPING_HPP
#define SEAFLOOR_LABEL_MAPPING_HPP

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seafloor/json_util.hpp"
#include "seafloor/raster_io.hpp"

namespace seafloor {

struct ClassSpec {
  std::string name;
  int complexity_rank = 0;

  friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

/// Operator remap of P clusters onto C named classes.
struct LabelMapping {
  std::size_t P = 0;
  std::size_t C = 0;
  std::vector<int> map;  ///< length P, entries in [0, C)
  std::vector<ClassSpec> classes;

  friend bool operator==(const LabelMapping&, const LabelMapping&) = default;
};

enum class MappingStatus { Ok, Malformed, TooManyClasses, EntryOutOfRange, NotSurjective, DuplicateRank };

std::string_view to_string(MappingStatus status) noexcept;

/// First violated rule, checked in the order of the enum.
MappingStatus check_mapping(const LabelMapping& mapping) noexcept;

/// Throws Error with the code matching check_mapping (MappingMismatch for a
/// malformed map).
void validate_mapping(const LabelMapping& mapping);

/// C = P, class i named "cluster_<i>" with rank i.
LabelMapping identity_mapping(std::size_t P);

Json mapping_to_json(const LabelMapping& mapping);
LabelMapping mapping_from_json(const Json& json);
void write_mapping(const std::filesystem::path& path, const LabelMapping& mapping);
LabelMapping read_mapping(const std::filesystem::path& path);

/// Terrain classes on a geo grid plus where they came from.
using TerrainLabelMap = LabelGridFile;

enum class MergePolicy { MaxVotes, MaxComplexity };

std::string_view to_string(MergePolicy policy) noexcept;
MergePolicy merge_policy_from_string(std::string_view text);

/// Combines the labels observed for one cell. kNoLabel entries are ignored;
/// returns kNoLabel when nothing remains. Vote ties go to the higher rank.
int merge_labels(std::span<const int> labels, const LabelMapping& mapping, MergePolicy policy);

/// Cell-wise merge. Throws GridMismatch when geometries differ and EmptyInput
/// for an empty list.
TerrainLabelMap merge_maps(std::span<const TerrainLabelMap> maps, const LabelMapping& mapping,
                           MergePolicy policy);

}  // namespace seafloor

#endif  // SEAFLOOR_LABEL_MAPPING_HPP
