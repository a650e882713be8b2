#ifndef SEAFLOOR_MISSION_REPAIR_HPP
#define SEAFLOOR_MISSION_REPAIR_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "seafloor/geo_grid.hpp"
#include "seafloor/json_util.hpp"

namespace seafloor {

enum class FlagRule {
  MeanPd,         ///< flag when the mean PD of covered cells is below the threshold
  FractionBelow,  ///< flag when at least `fraction` of covered cells are below it
};

struct FlagConfig {
  double cell_size = 20.0;  ///< m, repair grid cell
  double threshold = 0.5;
  FlagRule rule = FlagRule::MeanPd;
  double fraction = 0.5;
};

/// Regrids a PD map onto repair cells aligned with its origin and flags the
/// low-performance ones (1). Each PD cell counts towards the repair cell under
/// its centre; no-data PD cells are ignored and all-no-data cells stay 0.
/// Throws EmptyGrid or InvalidParams.
FlagGrid flag_cells(const PdGrid& pd, const FlagConfig& config);

struct RepairLeg {
  std::size_t component = 0;
  std::vector<std::size_t> cells;   ///< flagged cells whose area the leg swath crosses
  std::vector<GeoPoint> waypoints;  ///< in travel order
  double heading = 0.0;             ///< travel direction, rad clockwise from north, [0, 2pi)
  std::string reason = "low_pd";
};

struct RepairPlan {
  std::vector<RepairLeg> legs;
  double transit_length = 0.0;  ///< m, start through every waypoint
  std::string source_map;
  double threshold = 0.0;
  double cell_size = 0.0;
  double mission_heading = 0.0;
};

struct PlanConfig {
  bool orthogonal = true;  ///< false keeps legs parallel to the original track
  std::string source_map;
  double threshold = 0.0;  ///< recorded in the plan
};

/// 4-connected components of flagged cells, each swept by parallel lawnmower
/// legs one cell apart, visited greedily nearest-first from `start`; a
/// component is entered at its nearest outer leg endpoint.
RepairPlan plan_revisit(const FlagGrid& flags, double mission_heading, GeoPoint start,
                        const PlanConfig& config = {});

/// Cell indices of each 4-connected component of flagged cells, ordered by
/// their smallest index.
std::vector<std::vector<std::size_t>> flagged_components(const FlagGrid& flags);

Json plan_to_json(const RepairPlan& plan);
RepairPlan plan_from_json(const Json& json);

/// Inspection raster at `scale` pixels per cell, north up: 0 clear, 128
/// flagged, 255 under a leg.
Raster<std::uint8_t> plan_overlay(const FlagGrid& flags, const RepairPlan& plan, std::size_t scale = 8);

}  // namespace seafloor

#endif  // SEAFLOOR_MISSION_REPAIR_HPP
