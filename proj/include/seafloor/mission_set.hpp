#ifndef SEAFLOOR_MISSION_SET_HPP
#define SEAFLOOR_MISSION_SET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seafloor/json_util.hpp"
#include "seafloor/sidescan_sim.hpp"
#include "seafloor/terrain.hpp"

namespace seafloor {

struct MissionSetConfig {
  std::size_t pings = 1000;
  SensorModel sensor;
  TerrainParams terrain;
  double margin = 2.0;  ///< m of terrain beyond the swath on every side
};

struct Mission {
  TerrainClass terrain_class;
  std::string name;
  RenderedSidescan data;
};

/// One straight northbound mission per archetype, sharing one sensor model.
Mission simulate_mission(TerrainClass kind, const MissionSetConfig& config, std::uint64_t seed);
std::vector<Mission> generate_mission_set(std::uint64_t seed, const MissionSetConfig& config = {});

/// Writes `mission_<name>.pgm` (+ sidecar), `mission_<name>.truth.pgm` and
/// manifest.json into `dir`. Returns the manifest.
Json write_mission_set(const std::vector<Mission>& missions, const MissionSetConfig& config,
                       std::uint64_t seed, const std::filesystem::path& dir);

Json sensor_to_json(const SensorModel& sensor);

}  // namespace seafloor

#endif  // SEAFLOOR_MISSION_SET_HPP
