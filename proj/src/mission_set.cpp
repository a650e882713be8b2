#include "seafloor/mission_set.hpp"

#include <cmath>

#include "seafloor/error.hpp"
#include "seafloor/raster_io.hpp"

namespace seafloor {

Mission simulate_mission(TerrainClass kind, const MissionSetConfig& config, std::uint64_t seed) {
  const SensorModel& sensor = config.sensor;
  sensor.validate();
  const double swath = sensor.max_slant_range;  // bounds the ground range on either side
  const double along = static_cast<double>(config.pings) * sensor.ping_resolution;
  const bool both = sensor.side == Side::Full;

  const double extent_e = (both ? 2.0 * swath : swath) + 2.0 * config.margin;
  const double extent_n = along + 2.0 * config.margin;
  const TerrainPatch terrain =
      generate_terrain(kind, extent_e, extent_n, config.terrain, mix_seed(seed, {0x7E44u}));

  double start_e = config.margin;
  if (sensor.side == Side::Port) start_e += swath;
  if (both) start_e += swath;
  const auto track = straight_track({start_e, config.margin}, 0.0, config.pings, sensor.ping_resolution);

  Mission m;
  m.terrain_class = kind;
  m.name = std::string(terrain_name(kind));
  m.data = render_sidescan(terrain, track, sensor, mix_seed(seed, {0x5C4Eu, static_cast<std::uint64_t>(kind)}));
  return m;
}

std::vector<Mission> generate_mission_set(std::uint64_t seed, const MissionSetConfig& config) {
  std::vector<Mission> missions;
  missions.reserve(kTerrainClassCount);
  for (std::size_t c = 0; c < kTerrainClassCount; ++c)
    missions.push_back(simulate_mission(static_cast<TerrainClass>(c), config, seed));
  return missions;
}

Json sensor_to_json(const SensorModel& s) {
  return {{"altitude", s.altitude},
          {"max_slant_range", s.max_slant_range},
          {"bin_resolution", s.bin_resolution},
          {"ping_resolution", s.ping_resolution},
          {"speckle_strength", s.speckle_strength},
          {"beam_attenuation", s.beam_attenuation},
          {"tvg_compensation", s.tvg_compensation},
          {"noise_floor", s.noise_floor},
          {"shadow_floor", s.shadow_floor},
          {"side", std::string(to_string(s.side))}};
}

Json write_mission_set(const std::vector<Mission>& missions, const MissionSetConfig& config,
                       std::uint64_t seed, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  Json entries = Json::array();
  for (const Mission& m : missions) {
    const std::string image_file = "mission_" + m.name + ".pgm";
    const std::string truth_file = "mission_" + m.name + ".truth.pgm";
    write_raster(m.data.image, dir / image_file);
    write_class_raster(dir / truth_file, m.data.truth);
    entries.push_back({{"class_id", static_cast<int>(m.terrain_class)},
                       {"class_name", m.name},
                       {"image", image_file},
                       {"truth", truth_file},
                       {"pings", m.data.image.pings()},
                       {"bins", m.data.image.bins()},
                       {"image_hash", hex64(file_hash(dir / image_file))},
                       {"truth_hash", hex64(file_hash(dir / truth_file))}});
  }
  Json classes = Json::array();
  for (const ClassInfo& c : terrain_catalog()) classes.push_back({{"id", c.id}, {"name", c.name}});

  Json manifest = {{"seed", seed},
                   {"pings", config.pings},
                   {"sensor", sensor_to_json(config.sensor)},
                   {"classes", classes},
                   {"missions", entries}};
  write_json(dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace seafloor
