#ifndef SEAFLOOR_RASTER_IO_HPP
#define SEAFLOOR_RASTER_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seafloor/geo_grid.hpp"
#include "seafloor/raster.hpp"
#include "seafloor/sonar_image.hpp"

namespace seafloor {

/// Binary PGM (P5). Any maxval in [1, 65535] is read and rescaled to [0, 1].
Raster<float> read_pgm(const std::filesystem::path& path);

/// Raw integer samples of a P5 file, with its maxval.
struct PgmSamples {
  Raster<std::uint16_t> samples;
  std::uint16_t maxval = 65535;
};
PgmSamples read_pgm_samples(const std::filesystem::path& path);

/// Writes values in [0, 1] at maxval 65535 (big-endian 16-bit samples).
void write_pgm(const std::filesystem::path& path, const Raster<float>& values);
void write_pgm_samples(const std::filesystem::path& path, const Raster<std::uint16_t>& samples,
                       std::uint16_t maxval);

/// `<raster>.meta.json`
std::filesystem::path sidecar_path(const std::filesystem::path& raster);

/// Sidescan raster plus its sidecar.
SidescanImage read_raster(const std::filesystem::path& path);
void write_raster(const SidescanImage& image, const std::filesystem::path& path);

/// Integer class raster (truth or labels) as 16-bit PGM; 255 marks nadir in truth rasters.
void write_class_raster(const std::filesystem::path& path, const Raster<std::uint8_t>& classes);
Raster<std::uint8_t> read_class_raster(const std::filesystem::path& path);

/// PD grid: PGM with linear [0,1] mapping (no-data written as 0) and a sidecar
/// carrying the geometry, the no-data mask and optional exact tallies.
struct PdGridFile {
  PdGrid grid;
  std::vector<std::uint32_t> successes;  ///< empty when not stored
  std::vector<std::uint32_t> trials;
};
void write_pd_grid(const std::filesystem::path& path, const PdGridFile& file);
PdGridFile read_pd_grid(const std::filesystem::path& path);

/// Label grid: PGM of raw class ids, 65535 = no data; sidecar carries geometry.
struct LabelGridFile {
  LabelGrid grid;
  std::vector<std::string> provenance;
  std::string policy;
};
void write_label_grid(const std::filesystem::path& path, const LabelGridFile& file);
LabelGridFile read_label_grid(const std::filesystem::path& path);

/// Flag grid (0/255 8-bit PGM) for inspection.
void write_flag_grid(const std::filesystem::path& path, const FlagGrid& grid);

/// 64-bit FNV-1a over a file's bytes.
std::uint64_t file_hash(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

}  // namespace seafloor

#endif  // SEAFLOOR_RASTER_IO_HPP
