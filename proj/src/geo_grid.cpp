#include "seafloor/geo_grid.hpp"

#include <algorithm>

namespace seafloor {

GridGeometry grid_for_image(const SidescanImage& image, double cell_size) {
  if (!(cell_size > 0.0)) throw Error(ErrorCode::InvalidParams, "cell size must be positive");
  const double altitude = estimate_altitude(image);
  const double max_slant = static_cast<double>(image.bins_per_side()) * image.bin_resolution;
  const double max_ground = max_slant > altitude ? slant_to_ground(max_slant, altitude) : 0.0;

  double min_e = std::numeric_limits<double>::infinity();
  double min_n = min_e;
  double max_e = -min_e;
  double max_n = -min_e;
  auto extend = [&](GeoPoint p) {
    min_e = std::min(min_e, p.e);
    max_e = std::max(max_e, p.e);
    min_n = std::min(min_n, p.n);
    max_n = std::max(max_n, p.n);
  };
  for (std::size_t p = 0; p < image.pings(); ++p) {
    for (SideSign s : image.side_signs()) {
      extend(image.ground_position(p, s, 0.0));
      extend(image.ground_position(p, s, max_ground));
    }
  }
  GridGeometry g;
  g.cell_size = cell_size;
  g.origin_e = std::floor(min_e / cell_size) * cell_size;
  g.origin_n = std::floor(min_n / cell_size) * cell_size;
  g.width = static_cast<std::size_t>(std::floor((max_e - g.origin_e) / cell_size)) + 1;
  g.height = static_cast<std::size_t>(std::floor((max_n - g.origin_n) / cell_size)) + 1;
  return g;
}

}  // namespace seafloor
