#ifndef SEAFLOOR_GEO_GRID_HPP
#define SEAFLOOR_GEO_GRID_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "seafloor/error.hpp"
#include "seafloor/sonar_image.hpp"

namespace seafloor {

/// Placement of a regular grid in the geo frame. Row 0 is the southern row.
struct GridGeometry {
  double origin_e = 0.0;  ///< south-west corner
  double origin_n = 0.0;
  double cell_size = 1.0;
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t cell_count() const noexcept { return width * height; }

  std::optional<std::size_t> cell_of(GeoPoint p) const noexcept {
    const double fx = std::floor((p.e - origin_e) / cell_size);
    const double fy = std::floor((p.n - origin_n) / cell_size);
    if (fx < 0.0 || fy < 0.0) return std::nullopt;
    const auto x = static_cast<std::size_t>(fx);
    const auto y = static_cast<std::size_t>(fy);
    if (x >= width || y >= height) return std::nullopt;
    return y * width + x;
  }

  GeoPoint centre(std::size_t index) const noexcept {
    const std::size_t x = index % width;
    const std::size_t y = index / width;
    return {origin_e + (static_cast<double>(x) + 0.5) * cell_size,
            origin_n + (static_cast<double>(y) + 0.5) * cell_size};
  }

  void validate() const {
    if (!(cell_size > 0.0)) throw Error(ErrorCode::InvalidParams, "cell size must be positive");
  }

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Grid covering the seafloor footprint of an image, snapped outward to whole cells.
GridGeometry grid_for_image(const SidescanImage& image, double cell_size);

/// Per-cell payload in the geo frame, with an explicit no-data sentinel.
template <typename T>
struct GeoGrid {
  GridGeometry geometry;
  std::vector<T> values;
  T nodata{};

  GeoGrid() = default;
  GeoGrid(GridGeometry g, T fill, T nodata_value)
      : geometry(g), values(g.cell_count(), fill), nodata(nodata_value) {
    geometry.validate();
  }

  bool is_nodata(std::size_t i) const noexcept {
    if constexpr (std::numeric_limits<T>::has_quiet_NaN) {
      if (std::isnan(nodata)) return std::isnan(values[i]);
    }
    return values[i] == nodata;
  }

  std::size_t size() const noexcept { return values.size(); }

  friend bool operator==(const GeoGrid& a, const GeoGrid& b) {
    if (a.geometry != b.geometry || a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (a.is_nodata(i) != b.is_nodata(i)) return false;
      if (!a.is_nodata(i) && a.values[i] != b.values[i]) return false;
    }
    return true;
  }
};

using PdGrid = GeoGrid<double>;           // NaN = no data
using LabelGrid = GeoGrid<std::int32_t>;  // -1 = no data
using FlagGrid = GeoGrid<std::uint8_t>;   // 0/1

inline constexpr std::int32_t kNoLabel = -1;

inline PdGrid make_pd_grid(GridGeometry g) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return PdGrid(g, nan, nan);
}

inline LabelGrid make_label_grid(GridGeometry g) { return LabelGrid(g, kNoLabel, kNoLabel); }

}  // namespace seafloor

#endif  // SEAFLOOR_GEO_GRID_HPP
