#ifndef SEAFLOOR_SNIPPET_HPP
#define SEAFLOOR_SNIPPET_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "seafloor/raster.hpp"
#include "seafloor/sonar_image.hpp"

namespace seafloor {

struct SnippetSpec {
  double side_m = 3.0;
  double stride_m = 3.0;
  bool exclude_nadir = true;
};

struct PixelIndex {
  std::size_t ping = 0;
  std::size_t bin = 0;

  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
  friend auto operator<=>(const PixelIndex&, const PixelIndex&) = default;
};

struct Snippet {
  Raster<float> pixels;
  PixelIndex origin;
  GeoPoint geo_center;
  std::string source_image;
};

/// Window extent in pixels for a spec applied to an image.
struct SnippetWindow {
  std::size_t pings = 1;
  std::size_t bins = 1;
};

SnippetWindow snippet_window(const SidescanImage& image, const SnippetSpec& spec);

struct GridSampling {};
struct RandomSampling {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};
using SnippetSampling = std::variant<GridSampling, RandomSampling>;

/// Cuts square snippets out of an image. Windows clipped at the image edge
/// are discarded. Throws Error(ImageTooSmall) when no window fits.
std::vector<Snippet> extract_snippets(const SidescanImage& image, const SnippetSpec& spec,
                                      const SnippetSampling& sampling,
                                      const std::string& source_image = {});

}  // namespace seafloor

#endif  // SEAFLOOR_SNIPPET_HPP
