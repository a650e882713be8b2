#include "seafloor/snippet.hpp"

#include <algorithm>
#include <cmath>

#include "seafloor/error.hpp"
#include "seafloor/random.hpp"

namespace seafloor {
namespace {

std::size_t to_pixels(double metres, double resolution) {
  const double n = std::round(metres / resolution);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

// Column ranges [first, last] where a window of `width` may start.
struct ColumnRange {
  std::size_t first;
  std::size_t last;
};

std::vector<ColumnRange> valid_columns(const SidescanImage& image, std::size_t width,
                                       bool exclude_nadir) {
  if (width > image.bins()) return {};
  if (!exclude_nadir) return {{0, image.bins() - width}};

  const double altitude = estimate_altitude(image);
  // A column is outside the nadir zone when its near edge is at least the altitude.
  std::vector<bool> clear(image.bins());
  for (std::size_t b = 0; b < image.bins(); ++b) {
    const BinGeometry g = image.bin_geometry(b);
    clear[b] = g.slant >= altitude - 1e-9;
  }
  std::vector<ColumnRange> ranges;
  std::size_t run = 0;
  for (std::size_t b = 0; b < image.bins(); ++b) {
    run = clear[b] ? run + 1 : 0;
    if (run >= width) {
      const std::size_t start = b + 1 - width;
      if (!ranges.empty() && ranges.back().last + 1 == start)
        ranges.back().last = start;
      else
        ranges.push_back({start, start});
    }
  }
  return ranges;
}

Snippet cut(const SidescanImage& image, PixelIndex origin, SnippetWindow w,
            const std::string& source) {
  Snippet s;
  s.pixels = Raster<float>(w.pings, w.bins);
  for (std::size_t r = 0; r < w.pings; ++r)
    for (std::size_t c = 0; c < w.bins; ++c)
      s.pixels(r, c) = image.intensities(origin.ping + r, origin.bin + c);
  s.origin = origin;
  s.source_image = source;

  const std::size_t centre_ping = origin.ping + w.pings / 2;
  const BinGeometry g = image.bin_geometry(origin.bin + w.bins / 2);
  const double altitude = image.altitude.value_or(0.0);
  const double slant = g.slant + 0.5 * image.bin_resolution;
  const double ground = slant > altitude ? std::sqrt(slant * slant - altitude * altitude) : 0.0;
  s.geo_center = image.ground_position(centre_ping, g.side, ground);
  return s;
}

}  // namespace

SnippetWindow snippet_window(const SidescanImage& image, const SnippetSpec& spec) {
  if (!(spec.side_m > 0.0) || !(spec.stride_m > 0.0))
    throw Error(ErrorCode::InvalidParams, "snippet side and stride must be positive");
  return {to_pixels(spec.side_m, image.ping_resolution),
          to_pixels(spec.side_m, image.bin_resolution)};
}

std::vector<Snippet> extract_snippets(const SidescanImage& image, const SnippetSpec& spec,
                                      const SnippetSampling& sampling,
                                      const std::string& source_image) {
  const SnippetWindow w = snippet_window(image, spec);
  if (w.pings > image.pings() || w.bins > image.bins())
    throw Error(ErrorCode::ImageTooSmall, "image smaller than one snippet window");

  // Geo centres need an altitude; resolve it once so cut() can use the metadata path.
  SidescanImage view_meta;
  const SidescanImage* src = &image;
  if (!image.altitude) {
    view_meta = image;
    view_meta.altitude = estimate_altitude(image);
    src = &view_meta;
  }

  const auto ranges = valid_columns(*src, w.bins, spec.exclude_nadir);
  if (ranges.empty())
    throw Error(ErrorCode::ImageTooSmall, "no snippet window fits outside the nadir zone");
  const std::size_t max_ping = image.pings() - w.pings;

  std::vector<Snippet> out;
  if (std::holds_alternative<GridSampling>(sampling)) {
    const std::size_t stride_p = to_pixels(spec.stride_m, image.ping_resolution);
    const std::size_t stride_b = to_pixels(spec.stride_m, image.bin_resolution);
    for (std::size_t p = 0; p <= max_ping; p += stride_p)
      for (const ColumnRange& range : ranges)
        for (std::size_t b = range.first; b <= range.last; b += stride_b)
          out.push_back(cut(*src, {p, b}, w, source_image));
  } else {
    const auto& random = std::get<RandomSampling>(sampling);
    std::size_t total_columns = 0;
    for (const ColumnRange& range : ranges) total_columns += range.last - range.first + 1;
    Rng rng(mix_seed(random.seed, {0x5A1Bu}));
    out.reserve(random.count);
    for (std::size_t i = 0; i < random.count; ++i) {
      const auto p = static_cast<std::size_t>(rng.below(max_ping + 1));
      auto k = static_cast<std::size_t>(rng.below(total_columns));
      std::size_t b = 0;
      for (const ColumnRange& range : ranges) {
        const std::size_t n = range.last - range.first + 1;
        if (k < n) {
          b = range.first + k;
          break;
        }
        k -= n;
      }
      out.push_back(cut(*src, {p, b}, w, source_image));
    }
  }
  if (out.empty()) throw Error(ErrorCode::ImageTooSmall, "no snippet extracted");
  return out;
}

}  // namespace seafloor
