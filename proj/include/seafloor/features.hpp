#ifndef SEAFLOOR_FEATURES_HPP
#define SEAFLOOR_FEATURES_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "seafloor/json_util.hpp"
#include "seafloor/raster.hpp"
#include "seafloor/snippet.hpp"

namespace seafloor {

struct FeatureVector {
  std::vector<double> values;
  std::string extractor_id;
  std::uint64_t config_hash = 0;
};

/// Turns a snippet into a fixed-length vector. Implementations must be
/// deterministic and thread-safe.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string id() const = 0;
  virtual Json config() const = 0;
  virtual std::size_t dimension() const = 0;
  /// Throws Error(DegenerateSnippet) on non-finite pixels.
  virtual std::vector<double> extract(const Raster<float>& pixels) const = 0;

  /// FNV-1a over the id and the canonical config dump.
  std::uint64_t config_hash() const;
  FeatureVector operator()(const Snippet& snippet) const;
};

struct TextureConfig {
  std::size_t glcm_levels = 16;
  std::vector<std::size_t> glcm_offsets{1, 3};  ///< pixels, applied along range and along track
  std::size_t orientation_bins = 8;
  std::vector<std::size_t> variance_scales{2, 4};  ///< block edge in pooled pixels
  std::size_t pool_rows = 2;  ///< block average applied before the texture statistics
  std::size_t pool_cols = 4;
  bool log_texture = true;    ///< texture statistics on log intensity after pooling
  double log_floor = 0.2;     ///< log offset as a fraction of the percentile spread

  Json to_json() const;
  static TextureConfig from_json(const Json& json);
};

/// Hand-crafted texture bank: intensity moments, co-occurrence statistics,
/// gradient orientation histogram and block-variance ratios.
class TextureExtractor final : public FeatureExtractor {
 public:
  explicit TextureExtractor(TextureConfig config = {});
  std::string id() const override { return "texture"; }
  Json config() const override { return config_.to_json(); }
  std::size_t dimension() const override;
  std::vector<double> extract(const Raster<float>& pixels) const override;

 private:
  TextureConfig config_;
};

/// Contrast, homogeneity and entropy of the symmetric normalised co-occurrence
/// matrix at pixel offset (d_row, d_col). Contrast is scaled to [0, 1].
struct GlcmStats {
  double contrast = 0.0;
  double homogeneity = 0.0;
  double entropy = 0.0;
};
GlcmStats glcm_stats(const Raster<std::uint8_t>& levels, std::size_t levels_count,
                     std::size_t d_row, std::size_t d_col);

/// Mean over non-overlapping rows x cols blocks; partial blocks are dropped.
Raster<float> block_average(const Raster<float>& pixels, std::size_t rows, std::size_t cols);

/// In place: log(max(x - p1, 0) + floor * (p99 - p1)) with p1/p99 the
/// 1st/99th percentiles. Invariant to offset and gain; constant input maps to 0.
void log_compress(Raster<float>& pixels, double floor);

/// Quantises to [0, levels) between the 1st and 99th percentiles.
Raster<std::uint8_t> quantise(const Raster<float>& pixels, std::size_t levels);

/// Throws Error(UnknownClass) for an unknown id.
std::unique_ptr<FeatureExtractor> make_extractor(const std::string& id, const Json& config);

/// Features for a batch of snippets, computed in parallel.
std::vector<FeatureVector> extract_all(const FeatureExtractor& extractor,
                                       std::span<const Snippet> snippets, std::size_t jobs = 0);

std::uint64_t fnv1a(std::string_view text) noexcept;

}  // namespace seafloor

#endif  // SEAFLOOR_FEATURES_HPP
