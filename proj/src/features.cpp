#include "seafloor/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seafloor/error.hpp"
#include "seafloor/parallel.hpp"

namespace seafloor {

std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t FeatureExtractor::config_hash() const { return fnv1a(id() + "\n" + config().dump()); }

FeatureVector FeatureExtractor::operator()(const Snippet& snippet) const {
  return {extract(snippet.pixels), id(), config_hash()};
}

Json TextureConfig::to_json() const {
  return {{"glcm_levels", glcm_levels},
          {"glcm_offsets", glcm_offsets},
          {"orientation_bins", orientation_bins},
          {"variance_scales", variance_scales},
          {"pool_rows", pool_rows},
          {"pool_cols", pool_cols},
          {"log_texture", log_texture},
          {"log_floor", log_floor}};
}

TextureConfig TextureConfig::from_json(const Json& json) {
  TextureConfig c;
  try {
    c.glcm_levels = json.value("glcm_levels", c.glcm_levels);
    c.glcm_offsets = json.value("glcm_offsets", c.glcm_offsets);
    c.orientation_bins = json.value("orientation_bins", c.orientation_bins);
    c.variance_scales = json.value("variance_scales", c.variance_scales);
    c.pool_rows = json.value("pool_rows", c.pool_rows);
    c.pool_cols = json.value("pool_cols", c.pool_cols);
    c.log_texture = json.value("log_texture", c.log_texture);
    c.log_floor = json.value("log_floor", c.log_floor);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidParams, std::string("bad texture config: ") + e.what());
  }
  return c;
}

TextureExtractor::TextureExtractor(TextureConfig config) : config_(std::move(config)) {
  if (config_.glcm_levels < 2 || config_.glcm_levels > 256)
    throw Error(ErrorCode::InvalidParams, "glcm_levels must lie in [2, 256]");
  if (config_.orientation_bins < 1) throw Error(ErrorCode::InvalidParams, "orientation_bins must be positive");
  for (std::size_t d : config_.glcm_offsets)
    if (d < 1) throw Error(ErrorCode::InvalidParams, "glcm offsets must be positive");
  for (std::size_t s : config_.variance_scales)
    if (s < 1) throw Error(ErrorCode::InvalidParams, "variance scales must be positive");
  if (config_.pool_rows < 1 || config_.pool_cols < 1)
    throw Error(ErrorCode::InvalidParams, "pool sizes must be positive");
  if (!(config_.log_floor > 0.0)) throw Error(ErrorCode::InvalidParams, "log_floor must be positive");
}

Raster<float> block_average(const Raster<float>& pixels, std::size_t rows, std::size_t cols) {
  if (rows == 1 && cols == 1) return pixels;
  Raster<float> out(pixels.rows() / rows, pixels.cols() / cols);
  const auto n = static_cast<double>(rows * cols);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t r = i * rows; r < (i + 1) * rows; ++r)
        for (std::size_t c = j * cols; c < (j + 1) * cols; ++c) acc += pixels(r, c);
      out(i, j) = static_cast<float>(acc / n);
    }
  return out;
}

std::size_t TextureExtractor::dimension() const {
  return 3 + 6 * config_.glcm_offsets.size() + config_.orientation_bins + config_.variance_scales.size();
}

namespace {

std::pair<double, double> percentile_range(std::span<const float> values) {
  std::vector<float> sorted(values.begin(), values.end());
  const std::size_t n = sorted.size();
  const std::size_t lo_rank = n / 100;
  const std::size_t hi_rank = n - 1 - n / 100;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(lo_rank), sorted.end());
  const double lo = sorted[lo_rank];
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(hi_rank), sorted.end());
  return {lo, sorted[hi_rank]};
}

}  // namespace

void log_compress(Raster<float>& pixels, double floor) {
  if (pixels.empty()) return;
  const auto [lo, hi] = percentile_range(pixels.values());
  if (!(hi > lo)) {
    for (float& v : pixels.values()) v = 0.0f;
    return;
  }
  const double eps = floor * (hi - lo);
  for (float& v : pixels.values()) v = static_cast<float>(std::log(std::max(v - lo, 0.0) + eps));
}

Raster<std::uint8_t> quantise(const Raster<float>& pixels, std::size_t levels) {
  Raster<std::uint8_t> out(pixels.rows(), pixels.cols(), 0);
  if (pixels.empty()) return out;
  const std::size_t n = pixels.size();
  const auto [lo, hi] = percentile_range(pixels.values());
  if (!(hi > lo)) return out;
  const double top = static_cast<double>(levels - 1);
  auto dst = out.values();
  auto src = pixels.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (src[i] - lo) / (hi - lo);
    dst[i] = static_cast<std::uint8_t>(std::clamp(std::floor(t * top + 0.5), 0.0, top));
  }
  return out;
}

GlcmStats glcm_stats(const Raster<std::uint8_t>& levels, std::size_t levels_count,
                     std::size_t d_row, std::size_t d_col) {
  GlcmStats s;
  if (levels.rows() <= d_row || levels.cols() <= d_col) return s;
  std::vector<double> m(levels_count * levels_count, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r + d_row < levels.rows(); ++r)
    for (std::size_t c = 0; c + d_col < levels.cols(); ++c) {
      const std::size_t a = levels(r, c);
      const std::size_t b = levels(r + d_row, c + d_col);
      m[a * levels_count + b] += 1.0;
      m[b * levels_count + a] += 1.0;
      total += 2.0;
    }
  if (total == 0.0) return s;
  const double norm = static_cast<double>((levels_count - 1) * (levels_count - 1));
  for (std::size_t i = 0; i < levels_count; ++i)
    for (std::size_t j = 0; j < levels_count; ++j) {
      const double p = m[i * levels_count + j] / total;
      if (p == 0.0) continue;
      const double d = static_cast<double>(i) - static_cast<double>(j);
      s.contrast += p * d * d / norm;
      s.homogeneity += p / (1.0 + std::abs(d));
      s.entropy -= p * std::log(p);
    }
  return s;
}

std::vector<double> TextureExtractor::extract(const Raster<float>& pixels) const {
  if (pixels.empty()) throw Error(ErrorCode::DegenerateSnippet, "empty snippet");
  for (float v : pixels.values())
    if (!std::isfinite(v)) throw Error(ErrorCode::DegenerateSnippet, "snippet holds non-finite pixels");

  const auto n = static_cast<double>(pixels.size());
  std::vector<double> f;
  f.reserve(dimension());

  double mean = 0.0;
  for (float v : pixels.values()) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (float v : pixels.values()) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  f.push_back(mean);
  f.push_back(m2);
  f.push_back(m2 > 1e-12 ? m3 / std::pow(m2, 1.5) : 0.0);

  Raster<float> tex = block_average(pixels, config_.pool_rows, config_.pool_cols);
  if (tex.empty()) tex = pixels;
  const std::size_t rows = tex.rows();
  const std::size_t cols = tex.cols();

  if (config_.log_texture) log_compress(tex, config_.log_floor);
  const Raster<std::uint8_t> q = quantise(tex, config_.glcm_levels);
  for (std::size_t d : config_.glcm_offsets)
    for (const auto& [dr, dc] : {std::pair{std::size_t{0}, d}, std::pair{d, std::size_t{0}}}) {
      const GlcmStats g = glcm_stats(q, config_.glcm_levels, dr, dc);
      f.push_back(g.contrast);
      f.push_back(g.homogeneity);
      f.push_back(g.entropy);
    }

  // Unsigned gradient orientation, magnitude weighted.
  std::vector<double> hist(config_.orientation_bins, 0.0);
  double mag_total = 0.0;
  for (std::size_t r = 1; r + 1 < rows; ++r)
    for (std::size_t c = 1; c + 1 < cols; ++c) {
      const double gx = 0.5 * (tex(r, c + 1) - tex(r, c - 1));
      const double gy = 0.5 * (tex(r + 1, c) - tex(r - 1, c));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) angle += std::numbers::pi;
      auto bin = static_cast<std::size_t>(angle / std::numbers::pi * static_cast<double>(hist.size()));
      bin = std::min(bin, hist.size() - 1);
      hist[bin] += mag;
      mag_total += mag;
    }
  for (double h : hist) f.push_back(mag_total > 0.0 ? h / mag_total : 0.0);

  // Variance of block means relative to the variance at the texture scale.
  double tmean = 0.0, tvar = 0.0;
  for (float v : tex.values()) tmean += v;
  tmean /= static_cast<double>(tex.size());
  for (float v : tex.values()) tvar += (v - tmean) * (v - tmean);
  tvar /= static_cast<double>(tex.size());
  for (std::size_t s : config_.variance_scales) {
    const std::size_t br = rows / s;
    const std::size_t bc = cols / s;
    if (br == 0 || bc == 0 || tvar <= 1e-12) {
      f.push_back(0.0);
      continue;
    }
    const Raster<float> blocks = block_average(tex, s, s);
    double bsum = 0.0, bsum2 = 0.0;
    for (float v : blocks.values()) {
      bsum += v;
      bsum2 += static_cast<double>(v) * v;
    }
    const auto nb = static_cast<double>(blocks.size());
    const double bmean = bsum / nb;
    f.push_back(std::max(0.0, bsum2 / nb - bmean * bmean) / tvar);
  }
  return f;
}

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& id, const Json& config) {
  if (id == "texture") return std::make_unique<TextureExtractor>(TextureConfig::from_json(config));
  throw Error(ErrorCode::UnknownClass, "unknown feature extractor '" + id + "'");
}

std::vector<FeatureVector> extract_all(const FeatureExtractor& extractor,
                                       std::span<const Snippet> snippets, std::size_t jobs) {
  std::vector<FeatureVector> out(snippets.size());
  parallel_for(snippets.size(), [&](std::size_t i) { out[i] = extractor(snippets[i]); }, jobs);
  return out;
}

}  // namespace seafloor
