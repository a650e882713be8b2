#include "seafloor/atr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "seafloor/error.hpp"
#include "seafloor/random.hpp"

namespace seafloor {

void DetectorConfig::validate() const {
  if (models.empty()) throw Error(ErrorCode::InvalidParams, "detector needs at least one model");
  for (const ObjectModel& m : models) m.validate();
  if (yaw_steps < 1) throw Error(ErrorCode::InvalidParams, "yaw_steps must be at least 1");
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidParams, "threshold must lie in [0, 1]");
  if (!(nms_radius > 0.0)) throw Error(ErrorCode::InvalidParams, "nms radius must be positive");
  if (!(min_ground_range >= 0.0))
    throw Error(ErrorCode::InvalidParams, "min ground range must be non-negative");
}

GeoPoint contact_position(const SidescanImage& image, std::size_t ping, std::size_t bin,
                          double altitude) {
  const BinGeometry g = image.bin_geometry(bin);
  const double slant = g.slant + 0.5 * image.bin_resolution;
  const double ground = slant > altitude ? slant_to_ground(slant, altitude) : 0.0;
  return image.ground_position(ping, g.side, ground);
}

namespace {

// Summed-area tables of x and x^2 over a pings x cols raster.
struct Integral {
  std::size_t cols = 0;
  std::vector<double> s, s2;

  explicit Integral(const Raster<float>& img) : cols(img.cols() + 1) {
    s.assign((img.rows() + 1) * cols, 0.0);
    s2.assign(s.size(), 0.0);
    for (std::size_t r = 0; r < img.rows(); ++r) {
      double row = 0.0, row2 = 0.0;
      for (std::size_t c = 0; c < img.cols(); ++c) {
        const double v = img(r, c);
        row += v;
        row2 += v * v;
        s[(r + 1) * cols + c + 1] = s[r * cols + c + 1] + row;
        s2[(r + 1) * cols + c + 1] = s2[r * cols + c + 1] + row2;
      }
    }
  }

  // Sums over rows [r0, r1) and cols [c0, c1).
  std::pair<double, double> box(std::size_t r0, std::size_t r1, std::size_t c0,
                                std::size_t c1) const noexcept {
    auto at = [&](const std::vector<double>& t, std::size_t r, std::size_t c) { return t[r * cols + c]; };
    return {at(s, r1, c1) - at(s, r0, c1) - at(s, r1, c0) + at(s, r0, c0),
            at(s2, r1, c1) - at(s2, r0, c1) - at(s2, r1, c0) + at(s2, r0, c0)};
  }
};

struct Template {
  std::size_t model;
  std::size_t pings;      // along-track extent
  std::size_t highlight;  // ground cells
  double shadow_ratio;    // h / (a - h)
};

// Ground-range resampling of one side; column j covers ground (j + 0.5) * res.
Raster<float> ground_corrected(const SidescanImage& image, SideSign side, double altitude,
                               double res) {
  const double max_slant = static_cast<double>(image.bins_per_side()) * image.bin_resolution;
  const double max_ground = max_slant > altitude ? std::sqrt(max_slant * max_slant - altitude * altitude) : 0.0;
  const auto cols = static_cast<std::size_t>(max_ground / res);
  Raster<float> out(image.pings(), cols);
  std::vector<std::size_t> source(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const double g = (static_cast<double>(j) + 0.5) * res;
    source[j] = image.bin_for(side, std::hypot(g, altitude)).value_or(image.bins() - 1);
  }
  for (std::size_t p = 0; p < image.pings(); ++p)
    for (std::size_t j = 0; j < cols; ++j) out(p, j) = image.intensities(p, source[j]);
  return out;
}

struct Candidate {
  double score;
  std::size_t ping;
  std::size_t col;
  SideSign side;
  std::size_t model;
};

}  // namespace

TemplateDetector::TemplateDetector(DetectorConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<Contact> TemplateDetector::detect(const SidescanImage& image) const {
  image.validate();
  double altitude = 0.0;
  try {
    altitude = estimate_altitude(image);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoFirstReturn) return {};
    throw;
  }
  const double res = image.bin_resolution;

  std::vector<Template> bank;
  for (std::size_t m = 0; m < config_.models.size(); ++m) {
    const ObjectModel& model = config_.models[m];
    const double h = model.max_height();
    if (h <= 0.0 || h >= altitude) continue;
    for (std::size_t k = 0; k < config_.yaw_steps; ++k) {
      const double yaw = std::numbers::pi * static_cast<double>(k) / static_cast<double>(config_.yaw_steps);
      const double c = std::abs(std::cos(yaw));
      const double s = std::abs(std::sin(yaw));
      const double along = model.length() * c + model.width() * s;
      const double across = model.length() * s + model.width() * c;
      bank.push_back({m, std::max<std::size_t>(1, std::lround(along / image.ping_resolution)),
                      std::max<std::size_t>(1, std::lround(across / res)), h / (altitude - h)});
    }
  }
  if (bank.empty()) return {};

  std::vector<Candidate> candidates;
  for (SideSign side : image.side_signs()) {
    const Raster<float> g = ground_corrected(image, side, altitude, res);
    if (g.empty()) continue;
    const Integral integral(g);
    const std::size_t pings = g.rows();
    const std::size_t cols = g.cols();
    Raster<float> score(pings, cols, -1.0f);
    Raster<std::uint8_t> best(pings, cols, 0);
    const auto first_col = static_cast<std::size_t>(config_.min_ground_range / res);

    for (const Template& t : bank) {
      if (t.pings > pings) continue;
      const std::size_t half_p = t.pings / 2;
      const std::size_t half_c = t.highlight / 2;
      for (std::size_t j = first_col; j + t.highlight < cols; ++j) {
        const double far_edge = static_cast<double>(j + t.highlight) * res;
        const auto shadow = std::max<std::size_t>(2, std::lround(far_edge * t.shadow_ratio / res));
        if (j + t.highlight + shadow > cols) break;
        const double nh = static_cast<double>(t.highlight * t.pings);
        const double ns = static_cast<double>(shadow * t.pings);
        const double n = nh + ns;
        const double weight = std::sqrt(nh * ns) / n;
        for (std::size_t p = 0; p + t.pings <= pings; ++p) {
          const auto [sh, sh2] = integral.box(p, p + t.pings, j, j + t.highlight);
          const auto [ss, ss2] = integral.box(p, p + t.pings, j + t.highlight, j + t.highlight + shadow);
          const double mean = (sh + ss) / n;
          const double var = (sh2 + ss2) / n - mean * mean;
          if (var <= 1e-12) continue;
          const double ncc = weight * (sh / nh - ss / ns) / std::sqrt(var);
          float& slot = score(p + half_p, j + half_c);
          if (ncc > slot) {
            slot = static_cast<float>(ncc);
            best(p + half_p, j + half_c) = static_cast<std::uint8_t>(t.model);
          }
        }
      }
    }

    for (std::size_t p = 0; p < pings; ++p)
      for (std::size_t j = 0; j < cols; ++j) {
        const float v = score(p, j);
        if (v < config_.threshold || v <= 0.0f) continue;
        bool peak = true;
        for (std::size_t dp = p ? p - 1 : 0; peak && dp <= std::min(p + 1, pings - 1); ++dp)
          for (std::size_t dj = j ? j - 1 : 0; dj <= std::min(j + 1, cols - 1); ++dj) {
            const float w = score(dp, dj);
            // Plateaus keep only their first cell in row-major order.
            if (w > v || (w == v && std::tie(dp, dj) < std::tie(p, j))) {
              peak = false;
              break;
            }
          }
        if (peak) candidates.push_back({v, p, j, side, best(p, j)});
      }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.score, a.side, a.ping, a.col) < std::tie(a.score, b.side, b.ping, b.col);
  });

  std::vector<Contact> contacts;
  for (const Candidate& c : candidates) {
    const double ground = (static_cast<double>(c.col) + 0.5) * res;
    const GeoPoint geo = image.ground_position(c.ping, c.side, ground);
    const bool suppressed = std::any_of(contacts.begin(), contacts.end(), [&](const Contact& k) {
      return distance(k.geo, geo) < config_.nms_radius;
    });
    if (suppressed) continue;
    const auto bin = image.bin_for(c.side, std::hypot(ground, altitude));
    if (!bin) continue;
    contacts.push_back({c.ping, *bin, geo, std::clamp(c.score, 0.0, 1.0), config_.models[c.model].name});
  }
  return contacts;
}

ChangeOracleDetector::ChangeOracleDetector(SidescanImage base, double p, std::uint64_t seed)
    : base_(std::move(base)), p_(p), seed_(seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidParams, "p must lie in [0, 1]");
}

std::vector<Contact> ChangeOracleDetector::detect(const SidescanImage& image) const {
  if (image.pings() != base_.pings() || image.bins() != base_.bins())
    throw Error(ErrorCode::DimensionMismatch, "image does not match the oracle's base image");
  const std::size_t rows = image.pings();
  const std::size_t cols = image.bins();
  const double altitude = estimate_altitude(base_);
  Raster<std::uint8_t> seen(rows, cols, 0);
  std::vector<Contact> contacts;
  std::vector<PixelIndex> stack;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (seen(r, c) || image.intensities(r, c) == base_.intensities(r, c)) continue;
      double wsum = 0.0, wp = 0.0, wb = 0.0;
      double n = 0.0, sp = 0.0, sb = 0.0;
      seen(r, c) = 1;
      stack.push_back({r, c});
      while (!stack.empty()) {
        const PixelIndex px = stack.back();
        stack.pop_back();
        const double gain = image.intensities(px.ping, px.bin) - base_.intensities(px.ping, px.bin);
        if (gain > 0.0) {
          wsum += gain;
          wp += gain * static_cast<double>(px.ping);
          wb += gain * static_cast<double>(px.bin);
        }
        n += 1.0;
        sp += static_cast<double>(px.ping);
        sb += static_cast<double>(px.bin);
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const auto nr = static_cast<std::ptrdiff_t>(px.ping) + dr;
            const auto nc = static_cast<std::ptrdiff_t>(px.bin) + dc;
            if (nr < 0 || nc < 0 || nr >= static_cast<std::ptrdiff_t>(rows) ||
                nc >= static_cast<std::ptrdiff_t>(cols))
              continue;
            const auto ur = static_cast<std::size_t>(nr);
            const auto uc = static_cast<std::size_t>(nc);
            if (seen(ur, uc) || image.intensities(ur, uc) == base_.intensities(ur, uc)) continue;
            seen(ur, uc) = 1;
            stack.push_back({ur, uc});
          }
      }
      const double fp = wsum > 0.0 ? wp / wsum : sp / n;
      const double fb = wsum > 0.0 ? wb / wsum : sb / n;
      const auto ping = static_cast<std::size_t>(std::lround(fp));
      const auto bin = static_cast<std::size_t>(std::lround(fb));
      if (to_unit(mix_seed(seed_, {ping, bin})) >= p_) continue;
      contacts.push_back({ping, bin, contact_position(image, ping, bin, altitude), 1.0, "oracle"});
    }
  return contacts;
}

std::size_t Association::hits() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(matches.begin(), matches.end(), [](const Match& m) { return m.contact.has_value(); }));
}

Association associate(std::span<const Contact> contacts,
                      std::span<const InsertionRecord> insertions, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParams, "association radius must be positive");
  struct Pair {
    double d;
    std::size_t i, c;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < insertions.size(); ++i)
    for (std::size_t c = 0; c < contacts.size(); ++c) {
      const double d = distance(insertions[i].geo, contacts[c].geo);
      if (d <= radius) pairs.push_back({d, i, c});
    }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return std::tie(a.d, a.i, a.c) < std::tie(b.d, b.i, b.c); });

  Association out;
  out.matches.resize(insertions.size());
  for (std::size_t i = 0; i < insertions.size(); ++i) out.matches[i].insertion = i;
  std::vector<std::uint8_t> used(contacts.size(), 0);
  for (const Pair& p : pairs) {
    if (out.matches[p.i].contact || used[p.c]) continue;
    out.matches[p.i].contact = p.c;
    used[p.c] = 1;
  }
  for (std::size_t c = 0; c < contacts.size(); ++c)
    if (!used[c]) out.false_alarms.push_back(contacts[c]);
  return out;
}

Json contacts_to_json(std::span<const Contact> contacts) {
  Json out = Json::array();
  for (const Contact& c : contacts)
    out.push_back({{"ping", c.ping}, {"bin", c.bin}, {"e", c.geo.e}, {"n", c.geo.n},
                   {"confidence", c.confidence}, {"class", c.label}});
  return out;
}

std::vector<Contact> contacts_from_json(const Json& json) {
  if (!json.is_array()) throw Error(ErrorCode::MalformedHeader, "contacts JSON must be an array");
  std::vector<Contact> out;
  try {
    for (const Json& j : json)
      out.push_back({j.at("ping").get<std::size_t>(), j.at("bin").get<std::size_t>(),
                     {j.at("e").get<double>(), j.at("n").get<double>()},
                     j.at("confidence").get<double>(), j.at("class").get<std::string>()});
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad contacts JSON: ") + e.what());
  }
  return out;
}

}  // namespace seafloor
