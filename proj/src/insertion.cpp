#include "seafloor/insertion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seafloor/error.hpp"
#include "seafloor/random.hpp"
#include "seafloor/sidescan_sim.hpp"

namespace seafloor {

double ObjectModel::max_height() const noexcept {
  const auto v = heightfield.values();
  return v.empty() ? 0.0 : static_cast<double>(*std::max_element(v.begin(), v.end()));
}

double ObjectModel::bounding_radius() const noexcept { return 0.5 * std::hypot(length(), width()); }

double ObjectModel::height_at(double u, double v) const noexcept {
  // Cell centres sit at ((i + 0.5) * res - length/2).
  const double x = (u + 0.5 * length()) / resolution - 0.5;
  const double y = (v + 0.5 * width()) / resolution - 0.5;
  const double rows = static_cast<double>(heightfield.rows());
  const double cols = static_cast<double>(heightfield.cols());
  if (x < -0.5 || y < -0.5 || x > rows - 0.5 || y > cols - 0.5) return 0.0;
  const double cx = std::clamp(x, 0.0, rows - 1.0);
  const double cy = std::clamp(y, 0.0, cols - 1.0);
  const auto r0 = static_cast<std::size_t>(cx);
  const auto c0 = static_cast<std::size_t>(cy);
  const std::size_t r1 = std::min(r0 + 1, heightfield.rows() - 1);
  const std::size_t c1 = std::min(c0 + 1, heightfield.cols() - 1);
  const double tr = cx - static_cast<double>(r0);
  const double tc = cy - static_cast<double>(c0);
  const double a = heightfield(r0, c0) + (heightfield(r0, c1) - heightfield(r0, c0)) * tc;
  const double b = heightfield(r1, c0) + (heightfield(r1, c1) - heightfield(r1, c0)) * tc;
  return a + (b - a) * tr;
}

void ObjectModel::validate() const {
  if (heightfield.empty() || !(resolution > 0.0))
    throw Error(ErrorCode::InvalidParams, "object model '" + name + "' has an empty footprint");
  for (float h : heightfield.values())
    if (!(h >= 0.0f)) throw Error(ErrorCode::InvalidParams, "object heights must be non-negative");
  if (!(reflectivity >= 0.0)) throw Error(ErrorCode::InvalidParams, "reflectivity must be non-negative");
}

namespace {

std::size_t cells(double metres, double resolution) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(metres / resolution)));
}

template <typename F>
ObjectModel tabulate(std::string name, double length, double width, double resolution, F&& f) {
  if (!(length > 0.0) || !(width > 0.0) || !(resolution > 0.0))
    throw Error(ErrorCode::InvalidParams, "object dimensions must be positive");
  ObjectModel m;
  m.name = std::move(name);
  m.resolution = resolution;
  m.heightfield = Raster<float>(cells(length, resolution), cells(width, resolution));
  const double l = m.length();
  const double w = m.width();
  for (std::size_t r = 0; r < m.heightfield.rows(); ++r)
    for (std::size_t c = 0; c < m.heightfield.cols(); ++c) {
      const double u = (static_cast<double>(r) + 0.5) * resolution - 0.5 * l;
      const double v = (static_cast<double>(c) + 0.5) * resolution - 0.5 * w;
      m.heightfield(r, c) = static_cast<float>(std::max(0.0, f(u, v)));
    }
  return m;
}

}  // namespace

ObjectModel make_cylinder(double length, double diameter, double resolution) {
  const double radius = 0.5 * diameter;
  return tabulate("cylinder", length, diameter, resolution, [&](double, double v) {
    const double s = radius * radius - v * v;
    return s > 0.0 ? radius + std::sqrt(s) : 0.0;
  });
}

ObjectModel make_truncated_cone(double base_radius, double top_radius, double height,
                                double resolution) {
  if (top_radius > base_radius || top_radius < 0.0 || !(height > 0.0))
    throw Error(ErrorCode::InvalidParams, "truncated cone needs 0 <= top radius <= base radius");
  return tabulate("truncated_cone", 2.0 * base_radius, 2.0 * base_radius, resolution,
                  [&](double u, double v) {
                    const double rho = std::hypot(u, v);
                    if (rho > base_radius) return 0.0;
                    if (rho <= top_radius || base_radius == top_radius) return height;
                    return height * (base_radius - rho) / (base_radius - top_radius);
                  });
}

ObjectModel make_wedge(double length, double width, double height, double resolution) {
  return tabulate("wedge", length, width, resolution,
                  [&](double, double v) { return height * (v + 0.5 * width) / width; });
}

ObjectModel make_sphere(double radius, double resolution) {
  return tabulate("sphere", 2.0 * radius, 2.0 * radius, resolution, [&](double u, double v) {
    const double s = radius * radius - u * u - v * v;
    return s > 0.0 ? radius + std::sqrt(s) : 0.0;
  });
}

std::vector<ObjectModel> default_object_models() {
  return {make_cylinder(2.0, 0.5), make_truncated_cone(0.5, 0.25, 0.4)};
}

double default_min_separation(std::span<const ObjectModel> models) {
  double longest = 0.0;
  for (const ObjectModel& m : models) longest = std::max({longest, m.length(), m.width()});
  return 2.0 * longest;
}

namespace {

// Object height in the track frame: x along-track, y ground range offset.
struct PlacedObject {
  const ObjectModel& model;
  double cos_yaw;
  double sin_yaw;

  double height(double x, double y) const noexcept {
    const double u = x * cos_yaw + y * sin_yaw;
    const double v = -x * sin_yaw + y * cos_yaw;
    return model.height_at(u, v);
  }
};

struct RingStats {
  double mean = 0.0;
  double cv = 1.0;
};

struct Box {
  std::size_t p0, p1, b0, b1;  // inclusive
};

RingStats ring_stats(const SidescanImage& image, const Box& box, double ring_m, double altitude) {
  const auto ring_p = static_cast<std::ptrdiff_t>(std::ceil(ring_m / image.ping_resolution));
  const auto ring_b = static_cast<std::ptrdiff_t>(std::ceil(ring_m / image.bin_resolution));
  const auto pings = static_cast<std::ptrdiff_t>(image.pings());
  const auto bins = static_cast<std::ptrdiff_t>(image.bins());
  double sum = 0.0;
  double sum2 = 0.0;
  std::size_t n = 0;
  for (std::ptrdiff_t p = static_cast<std::ptrdiff_t>(box.p0) - ring_p;
       p <= static_cast<std::ptrdiff_t>(box.p1) + ring_p; ++p) {
    if (p < 0 || p >= pings) continue;
    for (std::ptrdiff_t b = static_cast<std::ptrdiff_t>(box.b0) - ring_b;
         b <= static_cast<std::ptrdiff_t>(box.b1) + ring_b; ++b) {
      if (b < 0 || b >= bins) continue;
      const bool inside = p >= static_cast<std::ptrdiff_t>(box.p0) &&
                          p <= static_cast<std::ptrdiff_t>(box.p1) &&
                          b >= static_cast<std::ptrdiff_t>(box.b0) &&
                          b <= static_cast<std::ptrdiff_t>(box.b1);
      if (inside) continue;
      if (image.bin_geometry(static_cast<std::size_t>(b)).slant < altitude) continue;
      const double v = image.intensities(static_cast<std::size_t>(p), static_cast<std::size_t>(b));
      sum += v;
      sum2 += v * v;
      ++n;
    }
  }
  RingStats stats;
  if (n == 0) return stats;
  stats.mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum2 / static_cast<double>(n) - stats.mean * stats.mean);
  stats.cv = stats.mean > 0.0 ? std::min(1.5, std::sqrt(var) / stats.mean) : 1.0;
  return stats;
}

// Mean water-column level inside the nadir gap of the given pings.
double nadir_level(const SidescanImage& image, std::size_t p0, std::size_t p1, double altitude) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < image.bins(); ++b) {
    if (image.bin_geometry(b).slant >= 0.8 * altitude) continue;
    for (std::size_t p = p0; p <= p1; ++p) {
      sum += image.intensities(p, b);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

struct PendingPixel {
  PixelIndex pixel;
  double lit_rel;
  double shadow_frac;
};

InsertionResult insert_impl(SidescanImage& image, const ObjectModel& model,
                            const ContactLocation& at, double yaw, std::uint64_t seed,
                            const InsertionConfig& config, double altitude) {
  model.validate();
  const double a = altitude;
  const double R = at.ground_range;
  const double radius = model.bounding_radius();
  const double h_max = model.max_height();
  if (h_max >= a) throw Error(ErrorCode::InvalidParams, "object taller than the sensor altitude");

  const auto sides = image.side_signs();
  if (std::find(sides.begin(), sides.end(), at.side) == sides.end())
    throw Error(ErrorCode::FootprintOutsideImage, "requested side is not present in the image");
  if (R - radius <= 0.0)
    throw Error(ErrorCode::InsideNadir, "object footprint reaches the nadir");
  const auto half_pings = static_cast<std::size_t>(std::ceil(radius / image.ping_resolution));
  if (at.ping < half_pings || at.ping + half_pings >= image.pings())
    throw Error(ErrorCode::FootprintOutsideImage, "object footprint runs off the ping range");
  const double max_slant = static_cast<double>(image.bins_per_side()) * image.bin_resolution;
  if (ground_to_slant(R + radius, a) >= max_slant)
    throw Error(ErrorCode::FootprintOutsideImage, "object footprint beyond maximum range");

  InsertionResult result;
  result.record = {model.name, at.ping, R, at.side, yaw, 0, image.ground_position(at.ping, at.side, R)};
  if (h_max <= 0.0) return result;

  const PlacedObject placed{model, std::cos(yaw), std::sin(yaw)};
  const double res = image.bin_resolution;
  const double step = config.ray_step > 0.0 ? config.ray_step : 0.25 * res;
  const double margin = 4.0 * res;
  const double r0 = std::max(step, R - radius - margin);
  const double r1 = (R + radius) * a / (a - h_max) + margin;
  const auto samples = static_cast<std::size_t>(std::ceil((r1 - r0) / step)) + 1;
  const std::size_t per_side = image.bins_per_side();
  const double grad_h = 0.5 * model.resolution;

  std::vector<PendingPixel> pending;
  std::vector<double> ranges(samples);
  std::vector<double> heights(samples);
  for (std::size_t p = at.ping - half_pings; p <= at.ping + half_pings; ++p) {
    const double x = (static_cast<double>(p) - static_cast<double>(at.ping)) * image.ping_resolution;
    bool touches = false;
    for (std::size_t k = 0; k < samples; ++k) {
      ranges[k] = r0 + static_cast<double>(k) * step;
      heights[k] = placed.height(x, ranges[k] - R);
      touches = touches || heights[k] > 0.0;
    }
    if (!touches) continue;
    const auto shadowed = occlusion_mask(ranges, heights, a);

    SlantAccumulator scene(per_side, res);
    SlantAccumulator flat(per_side, res);
    std::vector<std::uint8_t> marked(per_side, 0);
    auto mark = [&](double slant) {
      const auto k = static_cast<std::size_t>(slant / res);
      if (k < per_side) marked[k] = 1;
    };
    PingShadow ground_shadow{p, 0.0, 0.0};
    bool in_ground_shadow = false;
    for (std::size_t k = 0; k < samples; ++k) {
      const double r = ranges[k];
      const double z = heights[k];
      const double s_flat = std::hypot(r, a);
      const double s_obj = std::hypot(r, a - z);
      flat.add(s_flat, a / s_flat, false);
      if (shadowed[k]) {
        scene.add(s_obj, 0.0, true);
        if (z <= 0.0) {
          if (!in_ground_shadow) ground_shadow.start = r;
          in_ground_shadow = true;
          ground_shadow.end = r + step;
        }
      } else {
        double value = a / s_flat;
        if (z > 0.0) {
          const double y = r - R;
          const double dzdx = (placed.height(x + grad_h, y) - placed.height(x - grad_h, y)) / (2 * grad_h);
          const double dzdy = (placed.height(x, y + grad_h) - placed.height(x, y - grad_h)) / (2 * grad_h);
          const double norm = std::sqrt(dzdx * dzdx + dzdy * dzdy + 1.0);
          const double cos_inc = std::max(0.0, (dzdy * r + (a - z)) / (norm * s_obj));
          value = model.reflectivity * cos_inc;
        }
        scene.add(s_obj, value, false);
      }
      if (z > 0.0 || shadowed[k]) {
        mark(s_obj);
        mark(s_flat);
      }
    }
    if (in_ground_shadow) result.shadows.push_back(ground_shadow);

    for (std::size_t k = 0; k < per_side; ++k) {
      if (!marked[k]) continue;
      const double bin_slant = (static_cast<double>(k) + 0.5) * res;
      const auto col = image.bin_for(at.side, bin_slant);
      if (!col) continue;
      const double flat_mean = flat.count(k) ? flat.mean(k) : a / std::max(a, bin_slant);
      PendingPixel px{{p, *col}, 0.0, 1.0};
      if (scene.count(k) > 0) {
        px.lit_rel = scene.mean(k) / flat_mean;
        px.shadow_frac = scene.shadow_fraction(k);
      }
      pending.push_back(px);
    }
  }
  if (pending.empty()) return result;

  Box box{pending.front().pixel.ping, pending.front().pixel.ping, pending.front().pixel.bin,
          pending.front().pixel.bin};
  for (const PendingPixel& px : pending) {
    box.p0 = std::min(box.p0, px.pixel.ping);
    box.p1 = std::max(box.p1, px.pixel.ping);
    box.b0 = std::min(box.b0, px.pixel.bin);
    box.b1 = std::max(box.b1, px.pixel.bin);
  }
  const RingStats ring = ring_stats(image, box, config.ring_width, a);
  const double shadow_level = config.shadow_floor + nadir_level(image, box.p0, box.p1, a);

  result.pixels.reserve(pending.size());
  for (const PendingPixel& px : pending) {
    Rng rng(mix_seed(seed, {px.pixel.ping, px.pixel.bin}));
    const double e1 = rng.exponential();
    const double e2 = rng.exponential();
    const double lit = ring.mean * px.lit_rel * (1.0 + ring.cv * (e1 - 1.0));
    const double dark = px.shadow_frac * shadow_level * e2;
    image.intensities(px.pixel.ping, px.pixel.bin) =
        static_cast<float>(std::clamp(std::max(0.0, lit) + dark, 0.0, 1.0));
    result.pixels.push_back(
        {px.pixel, px.shadow_frac >= 0.5 ? PixelKind::Shadow : PixelKind::Highlight});
  }
  return result;
}

}  // namespace

InsertionResult insert_contact_in_place(SidescanImage& image, const ObjectModel& model,
                                        const ContactLocation& at, double yaw, std::uint64_t seed,
                                        const InsertionConfig& config) {
  return insert_impl(image, model, at, yaw, seed, config, estimate_altitude(image));
}

InsertionResult insert_contact(const SidescanImage& image, const ObjectModel& model,
                               const ContactLocation& at, double yaw, std::uint64_t seed,
                               const InsertionConfig& config) {
  SidescanImage copy = image;
  InsertionResult result = insert_contact_in_place(copy, model, at, yaw, seed, config);
  result.image = std::move(copy);
  return result;
}

RandomInsertion insert_random_contacts(const SidescanImage& image,
                                       std::span<const ObjectModel> models, std::size_t count,
                                       double min_separation, std::uint64_t seed,
                                       std::uint32_t pass, const InsertionConfig& config) {
  if (count < 1) throw Error(ErrorCode::InvalidParams, "contact count must be at least 1");
  if (models.empty()) throw Error(ErrorCode::InvalidParams, "no object models supplied");
  if (min_separation < 0.0) throw Error(ErrorCode::InvalidParams, "separation must be non-negative");

  const double a = estimate_altitude(image);
  double radius = 0.0;
  double tallest = 0.0;
  for (const ObjectModel& m : models) {
    m.validate();
    radius = std::max(radius, m.bounding_radius());
    tallest = std::max(tallest, m.max_height());
  }
  const double max_slant = static_cast<double>(image.bins_per_side()) * image.bin_resolution;
  const double max_ground = max_slant > a ? slant_to_ground(max_slant, a) : 0.0;
  const double r_lo = std::max(config.min_ground_range, radius + image.bin_resolution);
  const double r_hi = max_ground - radius - image.bin_resolution;
  const auto half_pings = static_cast<std::size_t>(std::ceil(radius / image.ping_resolution));
  if (r_hi <= r_lo || image.pings() <= 2 * half_pings + 1)
    throw Error(ErrorCode::PlacementInfeasible, "image too small for the object set");
  const std::size_t p_lo = half_pings;
  const std::size_t p_span = image.pings() - 2 * half_pings - 1;
  const auto sides = image.side_signs();

  // Disjoint disks of diameter min_separation must pack into the dilated region.
  if (min_separation > 0.0) {
    const double w = static_cast<double>(p_span) * image.ping_resolution + min_separation;
    const double h = (r_hi - r_lo) + min_separation;
    const double disk = std::numbers::pi * min_separation * min_separation / 4.0;
    const double bound = 0.9069 * w * h * static_cast<double>(sides.size()) / disk;
    if (static_cast<double>(count) > bound)
      throw Error(ErrorCode::PlacementInfeasible,
                  "cannot place " + std::to_string(count) + " contacts " +
                      std::to_string(min_separation) + " m apart");
  }

  Rng rng(mix_seed(seed, {0x1A5Eu, pass}));
  struct Candidate {
    ContactLocation at;
    double yaw;
    std::size_t model;
    GeoPoint geo;
  };
  std::vector<Candidate> chosen;
  chosen.reserve(count);
  const std::size_t max_attempts = 200 * count + 1000;
  for (std::size_t attempt = 0; attempt < max_attempts && chosen.size() < count; ++attempt) {
    Candidate c;
    c.at.ping = p_lo + static_cast<std::size_t>(rng.below(p_span + 1));
    c.at.ground_range = rng.uniform(r_lo, r_hi);
    c.at.side = sides[rng.below(sides.size())];
    c.yaw = rng.uniform(0.0, std::numbers::pi);
    c.model = static_cast<std::size_t>(rng.below(models.size()));
    c.geo = image.ground_position(c.at.ping, c.at.side, c.at.ground_range);
    const bool clear = std::none_of(chosen.begin(), chosen.end(), [&](const Candidate& o) {
      return distance(o.geo, c.geo) < min_separation;
    });
    if (clear) chosen.push_back(c);
  }
  if (chosen.size() < count)
    throw Error(ErrorCode::PlacementInfeasible,
                "placed only " + std::to_string(chosen.size()) + " of " + std::to_string(count) +
                    " contacts");

  RandomInsertion out;
  out.image = image;
  out.records.reserve(count);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const Candidate& c = chosen[i];
    InsertionResult r = insert_impl(out.image, models[c.model], c.at, c.yaw,
                                    mix_seed(seed, {0xC0DEu, pass, i}), config, a);
    r.record.pass = pass;
    out.records.push_back(std::move(r.record));
  }
  return out;
}

Json records_to_json(std::span<const InsertionRecord> records) {
  Json out = Json::array();
  for (const InsertionRecord& r : records)
    out.push_back({{"object", r.object}, {"ping", r.ping}, {"ground_range", r.ground_range},
                   {"side", r.side}, {"yaw", r.yaw}, {"pass", r.pass}, {"e", r.geo.e}, {"n", r.geo.n}});
  return out;
}

std::vector<InsertionRecord> records_from_json(const Json& json) {
  if (!json.is_array()) throw Error(ErrorCode::MalformedHeader, "insertion records must be an array");
  std::vector<InsertionRecord> out;
  try {
    for (const Json& j : json) {
      InsertionRecord r;
      r.object = j.at("object").get<std::string>();
      r.ping = j.at("ping").get<std::size_t>();
      r.ground_range = j.at("ground_range").get<double>();
      r.side = j.at("side").get<SideSign>();
      r.yaw = j.at("yaw").get<double>();
      r.pass = j.at("pass").get<std::uint32_t>();
      r.geo = {j.at("e").get<double>(), j.at("n").get<double>()};
      out.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad insertion records: ") + e.what());
  }
  return out;
}

}  // namespace seafloor
