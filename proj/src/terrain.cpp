#include "seafloor/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seafloor/error.hpp"
#include "seafloor/random.hpp"

namespace seafloor {

const std::vector<ClassInfo>& terrain_catalog() {
  static const std::vector<ClassInfo> catalog = {
      {0, "flat_sand"}, {1, "mud"},           {2, "sand_ripples"},
      {3, "clutter"},   {4, "marine_growth"}, {5, "rock_outcrop"},
  };
  return catalog;
}

std::string_view terrain_name(TerrainClass c) noexcept {
  static constexpr std::string_view names[] = {"flat_sand", "mud",           "sand_ripples",
                                               "clutter",   "marine_growth", "rock_outcrop"};
  return names[static_cast<std::size_t>(c)];
}

TerrainClass terrain_from_id(int id) {
  if (id < 0 || id >= static_cast<int>(kTerrainClassCount))
    throw Error(ErrorCode::UnknownClass, "unknown terrain class id " + std::to_string(id));
  return static_cast<TerrainClass>(id);
}

TerrainClass terrain_from_name(std::string_view name) {
  for (const ClassInfo& info : terrain_catalog())
    if (info.name == name) return static_cast<TerrainClass>(info.id);
  throw Error(ErrorCode::UnknownClass, "unknown terrain class '" + std::string(name) + "'");
}

namespace {

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) noexcept {
  const std::uint64_t h = mix_seed(seed, {static_cast<std::uint64_t>(ix), static_cast<std::uint64_t>(iy)});
  return 2.0 * to_unit(h) - 1.0;
}

double smooth(double t) noexcept { return t * t * (3.0 - 2.0 * t); }

double noise_octave(double x, double y, std::uint64_t seed) noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double tx = smooth(x - fx);
  const double ty = smooth(y - fy);
  const double a = lattice(ix, iy, seed);
  const double b = lattice(ix + 1, iy, seed);
  const double c = lattice(ix, iy + 1, seed);
  const double d = lattice(ix + 1, iy + 1, seed);
  return (a + (b - a) * tx) * (1.0 - ty) + (c + (d - c) * tx) * ty;
}

// Cell centre of (row, col) in the patch.
GeoPoint cell_point(const TerrainPatch& t, std::size_t row, std::size_t col) noexcept {
  return {t.origin.e + (static_cast<double>(col) + 0.5) * t.resolution,
          t.origin.n + (static_cast<double>(row) + 0.5) * t.resolution};
}

template <typename F>
void fill(TerrainPatch& t, F&& f) {
  for (std::size_t r = 0; r < t.height.rows(); ++r)
    for (std::size_t c = 0; c < t.height.cols(); ++c) {
      const GeoPoint p = cell_point(t, r, c);
      float z = 0.0f;
      float bs = 0.0f;
      f(p, z, bs);
      t.height(r, c) = z;
      t.backscatter(r, c) = std::clamp(bs, 0.0f, 1.0f);
    }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, what);
}

void validate(const TerrainParams& p) {
  require(p.resolution > 0.0, "terrain resolution must be positive");
  require(p.sand_backscatter >= 0.0 && p.sand_backscatter <= 1.0, "sand backscatter outside [0,1]");
  require(p.mud_backscatter >= 0.0 && p.mud_backscatter <= 1.0, "mud backscatter outside [0,1]");
  require(p.sand_roughness >= 0.0 && p.mud_roughness >= 0.0, "roughness must be non-negative");
  require(p.ripples.wavelength > 0.0, "ripple wavelength must be positive");
  require(p.ripples.amplitude >= 0.0, "ripple amplitude must be non-negative");
  require(p.clutter.density >= 0.0, "clutter density must be non-negative");
  require(p.clutter.min_radius > 0.0 && p.clutter.max_radius >= p.clutter.min_radius,
          "clutter radii invalid");
  require(p.clutter.min_height >= 0.0 && p.clutter.max_height >= p.clutter.min_height,
          "clutter heights invalid");
  require(p.growth.coverage >= 0.0 && p.growth.coverage <= 1.0, "growth coverage outside [0,1]");
  require(p.growth.patch_scale > 0.0 && p.growth.height >= 0.0, "growth parameters invalid");
  require(p.outcrop.scale > 0.0 && p.outcrop.relief >= 0.0, "outcrop parameters invalid");
}

void sand_base(TerrainPatch& t, const TerrainParams& p, std::uint64_t seed) {
  fill(t, [&](GeoPoint q, float& z, float& bs) {
    z = static_cast<float>(p.sand_roughness * 2.0 * value_noise(q.e, q.n, 0.25, 2, seed));
    bs = static_cast<float>(p.sand_backscatter * (1.0 + 0.08 * value_noise(q.e, q.n, 2.0, 2, seed + 1)));
  });
}

void place_rocks(TerrainPatch& t, const ClutterParams& c, std::uint64_t seed) {
  Rng rng(mix_seed(seed, {0xC1u}));
  const double area = t.width_m() * t.height_m();
  const std::uint64_t count = rng.poisson(c.density * area);
  t.features.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    TerrainFeature f;
    f.centre = {t.origin.e + rng.uniform() * t.width_m(), t.origin.n + rng.uniform() * t.height_m()};
    f.radius_major = rng.uniform(c.min_radius, c.max_radius);
    f.radius_minor = f.radius_major * rng.uniform(0.5, 1.0);
    f.angle = rng.uniform(0.0, std::numbers::pi);
    f.height = rng.uniform(c.min_height, c.max_height);
    t.features.push_back(f);
  }
  const double res = t.resolution;
  for (const TerrainFeature& f : t.features) {
    const double reach = f.radius_major;
    const auto c0 = static_cast<std::ptrdiff_t>(std::floor((f.centre.e - reach - t.origin.e) / res));
    const auto c1 = static_cast<std::ptrdiff_t>(std::ceil((f.centre.e + reach - t.origin.e) / res));
    const auto r0 = static_cast<std::ptrdiff_t>(std::floor((f.centre.n - reach - t.origin.n) / res));
    const auto r1 = static_cast<std::ptrdiff_t>(std::ceil((f.centre.n + reach - t.origin.n) / res));
    const double ca = std::cos(f.angle);
    const double sa = std::sin(f.angle);
    for (std::ptrdiff_t r = std::max<std::ptrdiff_t>(r0, 0);
         r <= std::min<std::ptrdiff_t>(r1, static_cast<std::ptrdiff_t>(t.height.rows()) - 1); ++r)
      for (std::ptrdiff_t cc = std::max<std::ptrdiff_t>(c0, 0);
           cc <= std::min<std::ptrdiff_t>(c1, static_cast<std::ptrdiff_t>(t.height.cols()) - 1); ++cc) {
        const GeoPoint q = cell_point(t, static_cast<std::size_t>(r), static_cast<std::size_t>(cc));
        const double dx = q.e - f.centre.e;
        const double dy = q.n - f.centre.n;
        const double u = (dx * ca + dy * sa) / f.radius_major;
        const double v = (-dx * sa + dy * ca) / f.radius_minor;
        const double s = 1.0 - u * u - v * v;
        if (s <= 0.0) continue;
        const auto z = static_cast<float>(f.height * std::sqrt(s));
        float& cell = t.height(static_cast<std::size_t>(r), static_cast<std::size_t>(cc));
        if (z > cell) {
          cell = z;
          t.backscatter(static_cast<std::size_t>(r), static_cast<std::size_t>(cc)) =
              static_cast<float>(c.rock_backscatter);
        }
      }
  }
}

void marine_growth(TerrainPatch& t, const TerrainParams& p, std::uint64_t seed) {
  const GrowthParams& g = p.growth;
  Raster<float> field(t.height.rows(), t.height.cols());
  for (std::size_t r = 0; r < field.rows(); ++r)
    for (std::size_t c = 0; c < field.cols(); ++c) {
      const GeoPoint q = cell_point(t, r, c);
      field(r, c) = static_cast<float>(value_noise(q.e, q.n, g.patch_scale, 3, seed + 7));
    }
  // Threshold at the quantile that yields the requested coverage.
  std::vector<float> sorted(field.values().begin(), field.values().end());
  const auto k = static_cast<std::size_t>(
      std::clamp((1.0 - g.coverage) * static_cast<double>(sorted.size()), 0.0,
                 static_cast<double>(sorted.size() - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  const float threshold = g.coverage <= 0.0 ? 2.0f : sorted[k];

  for (std::size_t r = 0; r < field.rows(); ++r)
    for (std::size_t c = 0; c < field.cols(); ++c) {
      const GeoPoint q = cell_point(t, r, c);
      const double ramp = std::clamp((field(r, c) - threshold) / 0.08, 0.0, 1.0);
      if (ramp <= 0.0) continue;
      const double tuft = 0.6 + 0.4 * value_noise(q.e, q.n, 0.2, 2, seed + 9);
      t.height(r, c) += static_cast<float>(g.height * ramp * tuft);
      const double bs = g.backscatter * (0.75 + 0.25 * value_noise(q.e, q.n, 0.3, 1, seed + 11));
      t.backscatter(r, c) = static_cast<float>((1.0 - ramp) * t.backscatter(r, c) + ramp * bs);
    }
}

}  // namespace

double value_noise(double x, double y, double scale, int octaves, std::uint64_t seed) noexcept {
  double sum = 0.0;
  double norm = 0.0;
  double amplitude = 1.0;
  double freq = 1.0 / scale;
  for (int o = 0; o < octaves; ++o) {
    sum += amplitude * noise_octave(x * freq, y * freq, mix_seed(seed, {static_cast<std::uint64_t>(o)}));
    norm += amplitude;
    amplitude *= 0.5;
    freq *= 2.0;
  }
  return norm > 0.0 ? sum / norm : 0.0;
}

bool TerrainPatch::contains(GeoPoint p) const noexcept {
  return p.e >= origin.e && p.n >= origin.n && p.e <= origin.e + width_m() &&
         p.n <= origin.n + height_m();
}

namespace {

struct Bilinear {
  std::size_t r0, r1, c0, c1;
  double tr, tc;
};

Bilinear locate(const TerrainPatch& t, GeoPoint p) noexcept {
  const double x = std::clamp((p.e - t.origin.e) / t.resolution - 0.5, 0.0,
                              static_cast<double>(t.height.cols() - 1));
  const double y = std::clamp((p.n - t.origin.n) / t.resolution - 0.5, 0.0,
                              static_cast<double>(t.height.rows() - 1));
  Bilinear b;
  b.c0 = static_cast<std::size_t>(x);
  b.r0 = static_cast<std::size_t>(y);
  b.c1 = std::min(b.c0 + 1, t.height.cols() - 1);
  b.r1 = std::min(b.r0 + 1, t.height.rows() - 1);
  b.tc = x - static_cast<double>(b.c0);
  b.tr = y - static_cast<double>(b.r0);
  return b;
}

double sample(const Raster<float>& m, const Bilinear& b) noexcept {
  const double top = m(b.r0, b.c0) + (m(b.r0, b.c1) - m(b.r0, b.c0)) * b.tc;
  const double bottom = m(b.r1, b.c0) + (m(b.r1, b.c1) - m(b.r1, b.c0)) * b.tc;
  return top + (bottom - top) * b.tr;
}

}  // namespace

double TerrainPatch::height_at(GeoPoint p) const noexcept { return sample(height, locate(*this, p)); }

void TerrainPatch::height_and_gradient(GeoPoint p, double& z, double& dzde,
                                       double& dzdn) const noexcept {
  const Bilinear b = locate(*this, p);
  z = sample(height, b);
  const double h = resolution;
  dzde = (height_at({p.e + 0.5 * h, p.n}) - height_at({p.e - 0.5 * h, p.n})) / h;
  dzdn = (height_at({p.e, p.n + 0.5 * h}) - height_at({p.e, p.n - 0.5 * h})) / h;
}

double TerrainPatch::backscatter_at(GeoPoint p) const noexcept {
  return sample(backscatter, locate(*this, p));
}

std::uint8_t TerrainPatch::truth_at(GeoPoint p) const noexcept {
  const Bilinear b = locate(*this, p);
  const std::size_t r = b.tr < 0.5 ? b.r0 : b.r1;
  const std::size_t c = b.tc < 0.5 ? b.c0 : b.c1;
  return truth(r, c);
}

TerrainPatch generate_terrain(TerrainClass kind, double extent_e, double extent_n,
                              const TerrainParams& params, std::uint64_t seed, GeoPoint origin) {
  if (static_cast<std::size_t>(kind) >= kTerrainClassCount)
    throw Error(ErrorCode::UnknownClass, "unknown terrain class");
  validate(params);
  if (!(extent_e > 0.0) || !(extent_n > 0.0))
    throw Error(ErrorCode::InvalidParams, "terrain extent must be positive");

  TerrainPatch t;
  t.origin = origin;
  t.resolution = params.resolution;
  const auto cols = static_cast<std::size_t>(std::ceil(extent_e / params.resolution));
  const auto rows = static_cast<std::size_t>(std::ceil(extent_n / params.resolution));
  t.height = Raster<float>(rows, cols);
  t.backscatter = Raster<float>(rows, cols);
  t.truth = Raster<std::uint8_t>(rows, cols, static_cast<std::uint8_t>(kind));
  t.class_catalog = terrain_catalog();

  const std::uint64_t s = mix_seed(seed, {static_cast<std::uint64_t>(kind), 0x7E55u});
  switch (kind) {
    case TerrainClass::FlatSand:
      sand_base(t, params, s);
      break;
    case TerrainClass::Mud:
      fill(t, [&](GeoPoint q, float& z, float& bs) {
        z = static_cast<float>(params.mud_roughness * 2.0 * value_noise(q.e, q.n, 1.0, 2, s));
        bs = static_cast<float>(params.mud_backscatter *
                                (1.0 + 0.15 * value_noise(q.e, q.n, 3.0, 2, s + 1)));
      });
      break;
    case TerrainClass::SandRipples: {
      const RippleParams& rp = params.ripples;
      const double ne = std::cos(rp.orientation);
      const double nn = -std::sin(rp.orientation);
      fill(t, [&](GeoPoint q, float& z, float& bs) {
        const double u = (q.e - origin.e) * ne + (q.n - origin.n) * nn;
        const double phase = 2.0 * std::numbers::pi * u / rp.wavelength +
                             rp.phase_jitter * value_noise(q.e, q.n, 8.0, 1, s + 2);
        z = static_cast<float>(rp.amplitude * std::sin(phase) +
                               params.sand_roughness * value_noise(q.e, q.n, 0.25, 1, s + 3));
        bs = static_cast<float>(params.sand_backscatter *
                                (1.0 + 0.08 * value_noise(q.e, q.n, 2.0, 2, s + 1)));
      });
      break;
    }
    case TerrainClass::Clutter:
      sand_base(t, params, s);
      place_rocks(t, params.clutter, s);
      break;
    case TerrainClass::MarineGrowth:
      sand_base(t, params, s);
      marine_growth(t, params, s);
      break;
    case TerrainClass::RockOutcrop: {
      const OutcropParams& op = params.outcrop;
      fill(t, [&](GeoPoint q, float& z, float& bs) {
        const double base = value_noise(q.e, q.n, op.scale, 4, s + 4);
        const double detail = value_noise(q.e, q.n, 0.4, 2, s + 5);
        z = static_cast<float>(op.relief * base + op.roughness * detail);
        bs = static_cast<float>(op.backscatter *
                                (0.8 + 0.35 * value_noise(q.e, q.n, 0.6, 2, s + 6)));
      });
      break;
    }
  }
  return t;
}

}  // namespace seafloor
