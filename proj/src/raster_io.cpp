#include "seafloor/raster_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "seafloor/error.hpp"
#include "seafloor/json_util.hpp"

namespace seafloor {
namespace fs = std::filesystem;

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Io, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& value) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

namespace {

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Parses one whitespace/comment separated header token as an unsigned integer.
std::size_t header_number(const std::vector<unsigned char>& bytes, std::size_t& pos,
                          const fs::path& path) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
    throw Error(ErrorCode::MalformedHeader, "bad PGM header in " + path.string());
  std::size_t value = 0;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
    if (value > 1u << 30) throw Error(ErrorCode::MalformedHeader, "PGM header value too large");
    ++pos;
  }
  return value;
}

}  // namespace

PgmSamples read_pgm_samples(const fs::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw Error(ErrorCode::MalformedHeader, path.string() + " is not a binary PGM (P5)");
  std::size_t pos = 2;
  const std::size_t width = header_number(bytes, pos, path);
  const std::size_t height = header_number(bytes, pos, path);
  const std::size_t maxval = header_number(bytes, pos, path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535)
    throw Error(ErrorCode::MalformedHeader, "invalid PGM dimensions or maxval in " + path.string());
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw Error(ErrorCode::MalformedHeader, "missing separator after PGM header");
  ++pos;

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  if (bytes.size() - pos < width * height * sample_bytes)
    throw Error(ErrorCode::MalformedHeader, "truncated PGM data in " + path.string());

  PgmSamples out;
  out.maxval = static_cast<std::uint16_t>(maxval);
  out.samples = Raster<std::uint16_t>(height, width);
  auto dst = out.samples.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    std::uint16_t v = bytes[pos + i * sample_bytes];
    if (sample_bytes == 2) v = static_cast<std::uint16_t>((v << 8) | bytes[pos + i * 2 + 1]);
    if (v > maxval) throw Error(ErrorCode::MalformedHeader, "PGM sample exceeds maxval");
    dst[i] = v;
  }
  return out;
}

Raster<float> read_pgm(const fs::path& path) {
  const PgmSamples raw = read_pgm_samples(path);
  Raster<float> out(raw.samples.rows(), raw.samples.cols());
  const auto src = raw.samples.values();
  auto dst = out.values();
  const double scale = 1.0 / raw.maxval;
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<float>(src[i] * scale);
  return out;
}

void write_pgm_samples(const fs::path& path, const Raster<std::uint16_t>& samples,
                       std::uint16_t maxval) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n" << samples.cols() << ' ' << samples.rows() << '\n' << maxval << '\n';
  std::vector<char> buffer;
  const bool wide = maxval > 255;
  buffer.reserve(samples.size() * (wide ? 2 : 1));
  for (std::uint16_t v : samples.values()) {
    if (wide) buffer.push_back(static_cast<char>(v >> 8));
    buffer.push_back(static_cast<char>(v & 0xFF));
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_pgm(const fs::path& path, const Raster<float>& values) {
  Raster<std::uint16_t> samples(values.rows(), values.cols());
  auto dst = samples.values();
  const auto src = values.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = std::clamp(static_cast<double>(src[i]), 0.0, 1.0);
    dst[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
  }
  write_pgm_samples(path, samples, 65535);
}

fs::path sidecar_path(const fs::path& raster) {
  fs::path p = raster;
  p += ".meta.json";
  return p;
}

void write_raster(const SidescanImage& image, const fs::path& path) {
  image.validate();
  write_pgm(path, image.intensities);
  Json meta;
  meta["bin_resolution"] = image.bin_resolution;
  meta["ping_resolution"] = image.ping_resolution;
  meta["altitude"] = image.altitude ? Json(*image.altitude) : Json(nullptr);
  meta["side"] = std::string(to_string(image.side));
  Json nav = Json::array();
  for (const Pose& p : image.nav)
    nav.push_back({{"e", p.easting}, {"n", p.northing}, {"heading", p.heading}});
  meta["nav"] = std::move(nav);
  write_json(sidecar_path(path), meta);
}

SidescanImage read_raster(const fs::path& path) {
  SidescanImage image;
  image.intensities = read_pgm(path);
  const Json meta = read_json(sidecar_path(path));
  try {
    image.bin_resolution = meta.at("bin_resolution").get<double>();
    image.ping_resolution = meta.at("ping_resolution").get<double>();
    if (meta.contains("altitude") && !meta["altitude"].is_null())
      image.altitude = meta["altitude"].get<double>();
    image.side = side_from_string(meta.value("side", std::string("starboard")));
    for (const Json& p : meta.at("nav"))
      image.nav.push_back({p.at("e").get<double>(), p.at("n").get<double>(),
                           p.at("heading").get<double>()});
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, "bad sidecar " + sidecar_path(path).string() + ": " +
                                                e.what());
  }
  image.validate();
  return image;
}

void write_class_raster(const fs::path& path, const Raster<std::uint8_t>& classes) {
  Raster<std::uint16_t> samples(classes.rows(), classes.cols());
  std::copy(classes.values().begin(), classes.values().end(), samples.values().begin());
  write_pgm_samples(path, samples, 255);
}

Raster<std::uint8_t> read_class_raster(const fs::path& path) {
  const PgmSamples raw = read_pgm_samples(path);
  Raster<std::uint8_t> out(raw.samples.rows(), raw.samples.cols());
  const auto src = raw.samples.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] > 255) throw Error(ErrorCode::MalformedHeader, "class id out of range");
    dst[i] = static_cast<std::uint8_t>(src[i]);
  }
  return out;
}

namespace {

Json geometry_json(const GridGeometry& g) {
  return {{"origin_e", g.origin_e}, {"origin_n", g.origin_n}, {"cell_size", g.cell_size},
          {"width", g.width},       {"height", g.height}};
}

GridGeometry geometry_from_json(const Json& j) {
  GridGeometry g;
  g.origin_e = j.at("origin_e").get<double>();
  g.origin_n = j.at("origin_n").get<double>();
  g.cell_size = j.at("cell_size").get<double>();
  g.width = j.at("width").get<std::size_t>();
  g.height = j.at("height").get<std::size_t>();
  g.validate();
  return g;
}

// Grid row 0 is south; image row 0 is the top (north).
std::size_t grid_index_for_image_pixel(const GridGeometry& g, std::size_t row, std::size_t col) {
  return (g.height - 1 - row) * g.width + col;
}

void check_dims(const GridGeometry& g, const Raster<std::uint16_t>& samples,
                const fs::path& path) {
  if (samples.rows() != g.height || samples.cols() != g.width)
    throw Error(ErrorCode::DimensionMismatch,
                "grid raster " + path.string() + " does not match its sidecar geometry");
}

}  // namespace

void write_pd_grid(const fs::path& path, const PdGridFile& file) {
  const GridGeometry& g = file.grid.geometry;
  Raster<std::uint16_t> samples(g.height, g.width);
  Json nodata = Json::array();
  for (std::size_t row = 0; row < g.height; ++row) {
    for (std::size_t col = 0; col < g.width; ++col) {
      const std::size_t i = grid_index_for_image_pixel(g, row, col);
      if (file.grid.is_nodata(i)) continue;
      const double v = std::clamp(file.grid.values[i], 0.0, 1.0);
      samples(row, col) = static_cast<std::uint16_t>(std::lround(v * 65535.0));
    }
  }
  for (std::size_t i = 0; i < file.grid.size(); ++i)
    if (file.grid.is_nodata(i)) nodata.push_back(i);
  write_pgm_samples(path, samples, 65535);

  Json meta;
  meta["kind"] = "pd";
  meta["geometry"] = geometry_json(g);
  meta["nodata_cells"] = std::move(nodata);
  if (!file.trials.empty()) {
    meta["successes"] = file.successes;
    meta["trials"] = file.trials;
  }
  write_json(sidecar_path(path), meta);
}

PdGridFile read_pd_grid(const fs::path& path) {
  const PgmSamples raw = read_pgm_samples(path);
  const Json meta = read_json(sidecar_path(path));
  PdGridFile file;
  try {
    const GridGeometry g = geometry_from_json(meta.at("geometry"));
    check_dims(g, raw.samples, path);
    file.grid = make_pd_grid(g);
    if (meta.contains("trials")) {
      file.successes = meta.at("successes").get<std::vector<std::uint32_t>>();
      file.trials = meta.at("trials").get<std::vector<std::uint32_t>>();
      if (file.trials.size() != g.cell_count() || file.successes.size() != g.cell_count())
        throw Error(ErrorCode::DimensionMismatch, "tally length does not match grid");
      // Exact values from the tallies rather than the quantised raster.
      for (std::size_t i = 0; i < g.cell_count(); ++i)
        if (file.trials[i] > 0)
          file.grid.values[i] = static_cast<double>(file.successes[i]) / file.trials[i];
    } else {
      for (std::size_t row = 0; row < g.height; ++row)
        for (std::size_t col = 0; col < g.width; ++col)
          file.grid.values[grid_index_for_image_pixel(g, row, col)] =
              raw.samples(row, col) / static_cast<double>(raw.maxval);
      for (const Json& i : meta.at("nodata_cells")) {
        const auto idx = i.get<std::size_t>();
        if (idx >= g.cell_count()) throw Error(ErrorCode::DimensionMismatch, "no-data index out of range");
        file.grid.values[idx] = file.grid.nodata;
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, "bad PD grid sidecar: " + std::string(e.what()));
  }
  return file;
}

void write_label_grid(const fs::path& path, const LabelGridFile& file) {
  const GridGeometry& g = file.grid.geometry;
  Raster<std::uint16_t> samples(g.height, g.width, 65535);
  for (std::size_t row = 0; row < g.height; ++row)
    for (std::size_t col = 0; col < g.width; ++col) {
      const std::size_t i = grid_index_for_image_pixel(g, row, col);
      if (!file.grid.is_nodata(i)) samples(row, col) = static_cast<std::uint16_t>(file.grid.values[i]);
    }
  write_pgm_samples(path, samples, 65535);
  Json meta;
  meta["kind"] = "labels";
  meta["geometry"] = geometry_json(g);
  meta["nodata_value"] = 65535;
  meta["provenance"] = file.provenance;
  meta["policy"] = file.policy;
  write_json(sidecar_path(path), meta);
}

LabelGridFile read_label_grid(const fs::path& path) {
  const PgmSamples raw = read_pgm_samples(path);
  const Json meta = read_json(sidecar_path(path));
  LabelGridFile file;
  try {
    const GridGeometry g = geometry_from_json(meta.at("geometry"));
    check_dims(g, raw.samples, path);
    file.grid = make_label_grid(g);
    for (std::size_t row = 0; row < g.height; ++row)
      for (std::size_t col = 0; col < g.width; ++col) {
        const std::uint16_t v = raw.samples(row, col);
        if (v != 65535) file.grid.values[grid_index_for_image_pixel(g, row, col)] = v;
      }
    file.provenance = meta.value("provenance", std::vector<std::string>{});
    file.policy = meta.value("policy", std::string{});
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, "bad label grid sidecar: " + std::string(e.what()));
  }
  return file;
}

void write_flag_grid(const fs::path& path, const FlagGrid& grid) {
  const GridGeometry& g = grid.geometry;
  Raster<std::uint16_t> samples(g.height, g.width);
  for (std::size_t row = 0; row < g.height; ++row)
    for (std::size_t col = 0; col < g.width; ++col)
      samples(row, col) = grid.values[grid_index_for_image_pixel(g, row, col)] ? 255 : 0;
  write_pgm_samples(path, samples, 255);
  write_json(sidecar_path(path), {{"kind", "flags"}, {"geometry", geometry_json(g)}});
}

std::uint64_t file_hash(const fs::path& path) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : slurp(path)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace seafloor
