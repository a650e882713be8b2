#include "seafloor/mission_repair.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "seafloor/error.hpp"

namespace seafloor {

FlagGrid flag_cells(const PdGrid& pd, const FlagConfig& config) {
  const GridGeometry& src = pd.geometry;
  if (src.cell_count() == 0 || pd.size() != src.cell_count())
    throw Error(ErrorCode::EmptyGrid, "PD grid has no cells");
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0))
    throw Error(ErrorCode::InvalidParams, "threshold must lie in [0, 1]");
  if (!(config.cell_size >= src.cell_size * (1.0 - 1e-9)))
    throw Error(ErrorCode::InvalidParams, "repair cells must not be smaller than PD cells");
  if (!(config.fraction >= 0.0 && config.fraction <= 1.0))
    throw Error(ErrorCode::InvalidParams, "fraction must lie in [0, 1]");

  GridGeometry g;
  g.origin_e = src.origin_e;
  g.origin_n = src.origin_n;
  g.cell_size = config.cell_size;
  g.width = static_cast<std::size_t>(std::ceil(static_cast<double>(src.width) * src.cell_size / config.cell_size - 1e-9));
  g.height = static_cast<std::size_t>(std::ceil(static_cast<double>(src.height) * src.cell_size / config.cell_size - 1e-9));

  std::vector<double> sum(g.cell_count(), 0.0);
  std::vector<std::size_t> n(g.cell_count(), 0), below(g.cell_count(), 0);
  for (std::size_t i = 0; i < pd.size(); ++i) {
    if (pd.is_nodata(i)) continue;
    const auto cell = g.cell_of(src.centre(i));
    if (!cell) continue;
    sum[*cell] += pd.values[i];
    ++n[*cell];
    if (pd.values[i] < config.threshold) ++below[*cell];
  }
  FlagGrid out(g, 0, 255);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (n[i] == 0) continue;
    const bool low = config.rule == FlagRule::MeanPd
                         ? sum[i] / static_cast<double>(n[i]) < config.threshold
                         : static_cast<double>(below[i]) >= config.fraction * static_cast<double>(n[i]) && below[i] > 0;
    out.values[i] = low ? 1 : 0;
  }
  return out;
}

std::vector<std::vector<std::size_t>> flagged_components(const FlagGrid& flags) {
  const GridGeometry& g = flags.geometry;
  std::vector<std::uint8_t> seen(g.cell_count(), 0);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (seen[i] || flags.values[i] != 1) continue;
    std::vector<std::size_t> comp;
    seen[i] = 1;
    stack.push_back(i);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      comp.push_back(c);
      const std::size_t x = c % g.width;
      const std::size_t y = c / g.width;
      std::array<std::size_t, 4> next{};
      std::size_t count = 0;
      if (x > 0) next[count++] = c - 1;
      if (x + 1 < g.width) next[count++] = c + 1;
      if (y > 0) next[count++] = c - g.width;
      if (y + 1 < g.height) next[count++] = c + g.width;
      for (std::size_t k = 0; k < count; ++k)
        if (!seen[next[k]] && flags.values[next[k]] == 1) {
          seen[next[k]] = 1;
          stack.push_back(next[k]);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

namespace {

// Leg-aligned frame: t along the legs, s across them.
struct Frame {
  double de, dn;  // unit travel direction
  double ce, cn;  // unit cross direction

  double s(GeoPoint p) const noexcept { return p.e * ce + p.n * cn; }
  double t(GeoPoint p) const noexcept { return p.e * de + p.n * dn; }
  GeoPoint at(double s, double t) const noexcept { return {s * ce + t * de, s * cn + t * dn}; }
};

using Polygon = std::vector<GeoPoint>;

// Keeps the part of a convex polygon with sign * (s(p) - bound) >= 0.
Polygon clip(const Polygon& poly, const Frame& f, double bound, double sign) {
  Polygon out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const GeoPoint a = poly[i];
    const GeoPoint b = poly[(i + 1) % poly.size()];
    const double da = sign * (f.s(a) - bound);
    const double db = sign * (f.s(b) - bound);
    if (da >= 0.0) out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) {
      const double u = da / (da - db);
      out.push_back({a.e + u * (b.e - a.e), a.n + u * (b.n - a.n)});
    }
  }
  return out;
}

Polygon cell_square(const GridGeometry& g, std::size_t index) {
  const double x0 = g.origin_e + static_cast<double>(index % g.width) * g.cell_size;
  const double y0 = g.origin_n + static_cast<double>(index / g.width) * g.cell_size;
  const double w = g.cell_size;
  return {{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + w}, {x0, y0 + w}};
}

struct SweepLine {
  double s;
  double t0, t1;
  std::vector<std::size_t> cells;
};

std::vector<SweepLine> sweep(const GridGeometry& g, const std::vector<std::size_t>& comp, const Frame& f) {
  const double w = g.cell_size;
  double s_min = std::numeric_limits<double>::infinity();
  double s_max = -s_min;
  for (std::size_t c : comp)
    for (const GeoPoint& p : cell_square(g, c)) {
      s_min = std::min(s_min, f.s(p));
      s_max = std::max(s_max, f.s(p));
    }
  const auto lines = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((s_max - s_min) / w - 1e-9)));
  std::vector<SweepLine> out;
  for (std::size_t k = 0; k < lines; ++k) {
    SweepLine line{s_min + (static_cast<double>(k) + 0.5) * w, std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity(), {}};
    for (std::size_t c : comp) {
      Polygon part = clip(clip(cell_square(g, c), f, line.s - 0.5 * w, 1.0), f, line.s + 0.5 * w, -1.0);
      if (part.size() < 3) continue;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      double slo = lo, shi = -lo;
      for (const GeoPoint& p : part) {
        lo = std::min(lo, f.t(p));
        hi = std::max(hi, f.t(p));
        slo = std::min(slo, f.s(p));
        shi = std::max(shi, f.s(p));
      }
      if (shi - slo < 1e-9 * w) continue;
      line.t0 = std::min(line.t0, lo);
      line.t1 = std::max(line.t1, hi);
      line.cells.push_back(c);
    }
    if (!line.cells.empty()) out.push_back(std::move(line));
  }
  return out;
}

double wrap_heading(double h) noexcept {
  const double two_pi = 2.0 * std::numbers::pi;
  h = std::fmod(h, two_pi);
  if (h < 0.0) h += two_pi;
  return h;
}

}  // namespace

RepairPlan plan_revisit(const FlagGrid& flags, double mission_heading, GeoPoint start,
                        const PlanConfig& config) {
  RepairPlan plan;
  plan.source_map = config.source_map;
  plan.threshold = config.threshold;
  plan.cell_size = flags.geometry.cell_size;
  plan.mission_heading = mission_heading;

  const double theta = mission_heading + (config.orthogonal ? 0.5 * std::numbers::pi : 0.0);
  const Frame f{std::sin(theta), std::cos(theta), std::cos(theta), -std::sin(theta)};

  const auto comps = flagged_components(flags);
  std::vector<std::vector<SweepLine>> sweeps;
  sweeps.reserve(comps.size());
  for (const auto& comp : comps) sweeps.push_back(sweep(flags.geometry, comp, f));

  std::vector<bool> done(comps.size(), false);
  GeoPoint here = start;
  for (std::size_t step = 0; step < comps.size(); ++step) {
    // Entry candidates: both ends of the first and the last line.
    std::size_t best = comps.size();
    std::size_t best_entry = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (done[c] || sweeps[c].empty()) continue;
      const SweepLine& first = sweeps[c].front();
      const SweepLine& last = sweeps[c].back();
      const std::array<GeoPoint, 4> entries{f.at(first.s, first.t0), f.at(first.s, first.t1),
                                            f.at(last.s, last.t0), f.at(last.s, last.t1)};
      for (std::size_t e = 0; e < entries.size(); ++e) {
        const double d = distance(here, entries[e]);
        if (d < best_d) {
          best_d = d;
          best = c;
          best_entry = e;
        }
      }
    }
    if (best == comps.size()) break;
    done[best] = true;

    std::vector<SweepLine> lines = sweeps[best];
    if (best_entry >= 2) std::reverse(lines.begin(), lines.end());
    bool forward = best_entry % 2 == 0;  // entering at t0 means travelling towards t1
    for (const SweepLine& line : lines) {
      RepairLeg leg;
      leg.component = best;
      leg.cells = line.cells;
      const GeoPoint a = f.at(line.s, forward ? line.t0 : line.t1);
      const GeoPoint b = f.at(line.s, forward ? line.t1 : line.t0);
      leg.waypoints = {a, b};
      leg.heading = wrap_heading(forward ? theta : theta + std::numbers::pi);
      plan.transit_length += distance(here, a) + distance(a, b);
      here = b;
      plan.legs.push_back(std::move(leg));
      forward = !forward;
    }
  }
  return plan;
}

Json plan_to_json(const RepairPlan& plan) {
  Json legs = Json::array();
  for (const RepairLeg& leg : plan.legs) {
    Json wps = Json::array();
    for (const GeoPoint& p : leg.waypoints) wps.push_back({{"e", p.e}, {"n", p.n}});
    legs.push_back({{"component", leg.component},
                    {"cells", leg.cells},
                    {"waypoints", wps},
                    {"heading", leg.heading},
                    {"reason", leg.reason}});
  }
  return {{"source_map", plan.source_map},
          {"threshold", plan.threshold},
          {"cell_size", plan.cell_size},
          {"mission_heading", plan.mission_heading},
          {"transit_length", plan.transit_length},
          {"legs", legs}};
}

RepairPlan plan_from_json(const Json& j) {
  RepairPlan plan;
  try {
    plan.source_map = j.at("source_map").get<std::string>();
    plan.threshold = j.at("threshold").get<double>();
    plan.cell_size = j.at("cell_size").get<double>();
    plan.mission_heading = j.at("mission_heading").get<double>();
    plan.transit_length = j.at("transit_length").get<double>();
    for (const Json& l : j.at("legs")) {
      RepairLeg leg;
      leg.component = l.at("component").get<std::size_t>();
      leg.cells = l.at("cells").get<std::vector<std::size_t>>();
      for (const Json& p : l.at("waypoints")) leg.waypoints.push_back({p.at("e").get<double>(), p.at("n").get<double>()});
      leg.heading = l.at("heading").get<double>();
      leg.reason = l.at("reason").get<std::string>();
      plan.legs.push_back(std::move(leg));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad repair plan: ") + e.what());
  }
  return plan;
}

Raster<std::uint8_t> plan_overlay(const FlagGrid& flags, const RepairPlan& plan, std::size_t scale) {
  const GridGeometry& g = flags.geometry;
  if (scale < 1) throw Error(ErrorCode::InvalidParams, "overlay scale must be positive");
  Raster<std::uint8_t> out(g.height * scale, g.width * scale, 0);
  const double px = g.cell_size / static_cast<double>(scale);
  const double w = g.cell_size;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) {
      const GeoPoint p{g.origin_e + (static_cast<double>(c) + 0.5) * px,
                       g.origin_n + (static_cast<double>(out.rows() - 1 - r) + 0.5) * px};
      if (const auto cell = g.cell_of(p); cell && flags.values[*cell] == 1) out(r, c) = 128;
      for (const RepairLeg& leg : plan.legs) {
        if (leg.waypoints.size() < 2) continue;
        const GeoPoint a = leg.waypoints.front();
        const GeoPoint b = leg.waypoints.back();
        const double len = distance(a, b);
        const double ue = len > 0.0 ? (b.e - a.e) / len : 0.0;
        const double un = len > 0.0 ? (b.n - a.n) / len : 0.0;
        const double along = (p.e - a.e) * ue + (p.n - a.n) * un;
        const double across = std::abs(-(p.e - a.e) * un + (p.n - a.n) * ue);
        if (along >= 0.0 && along <= len && across <= 0.5 * w) {
          out(r, c) = 255;
          break;
        }
      }
    }
  return out;
}

}  // namespace seafloor
