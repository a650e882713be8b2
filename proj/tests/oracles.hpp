#ifndef SEAFLOOR_TEST_ORACLES_HPP
#define SEAFLOOR_TEST_ORACLES_HPP

// Independent reference implementations shared by the unit tests and the
// acceptance suite. None of these call into the code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <vector>

#include "seafloor/geo_grid.hpp"
#include "seafloor/label_mapping.hpp"
#include "seafloor/mission_repair.hpp"
#include "seafloor/random.hpp"

namespace oracle {

using Point = std::vector<double>;

// Gaussian blobs around uniformly drawn centres; labels are the blob ids.
inline std::vector<Point> blobs(std::size_t per, std::size_t dims, std::size_t k, double spread, double gap,
                                std::uint64_t seed, std::vector<std::size_t>* labels = nullptr) {
  seafloor::Rng rng(seed);
  std::vector<Point> centres(k, Point(dims));
  for (auto& c : centres)
    for (double& v : c) v = rng.uniform(-gap, gap);
  std::vector<Point> out;
  for (std::size_t i = 0; i < per * k; ++i) {
    const std::size_t b = i % k;
    Point p(dims);
    for (std::size_t d = 0; d < dims; ++d) p[d] = centres[b][d] + spread * rng.normal();
    out.push_back(std::move(p));
    if (labels) labels->push_back(b);
  }
  return out;
}

inline double sq(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return d;
}

inline double inertia(std::span<const Point> x, std::span<const Point> c) {
  double total = 0.0;
  for (const auto& p : x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : c) best = std::min(best, sq(p, q));
    total += best;
  }
  return total;
}

// Full-batch Lloyd iterations until assignments stop changing.
inline std::vector<Point> lloyd(std::span<const Point> x, std::vector<Point> c) {
  std::vector<std::size_t> assign(x.size(), SIZE_MAX);
  for (int iter = 0; iter < 1000; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < c.size(); ++j)
        if (const double d = sq(x[i], c[j]); d < bd) {
          bd = d;
          best = j;
        }
      changed |= assign[i] != best;
      assign[i] = best;
    }
    if (!changed) break;
    std::vector<Point> sum(c.size(), Point(x[0].size(), 0.0));
    std::vector<std::size_t> n(c.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t k = 0; k < x[i].size(); ++k) sum[assign[i]][k] += x[i][k];
      ++n[assign[i]];
    }
    for (std::size_t j = 0; j < c.size(); ++j)
      if (n[j])
        for (std::size_t k = 0; k < x[0].size(); ++k) c[j][k] = sum[j][k] / static_cast<double>(n[j]);
  }
  return c;
}

// In range, C <= P and every class hit.
inline bool valid_map(std::size_t P, std::size_t C, const std::vector<int>& map) {
  if (map.size() != P || C > P) return false;
  std::set<int> hit;
  for (int v : map) {
    if (v < 0 || v >= static_cast<int>(C)) return false;
    hit.insert(v);
  }
  return hit.size() == C;
}

// Every map of length P over [0, C + 1), so one out-of-range value is included.
inline void for_each_map(std::size_t P, std::size_t C, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> map(P, 0);
  const int values = static_cast<int>(C) + 1;
  for (;;) {
    fn(map);
    std::size_t i = 0;
    while (i < P && ++map[i] == values) map[i++] = 0;
    if (i == P) return;
  }
}

struct MergeExpectation {
  int modal = -1;
  int top = -1;
};

// Counts votes by hand; ties in votes go to the higher rank.
inline MergeExpectation expected_merge(const std::vector<int>& labels, const std::vector<int>& ranks) {
  std::map<int, int> count;
  for (int l : labels) ++count[l];
  MergeExpectation e;
  int best_votes = -1;
  for (auto [cls, votes] : count) {
    const int rank = ranks[static_cast<std::size_t>(cls)];
    if (votes > best_votes || (votes == best_votes && rank > ranks[static_cast<std::size_t>(e.modal)])) {
      e.modal = cls;
      best_votes = votes;
    }
    if (e.top < 0 || rank > ranks[static_cast<std::size_t>(e.top)]) e.top = cls;
  }
  return e;
}

// Every non-decreasing label sequence of length 1..max_n over `classes` labels.
inline void for_each_multiset(std::size_t max_n, int classes, const std::function<void(const std::vector<int>&)>& fn) {
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::vector<int> labels(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int from) {
      if (pos == n) {
        fn(labels);
        return;
      }
      for (int c = from; c < classes; ++c) {
        labels[pos] = c;
        rec(pos + 1, c);
      }
    };
    rec(0, 0);
  }
}

inline bool in_swath(const seafloor::RepairLeg& leg, seafloor::GeoPoint p, double w) {
  const auto a = leg.waypoints.front(), b = leg.waypoints.back();
  const double len = std::hypot(b.e - a.e, b.n - a.n);
  const double ue = (b.e - a.e) / len, un = (b.n - a.n) / len;
  const double along = (p.e - a.e) * ue + (p.n - a.n) * un;
  const double across = -(p.e - a.e) * un + (p.n - a.n) * ue;
  const double eps = 1e-7 * w;
  return along >= -eps && along <= len + eps && std::abs(across) <= 0.5 * w + eps;
}

// Samples an 11x11 lattice over the closed cell square, corners included.
inline bool covered(const seafloor::FlagGrid& flags, const seafloor::RepairPlan& plan, std::size_t cell) {
  const auto& g = flags.geometry;
  const double x0 = g.origin_e + static_cast<double>(cell % g.width) * g.cell_size;
  const double y0 = g.origin_n + static_cast<double>(cell / g.width) * g.cell_size;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) {
      const seafloor::GeoPoint p{x0 + g.cell_size * i / 10.0, y0 + g.cell_size * j / 10.0};
      bool any = false;
      for (const auto& leg : plan.legs) any = any || in_swath(leg, p, g.cell_size);
      if (!any) return false;
    }
  return true;
}

// Distance of a leg heading from the mission heading +- pi/2, modulo pi.
inline double orthogonality_error(double leg, double mission) {
  constexpr double pi = std::numbers::pi;
  double d = std::fmod(leg - mission - 0.5 * pi, pi);
  if (d < 0.0) d += pi;
  return std::min(d, pi - d);
}

inline std::set<std::size_t> flagged(const seafloor::FlagGrid& f) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.values[i] == 1) out.insert(i);
  return out;
}

// Random geometry, 15% no-data, a fifth of the rest exactly 1.
inline seafloor::PdGrid random_pd(seafloor::Rng& rng) {
  seafloor::GridGeometry g{rng.uniform(-500.0, 500.0), rng.uniform(-500.0, 500.0), 5.0, 4 + rng.below(30),
                           4 + rng.below(30)};
  auto pd = seafloor::make_pd_grid(g);
  for (double& v : pd.values)
    if (rng.uniform() < 0.85) v = rng.uniform() < 0.2 ? 1.0 : rng.uniform();
  return pd;
}

struct RepairCheck {
  bool covered = true;
  bool listed = true;
  bool monotone = true;
  bool orthogonal = true;
  bool deterministic = true;
  std::size_t flagged = 0;
};

// One random trial of the repair properties.
inline RepairCheck repair_trial(seafloor::Rng& rng) {
  using namespace seafloor;
  RepairCheck out;
  const auto pd = random_pd(rng);
  FlagConfig cfg;
  cfg.cell_size = 5.0 * static_cast<double>(1 + rng.below(4));
  cfg.threshold = rng.uniform();
  const auto flags = flag_cells(pd, cfg);
  const double heading = rng.uniform(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  const GeoPoint start{rng.uniform(-800.0, 800.0), rng.uniform(-800.0, 800.0)};
  const auto plan = plan_revisit(flags, heading, start);
  std::set<std::size_t> listed;
  for (const auto& leg : plan.legs) {
    out.orthogonal = out.orthogonal && orthogonality_error(leg.heading, heading) < 1e-9 && leg.heading >= 0.0 &&
                     leg.heading < 2.0 * std::numbers::pi;
    listed.insert(leg.cells.begin(), leg.cells.end());
  }
  const auto marked = flagged(flags);
  out.flagged = marked.size();
  out.listed = listed == marked;
  for (std::size_t cell : marked) out.covered = out.covered && covered(flags, plan, cell);
  out.deterministic = plan_to_json(plan_revisit(flags, heading, start)) == plan_to_json(plan);
  FlagConfig lower = cfg;
  lower.threshold = cfg.threshold * rng.uniform();
  const auto fewer = flagged(flag_cells(pd, lower));
  out.monotone = std::includes(marked.begin(), marked.end(), fewer.begin(), fewer.end());
  return out;
}

}  // namespace oracle

#endif  // SEAFLOOR_TEST_ORACLES_HPP
