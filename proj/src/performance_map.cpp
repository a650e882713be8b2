#include "seafloor/performance_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "seafloor/error.hpp"
#include "seafloor/parallel.hpp"

namespace seafloor {

void MonteCarloConfig::validate() const {
  if (passes < 1) throw Error(ErrorCode::InvalidParams, "pass count must be at least 1");
  if (contacts_per_pass < 1) throw Error(ErrorCode::InvalidParams, "contacts per pass must be at least 1");
  if (!(association_radius > 0.0)) throw Error(ErrorCode::InvalidParams, "association radius must be positive");
  if (!(cell_size > 0.0)) throw Error(ErrorCode::InvalidParams, "cell size must be positive");
  if (!(min_separation >= 0.0)) throw Error(ErrorCode::InvalidParams, "separation must be non-negative");
}

double PerformanceMap::fad() const noexcept {
  if (passes == 0 || ensonified_hectares <= 0.0) return 0.0;
  return static_cast<double>(false_alarms) / (ensonified_hectares * static_cast<double>(passes));
}

PdGrid PerformanceMap::pd() const {
  PdGrid grid = make_pd_grid(geometry);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (trials[i] > 0) grid.values[i] = static_cast<double>(successes[i]) / trials[i];
  return grid;
}

std::size_t PerformanceMap::total_trials() const noexcept {
  std::size_t n = 0;
  for (std::uint32_t t : trials) n += t;
  return n;
}

double PerformanceMap::global_pd() const noexcept {
  std::size_t s = 0;
  for (std::uint32_t v : successes) s += v;
  const std::size_t n = total_trials();
  return n ? static_cast<double>(s) / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

double ensonified_area(const SidescanImage& image) {
  const double altitude = estimate_altitude(image);
  const double max_slant = static_cast<double>(image.bins_per_side()) * image.bin_resolution;
  if (max_slant <= altitude) return 0.0;
  const double swath = slant_to_ground(max_slant, altitude) * static_cast<double>(image.side_signs().size());
  return swath * static_cast<double>(image.pings()) * image.ping_resolution;
}

PassResult run_pass(const SidescanImage& image, std::span<const ObjectModel> models,
                    const Detector& detector, const MonteCarloConfig& config, std::uint32_t pass,
                    const Raster<std::uint8_t>* truth) {
  const double separation =
      config.min_separation > 0.0 ? config.min_separation : default_min_separation(models);
  RandomInsertion inserted = insert_random_contacts(image, models, config.contacts_per_pass,
                                                    separation, config.seed, pass, config.insertion);
  const std::vector<Contact> contacts = detector.detect(inserted.image);
  const Association assoc = associate(contacts, inserted.records, config.association_radius);

  const double altitude = truth ? estimate_altitude(image) : 0.0;
  PassResult result;
  result.pass = pass;
  result.false_alarms = assoc.false_alarms.size();
  for (const Match& m : assoc.matches) {
    TrialOutcome o;
    o.record = inserted.records[m.insertion];
    o.detected = m.contact.has_value();
    if (m.contact) o.confidence = contacts[*m.contact].confidence;
    if (truth) {
      const auto bin = image.bin_for(o.record.side, ground_to_slant(o.record.ground_range, altitude));
      if (bin && o.record.ping < truth->rows() && *bin < truth->cols())
        o.terrain_class = (*truth)(o.record.ping, *bin);
    }
    result.outcomes.push_back(std::move(o));
  }
  return result;
}

PerformanceMap merge_passes(const SidescanImage& image, const MonteCarloConfig& config,
                            std::vector<PassResult> results) {
  PerformanceMap map;
  map.geometry = grid_for_image(image, config.cell_size);
  map.successes.assign(map.geometry.cell_count(), 0);
  map.trials.assign(map.geometry.cell_count(), 0);
  map.ensonified_hectares = ensonified_area(image) / 10000.0;
  map.passes = results.size();

  std::sort(results.begin(), results.end(),
            [](const PassResult& a, const PassResult& b) { return a.pass < b.pass; });
  for (const PassResult& r : results) {
    map.false_alarms += r.false_alarms;
    FlagGrid pass_map(map.geometry, 255, 255);
    for (const TrialOutcome& o : r.outcomes) {
      const auto cell = map.geometry.cell_of(o.record.geo);
      if (!cell) continue;
      ++map.trials[*cell];
      if (o.detected) ++map.successes[*cell];
      if (config.keep_pass_maps && (pass_map.values[*cell] == 255 || o.detected))
        pass_map.values[*cell] = o.detected ? 1 : 0;
      map.outcomes.push_back(o);
    }
    if (config.keep_pass_maps) map.pass_maps.push_back(std::move(pass_map));
  }
  std::stable_sort(map.outcomes.begin(), map.outcomes.end(), [](const TrialOutcome& a, const TrialOutcome& b) {
    return std::tie(a.record.pass, a.record.ping, a.record.ground_range) <
           std::tie(b.record.pass, b.record.ping, b.record.ground_range);
  });
  return map;
}

PerformanceMap run_monte_carlo(const SidescanImage& image, std::span<const ObjectModel> models,
                               const Detector& detector, const MonteCarloConfig& config,
                               const Raster<std::uint8_t>* truth) {
  config.validate();
  image.validate();
  std::vector<PassResult> results(config.passes);
  parallel_for(
      config.passes,
      [&](std::size_t i) {
        results[i] = run_pass(image, models, detector, config, static_cast<std::uint32_t>(i), truth);
      },
      config.jobs);
  return merge_passes(image, config, std::move(results));
}

double PdTally::pd() const noexcept {
  return trials ? static_cast<double>(successes) / static_cast<double>(trials)
                : std::numeric_limits<double>::quiet_NaN();
}

std::map<int, PdTally> per_class_pd(std::span<const TrialOutcome> outcomes) {
  std::map<int, PdTally> out;
  for (const TrialOutcome& o : outcomes) {
    if (!o.terrain_class) continue;
    PdTally& t = out[*o.terrain_class];
    ++t.trials;
    if (o.detected) ++t.successes;
  }
  return out;
}

PdGrid densify(const PdGrid& pd, std::size_t k, double power) {
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be at least 1");
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < pd.size(); ++i)
    if (!pd.is_nodata(i)) known.push_back(i);
  if (known.empty()) throw Error(ErrorCode::NoTrials, "no trialed cells to interpolate from");

  PdGrid out = pd;
  const std::size_t use = std::min(k, known.size());
  std::vector<std::pair<double, std::size_t>> nearest(known.size());
  for (std::size_t i = 0; i < pd.size(); ++i) {
    if (!pd.is_nodata(i)) continue;
    const GeoPoint c = pd.geometry.centre(i);
    for (std::size_t j = 0; j < known.size(); ++j)
      nearest[j] = {distance(c, pd.geometry.centre(known[j])), known[j]};
    std::partial_sort(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(use), nearest.end());
    double wsum = 0.0, vsum = 0.0;
    for (std::size_t j = 0; j < use; ++j) {
      const double w = 1.0 / std::pow(nearest[j].first, power);
      wsum += w;
      vsum += w * pd.values[nearest[j].second];
    }
    out.values[i] = vsum / wsum;
  }
  return out;
}

FlagGrid binarize(const PdGrid& pd, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidParams, "threshold must lie in [0, 1]");
  FlagGrid out(pd.geometry, 0, 255);
  for (std::size_t i = 0; i < pd.size(); ++i)
    if (!pd.is_nodata(i) && pd.values[i] < threshold) out.values[i] = 1;
  return out;
}

Json performance_report(const PerformanceMap& map) {
  Json classes = Json::object();
  for (const auto& [id, tally] : per_class_pd(map.outcomes))
    classes[std::to_string(id)] = {{"pd", tally.pd()}, {"successes", tally.successes}, {"trials", tally.trials}};
  const double pd = map.global_pd();
  return {{"N", map.passes},
          {"trials", map.total_trials()},
          {"false_alarms", map.false_alarms},
          {"ensonified_hectares", map.ensonified_hectares},
          {"fad", map.fad()},
          {"mean_pd", std::isnan(pd) ? Json(nullptr) : Json(pd)},
          {"per_class_pd", classes}};
}

}  // namespace seafloor
