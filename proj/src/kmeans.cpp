#include "seafloor/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "seafloor/error.hpp"
#include "seafloor/random.hpp"
#include "seafloor/raster_io.hpp"

namespace seafloor {

ExtractorInfo ExtractorInfo::of(const FeatureExtractor& extractor) {
  return {extractor.id(), extractor.config(), extractor.config_hash()};
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Normaliser Normaliser::fit(std::span<const Point> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples to normalise");
  const std::size_t dim = samples.front().size();
  Normaliser n;
  n.means.assign(dim, 0.0);
  std::vector<double> m2(dim, 0.0);
  double count = 0.0;
  for (const Point& x : samples) {
    if (x.size() != dim) throw Error(ErrorCode::DimensionMismatch, "feature vectors differ in length");
    count += 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double delta = x[d] - n.means[d];
      n.means[d] += delta / count;
      m2[d] += delta * (x[d] - n.means[d]);
    }
  }
  n.scales.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double sd = std::sqrt(m2[d] / count);
    n.scales[d] = sd > 1e-12 ? sd : 1.0;
  }
  return n;
}

Point Normaliser::apply(std::span<const double> x) const {
  if (x.size() != means.size())
    throw Error(ErrorCode::DimensionMismatch, "feature length " + std::to_string(x.size()) +
                                                  " does not match model length " + std::to_string(means.size()));
  Point out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = (x[d] - means[d]) / scales[d];
  return out;
}

std::size_t ClusterModel::nearest(std::span<const double> normalised, double* sq) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(normalised, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (sq) *sq = best_d;
  return best;
}

std::size_t ClusterModel::assign(std::span<const double> features) const {
  return nearest(norm.apply(features));
}

Point ClusterModel::raw_centroid(std::size_t i) const {
  Point out(centroids.at(i).size());
  for (std::size_t d = 0; d < out.size(); ++d) out[d] = centroids[i][d] * norm.scales[d] + norm.means[d];
  return out;
}

void ClusterModel::validate() const {
  if (P < 1) throw Error(ErrorCode::InvalidParams, "model needs P >= 1");
  if (centroids.size() != P || counts.size() != P)
    throw Error(ErrorCode::InvalidParams, "centroid or count list does not match P");
  if (norm.means.size() != norm.scales.size())
    throw Error(ErrorCode::InvalidParams, "normalisation vectors differ in length");
  for (double s : norm.scales)
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidParams, "normalisation scales must be positive");
  for (const Point& c : centroids)
    if (c.size() != norm.means.size()) throw Error(ErrorCode::InvalidParams, "centroid length mismatch");
}

std::vector<Point> kmeans_pp(std::span<const Point> points, std::size_t P, std::uint64_t seed) {
  if (points.size() < P) throw Error(ErrorCode::TooFewSamples, "fewer points than clusters");
  Rng rng(seed);
  std::vector<Point> centres;
  centres.reserve(P);
  centres.push_back(points[rng.below(points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centres.back());
  while (centres.size() < P) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (u < d2[i]) {
          pick = i;
          break;
        }
        u -= d2[i];
      }
    } else {
      pick = rng.below(points.size());
    }
    centres.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min(d2[i], squared_distance(points[i], centres.back()));
  }
  return centres;
}

std::vector<Point> initial_centroids(std::span<const Point> normalised, const KMeansConfig& config) {
  if (config.P < 1) throw Error(ErrorCode::InvalidParams, "P must be at least 1");
  if (normalised.size() < config.P)
    throw Error(ErrorCode::TooFewSamples, std::to_string(normalised.size()) + " samples for " +
                                              std::to_string(config.P) + " clusters");
  const std::size_t batch = std::min(normalised.size(), std::max(config.batch_size, 4 * config.P));
  std::vector<std::size_t> idx(normalised.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(mix_seed(config.seed, {0x5EEDu}));
  for (std::size_t i = 0; i < batch; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
  std::vector<Point> seed_batch;
  seed_batch.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) seed_batch.push_back(normalised[idx[i]]);
  return kmeans_pp(seed_batch, config.P, mix_seed(config.seed, {0x2B2Bu}));
}

double inertia(std::span<const Point> normalised, std::span<const Point> centroids) {
  double total = 0.0;
  for (const Point& x : normalised) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& c : centroids) best = std::min(best, squared_distance(x, c));
    total += best;
  }
  return total;
}

ClusterModel train_clusterer(std::span<const Point> features, const KMeansConfig& config,
                             ExtractorInfo extractor) {
  if (config.P < 1) throw Error(ErrorCode::InvalidParams, "P must be at least 1");
  if (config.batch_size < 1) throw Error(ErrorCode::InvalidParams, "batch size must be at least 1");
  if (features.size() < config.P)
    throw Error(ErrorCode::TooFewSamples, std::to_string(features.size()) + " samples for " +
                                              std::to_string(config.P) + " clusters");
  for (const Point& x : features)
    for (double v : x)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParams, "non-finite feature value");

  ClusterModel model;
  model.P = config.P;
  model.extractor = std::move(extractor);
  model.norm = Normaliser::fit(features);
  std::vector<Point> x;
  x.reserve(features.size());
  for (const Point& f : features) x.push_back(model.norm.apply(f));

  model.centroids = initial_centroids(x, config);
  std::vector<std::uint64_t> seen(config.P, 0);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> labels(config.batch_size);
  Rng rng(mix_seed(config.seed, {0xE90Cu}));

  for (std::size_t epoch = 1; epoch <= std::max<std::size_t>(1, config.max_epochs); ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const std::vector<Point> start = model.centroids;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t end = std::min(order.size(), b + config.batch_size);
      for (std::size_t i = b; i < end; ++i) labels[i - b] = model.nearest(x[order[i]]);
      for (std::size_t i = b; i < end; ++i) {
        const std::size_t c = labels[i - b];
        const double eta = 1.0 / static_cast<double>(++seen[c]);
        Point& centre = model.centroids[c];
        const Point& p = x[order[i]];
        for (std::size_t d = 0; d < centre.size(); ++d) centre[d] += eta * (p[d] - centre[d]);
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < config.P; ++c)
      shift = std::max(shift, std::sqrt(squared_distance(start[c], model.centroids[c])));
    model.log.epochs = epoch;
    model.log.final_shift = shift;
    if (shift < config.tolerance) break;
  }

  model.counts.assign(config.P, 0);
  for (const Point& p : x) ++model.counts[model.nearest(p)];
  model.log.samples = x.size();
  model.log.inertia = inertia(x, model.centroids);
  return model;
}

std::vector<std::vector<Representative>> representatives(const ClusterModel& model,
                                                         std::span<const Point> pool, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be at least 1");
  if (pool.empty()) throw Error(ErrorCode::EmptyInput, "representative pool is empty");
  std::vector<std::vector<Representative>> out(model.P);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double d2 = 0.0;
    const std::size_t c = model.nearest(model.norm.apply(pool[i]), &d2);
    out[c].push_back({i, std::sqrt(d2)});
  }
  for (auto& list : out) {
    std::sort(list.begin(), list.end(), [](const Representative& a, const Representative& b) {
      return std::tie(a.distance, a.index) < std::tie(b.distance, b.index);
    });
    if (list.size() > k) list.resize(k);
  }
  return out;
}

Json model_to_json(const ClusterModel& m) {
  return {{"P", m.P},
          {"centroids", m.centroids},
          {"counts", m.counts},
          {"extractor", {{"id", m.extractor.id}, {"config", m.extractor.config}, {"hash", hex64(m.extractor.hash)}}},
          {"norm", {{"means", m.norm.means}, {"scales", m.norm.scales}}},
          {"log",
           {{"epochs", m.log.epochs},
            {"final_shift", m.log.final_shift},
            {"samples", m.log.samples},
            {"inertia", m.log.inertia}}}};
}

ClusterModel model_from_json(const Json& j) {
  ClusterModel m;
  try {
    m.P = j.at("P").get<std::size_t>();
    m.centroids = j.at("centroids").get<std::vector<Point>>();
    m.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    const Json& e = j.at("extractor");
    m.extractor.id = e.at("id").get<std::string>();
    m.extractor.config = e.at("config");
    m.extractor.hash = std::stoull(e.at("hash").get<std::string>(), nullptr, 16);
    m.norm.means = j.at("norm").at("means").get<std::vector<double>>();
    m.norm.scales = j.at("norm").at("scales").get<std::vector<double>>();
    const Json& log = j.at("log");
    m.log.epochs = log.at("epochs").get<std::size_t>();
    m.log.final_shift = log.at("final_shift").get<double>();
    m.log.samples = log.at("samples").get<std::size_t>();
    m.log.inertia = log.at("inertia").get<double>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad cluster model: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad cluster model hash: ") + e.what());
  }
  m.validate();
  return m;
}

void write_model(const std::filesystem::path& path, const ClusterModel& model) {
  write_json(path, model_to_json(model));
}

ClusterModel read_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

void check_extractor(const ClusterModel& model, const FeatureExtractor& extractor) {
  if (model.extractor.id != extractor.id() || model.extractor.hash != extractor.config_hash())
    throw Error(ErrorCode::ExtractorMismatch,
                "model was trained with extractor '" + model.extractor.id + "' (" + hex64(model.extractor.hash) +
                    "), got '" + extractor.id() + "' (" + hex64(extractor.config_hash()) + ")");
}

}  // namespace seafloor
