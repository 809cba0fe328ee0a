#include "reid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "reid/error.hpp"

namespace reid {

std::vector<double> describe_image(const RgbImage& img, const Settings& settings) {
  const RgbImage sized = resize_bilinear(img, settings.width, settings.height);
  return extract_lomo(sized, settings.lomo).values;
}

ExtractSummary extract_manifest(const std::vector<ManifestRow>& rows, const Settings& settings,
                                const std::filesystem::path& out, const LogFn& log) {
  settings.validate();
  const std::size_t dim = lomo_dim(settings.lomo, settings.width, settings.height);

  std::vector<std::vector<float>> features(rows.size());
  std::vector<double> seconds(rows.size(), -1.0);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto values = describe_image(load_image(rows[i].image_path), settings);
        features[i].assign(values.begin(), values.end());
        seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(log_mutex);
        if (log) log(e.what());
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(
      settings.threads > 0 ? static_cast<std::size_t>(settings.threads) : hw, std::max<std::size_t>(rows.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  FeatureCache cache;
  cache.dim = static_cast<std::uint32_t>(dim);
  cache.width = static_cast<std::uint16_t>(settings.width);
  cache.height = static_cast<std::uint16_t>(settings.height);
  cache.digest = settings.feature_digest();
  ExtractSummary summary;
  summary.images = rows.size();
  std::vector<double> ok_times;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (seconds[i] < 0.0) {
      ++summary.failed;
      continue;
    }
    ok_times.push_back(seconds[i]);
    cache.records.push_back({rows[i].person_id, rows[i].camera_id, std::move(features[i])});
  }
  write_feature_cache(cache, out);

  if (!ok_times.empty()) {
    double total = 0.0;
    for (double t : ok_times) total += t;
    summary.mean_seconds = total / static_cast<double>(ok_times.size());
    std::sort(ok_times.begin(), ok_times.end());
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ok_times.size()))) - 1;
    summary.p95_seconds = ok_times[std::min(idx, ok_times.size() - 1)];
  }
  return summary;
}

void check_digest(const FeatureCache& cache, const Settings& settings) {
  if (cache.digest != settings.feature_digest() || cache.width != settings.width ||
      cache.height != settings.height) {
    throw DataError("feature cache was built with different feature settings (cache digest " +
                    to_hex(cache.digest) + ", requested " + to_hex(settings.feature_digest()) + ")");
  }
}

namespace {

std::vector<std::string> cameras_of(const FeatureCache& cache) {
  std::set<std::string> cams;
  for (const auto& r : cache.records) cams.insert(r.camera_id);
  return {cams.begin(), cams.end()};
}

std::map<std::string, int> person_index(const FeatureCache& cache) {
  std::map<std::string, int> ids;
  for (const auto& r : cache.records) ids.emplace(r.person_id, 0);
  int k = 0;
  for (auto& [name, idx] : ids) idx = k++;
  return ids;
}

void check_camera(const std::vector<std::string>& cams, const std::string& name) {
  if (!std::binary_search(cams.begin(), cams.end(), name)) {
    throw DataError("camera '" + name + "' does not occur in the feature cache");
  }
}

std::pair<std::string, std::string> single_pair(const FeatureCache& cache,
                                                const CameraSelection& sel) {
  const auto cams = cameras_of(cache);
  if (sel.probe_cam.empty() != sel.gallery_cam.empty()) {
    throw UsageError("give both --probe-cam and --gallery-cam, or neither");
  }
  if (!sel.probe_cam.empty()) {
    if (sel.probe_cam == sel.gallery_cam) throw UsageError("probe and gallery cameras must differ");
    check_camera(cams, sel.probe_cam);
    check_camera(cams, sel.gallery_cam);
    return {sel.probe_cam, sel.gallery_cam};
  }
  if (cams.size() != 2) {
    throw UsageError("feature cache has " + std::to_string(cams.size()) +
                     " cameras; choose a pair with --probe-cam/--gallery-cam");
  }
  return {cams[0], cams[1]};
}

CrossViewDataset pair_dataset(const FeatureCache& cache, const std::map<std::string, int>& ids,
                              const std::string& cam_a, const std::string& cam_b) {
  std::set<int> in_a, in_b;
  for (const auto& r : cache.records) {
    if (r.camera_id == cam_a) in_a.insert(ids.at(r.person_id));
    if (r.camera_id == cam_b) in_b.insert(ids.at(r.person_id));
  }
  std::vector<std::size_t> xs, zs;
  CrossViewDataset ds;
  for (std::size_t i = 0; i < cache.records.size(); ++i) {
    const auto& r = cache.records[i];
    const int id = ids.at(r.person_id);
    if (!in_a.count(id) || !in_b.count(id)) continue;
    if (r.camera_id == cam_a) {
      xs.push_back(i);
      ds.y.push_back(id);
    } else if (r.camera_id == cam_b) {
      zs.push_back(i);
      ds.l.push_back(id);
    }
  }
  const auto d = static_cast<Eigen::Index>(cache.dim);
  auto fill = [&](const std::vector<std::size_t>& rows) {
    Matrix m(d, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t c = 0; c < rows.size(); ++c) {
      const auto& v = cache.records[rows[c]].values;
      for (Eigen::Index k = 0; k < d; ++k) m(k, static_cast<Eigen::Index>(c)) = v[static_cast<std::size_t>(k)];
    }
    return m;
  };
  ds.X = fill(xs);
  ds.Z = fill(zs);
  return ds;
}

}  // namespace

std::vector<CrossViewDataset> training_parts(const FeatureCache& cache,
                                             const CameraSelection& cameras) {
  const auto ids = person_index(cache);
  std::vector<std::pair<std::string, std::string>> pairs;
  if (!cameras.probe_cam.empty() || !cameras.gallery_cam.empty()) {
    pairs.push_back(single_pair(cache, cameras));
  } else {
    const auto cams = cameras_of(cache);
    if (cams.size() < 2) throw DataError("feature cache needs at least two cameras");
    for (std::size_t a = 0; a < cams.size(); ++a)
      for (std::size_t b = a + 1; b < cams.size(); ++b) pairs.emplace_back(cams[a], cams[b]);
  }
  std::vector<CrossViewDataset> parts;
  for (const auto& [a, b] : pairs) {
    CrossViewDataset ds = pair_dataset(cache, ids, a, b);
    if (ds.class_count() >= 2) parts.push_back(std::move(ds));
  }
  if (parts.empty()) {
    throw DataError("no camera pair shares at least two identities");
  }
  return parts;
}

AnyModel train_from_cache(const FeatureCache& cache, MethodKind method, const Settings& settings,
                          const CameraSelection& cameras) {
  const auto parts = training_parts(cache, cameras);
  switch (method) {
    case MethodKind::kXqda:
      return train_xqda(parts, settings.xqda);
    case MethodKind::kKissme:
    case MethodKind::kMahalanobis: {
      Eigen::Index samples = 0;
      for (const auto& ds : parts) samples += ds.X.cols() + ds.Z.cols();
      const int p = static_cast<int>(std::min<Eigen::Index>(
          {static_cast<Eigen::Index>(settings.pca_dims), static_cast<Eigen::Index>(cache.dim), samples - 1}));
      return method == MethodKind::kKissme
                 ? train_kissme(parts, p, settings.metric_reg)
                 : train_mahalanobis_genuine(parts, p, settings.metric_reg);
    }
    default:
      throw UsageError(std::string("method '") + method_name(method) + "' has nothing to train");
  }
}

ProtocolData protocol_data(const FeatureCache& cache, const CameraSelection& cameras) {
  const auto [probe, gallery] = single_pair(cache, cameras);
  const auto ids = person_index(cache);
  ProtocolData data;
  data.features.resize(static_cast<Eigen::Index>(cache.dim), static_cast<Eigen::Index>(cache.records.size()));
  for (std::size_t i = 0; i < cache.records.size(); ++i) {
    const auto& r = cache.records[i];
    for (std::size_t k = 0; k < cache.dim; ++k) {
      data.features(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = r.values[k];
    }
    data.person.push_back(ids.at(r.person_id));
    data.view.push_back(r.camera_id == probe ? 0 : r.camera_id == gallery ? 1 : -1);
  }
  return data;
}

std::shared_ptr<const Scorer> make_scorer(const AnyModel& model) {
  return std::visit([](const auto& m) { return make_scorer(m); }, model);
}

}  // namespace reid
