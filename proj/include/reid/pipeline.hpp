#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "reid/eval.hpp"
#include "reid/settings.hpp"
#include "reid/storage.hpp"

namespace reid {

using LogFn = std::function<void(const std::string&)>;

struct ExtractSummary {
  std::size_t images = 0;
  std::size_t failed = 0;
  double mean_seconds = 0.0;
  double p95_seconds = 0.0;
};

/// Resize, describe and cache every manifest image with a bounded worker
/// pool. Records keep manifest order; failed images are logged, counted and
/// left out of the cache.
ExtractSummary extract_manifest(const std::vector<ManifestRow>& rows, const Settings& settings,
                                const std::filesystem::path& out, const LogFn& log = {});

/// Resized-and-described features of one image.
std::vector<double> describe_image(const RgbImage& img, const Settings& settings);

/// Empty names mean "pick automatically".
struct CameraSelection {
  std::string probe_cam;
  std::string gallery_cam;
};

/// DataError if the cache was produced with different feature settings.
void check_digest(const FeatureCache& cache, const Settings& settings);

/// One two-view dataset per camera pair: the named pair, or every unordered
/// pair of distinct cameras when none is named. Identities seen by only one
/// camera of a pair are left out of that pair.
std::vector<CrossViewDataset> training_parts(const FeatureCache& cache,
                                             const CameraSelection& cameras);

AnyModel train_from_cache(const FeatureCache& cache, MethodKind method, const Settings& settings,
                          const CameraSelection& cameras);

/// Probe view = probe camera, gallery view = gallery camera. Requires a
/// single camera pair (named, or the only two cameras present).
ProtocolData protocol_data(const FeatureCache& cache, const CameraSelection& cameras);

std::shared_ptr<const Scorer> make_scorer(const AnyModel& model);

}  // namespace reid
