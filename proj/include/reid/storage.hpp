#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "reid/baselines.hpp"
#include "reid/settings.hpp"
#include "reid/xqda.hpp"

namespace reid {

struct ManifestRow {
  std::filesystem::path image_path;  // resolved against the manifest directory
  std::string person_id;
  std::string camera_id;
};

/// CSV with a header naming image_path, person_id and camera_id (any column
/// order, extra columns ignored). Paths must be unique.
std::vector<ManifestRow> load_manifest(const std::filesystem::path& path);

struct CacheRecord {
  std::string person_id;
  std::string camera_id;
  std::vector<float> values;
};

/// On disk, little-endian:
///   "LOMO" | version u16 | dim u32 | count u32 | width u16 | height u16 |
///   digest[32] | count x (u16 len + person_id | u16 len + camera_id | dim x f32)
struct FeatureCache {
  static constexpr std::uint16_t kVersion = 1;

  std::uint32_t dim = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  ConfigDigest digest{};
  std::vector<CacheRecord> records;
};

void write_feature_cache(const FeatureCache& cache, const std::filesystem::path& path);
FeatureCache read_feature_cache(const std::filesystem::path& path);

/// XQDA file, little-endian:
///   "XQDA" | version u16 = 1 | d u32 | r u32 | regularizer f64 |
///   W (d x r, column-major f64) | M (r x r) | eigenvalues (r)
/// Baseline metric file shares the magic with version 2:
///   "XQDA" | version u16 = 2 | method tag u8 (1 kissme, 2 mahalanobis) |
///   d u32 | p u32 | regularizer f64 | has_pca u8 | [mean (d) | basis (d x p)] | M (p x p)
inline constexpr std::uint16_t kXqdaFileVersion = 1;
inline constexpr std::uint16_t kMetricFileVersion = 2;

using AnyModel = std::variant<XqdaModel, MetricModel>;

void save_model(const XqdaModel& model, const std::filesystem::path& path);
void save_model(const MetricModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace reid
