#pragma once

#include <cstddef>
#include <vector>

#include "reid/descriptors.hpp"
#include "reid/image.hpp"
#include "reid/retinex.hpp"

namespace reid {

struct SiltpScale {
  int radius = 3;
  double tau = 0.3;
};

struct LomoConfig {
  int window = 10;
  int stride = 5;
  int pyramid_levels = 3;
  std::vector<SiltpScale> siltp_scales{{3, 0.3}, {5, 0.3}};
  HsvBins hsv_bins{};
  RetinexConfig retinex{};

  void validate() const;
  /// Bins contributed by one horizontal band (all HSV + all SILTP blocks).
  int band_dim() const { return hsv_bins.count() + kSiltpCodes * static_cast<int>(siltp_scales.size()); }
};

enum class BlockKind { kHsv, kSiltp };

struct BlockInfo {
  int level = 0;
  int band = 0;
  BlockKind kind = BlockKind::kHsv;
  int scale_index = 0;  // index into siltp_scales; 0 for HSV blocks
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<BlockInfo> layout;
};

struct LevelGeometry {
  int width = 0;
  int height = 0;
  int bands = 0;             // horizontal groups (rows of windows)
  int windows_per_band = 0;  // window positions along x
};

/// Per-level image sizes and window counts; throws UsageError when a level
/// cannot hold a single window.
std::vector<LevelGeometry> lomo_geometry(const LomoConfig& cfg, int width, int height);

std::size_t lomo_dim(const LomoConfig& cfg, int width, int height);

/// Bin-wise maximum of equally sized histograms.
Histogram band_max_pool(const std::vector<Histogram>& histograms);

/// Full descriptor. With finalize == false the log transform and the two
/// family-wise unit normalizations are skipped, leaving raw band maxima.
FeatureVector extract_lomo(const RgbImage& img, const LomoConfig& cfg, bool finalize = true);

/// log(v + 1), then unit L2 norm over all HSV blocks and over all SILTP blocks.
void finalize_lomo(FeatureVector& fv);

}  // namespace reid
