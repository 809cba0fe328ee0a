#include "reid/lomo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reid/error.hpp"

namespace reid {

void LomoConfig::validate() const {
  if (stride < 1 || window < stride) {
    throw UsageError("LOMO needs window >= stride >= 1");
  }
  if (pyramid_levels < 1) {
    throw UsageError("LOMO needs at least one pyramid level");
  }
  if (siltp_scales.empty()) {
    throw UsageError("LOMO needs at least one SILTP scale");
  }
  for (const auto& s : siltp_scales) {
    if (s.radius < 1 || !(s.tau > 0.0 && s.tau < 1.0)) {
      throw UsageError("invalid SILTP scale (radius >= 1, 0 < tau < 1)");
    }
  }
  if (hsv_bins.h < 1 || hsv_bins.s < 1 || hsv_bins.v < 1) {
    throw UsageError("HSV bin counts must be positive");
  }
  retinex.validate();
}

std::vector<LevelGeometry> lomo_geometry(const LomoConfig& cfg, int width, int height) {
  cfg.validate();
  std::vector<LevelGeometry> levels;
  int w = width, h = height;
  for (int l = 0; l < cfg.pyramid_levels; ++l) {
    if (l > 0) {
      w /= 2;
      h /= 2;
    }
    if (w < cfg.window || h < cfg.window) {
      throw UsageError("geometry " + std::to_string(width) + "x" + std::to_string(height) +
                       " too small: pyramid level " + std::to_string(l) + " is " +
                       std::to_string(w) + "x" + std::to_string(h) + ", smaller than the " +
                       std::to_string(cfg.window) + "-pixel window");
    }
    levels.push_back({w, h, (h - cfg.window) / cfg.stride + 1, (w - cfg.window) / cfg.stride + 1});
  }
  return levels;
}

std::size_t lomo_dim(const LomoConfig& cfg, int width, int height) {
  std::size_t bands = 0;
  for (const auto& g : lomo_geometry(cfg, width, height)) bands += static_cast<std::size_t>(g.bands);
  return bands * static_cast<std::size_t>(cfg.band_dim());
}

Histogram band_max_pool(const std::vector<Histogram>& histograms) {
  if (histograms.empty()) {
    throw UsageError("band_max_pool needs at least one histogram");
  }
  Histogram out = histograms.front();
  for (const auto& h : histograms) {
    if (h.size() != out.size()) {
      throw UsageError("band_max_pool histograms differ in length");
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], h[i]);
  }
  return out;
}

namespace {

// Writes max over window histograms of one band into dst[0, n_codes).
void pool_band(const CodeImage& codes, int y0, int window, int stride, int n_windows,
               std::vector<int>& counts, double* dst) {
  const double area = static_cast<double>(window) * window;
  const auto n_codes = static_cast<std::size_t>(codes.n_codes);
  std::fill(dst, dst + n_codes, 0.0);
  for (int wi = 0; wi < n_windows; ++wi) {
    const int x0 = wi * stride;
    std::fill(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(n_codes), 0);
    for (int y = y0; y < y0 + window; ++y) {
      const std::uint16_t* row = codes.codes.data() + static_cast<std::size_t>(y) * codes.width;
      for (int x = x0; x < x0 + window; ++x) ++counts[row[x]];
    }
    for (std::size_t b = 0; b < n_codes; ++b) {
      if (counts[b] != 0) dst[b] = std::max(dst[b], counts[b] / area);
    }
  }
}

}  // namespace

FeatureVector extract_lomo(const RgbImage& img, const LomoConfig& cfg, bool finalize) {
  const auto geometry = lomo_geometry(cfg, img.width(), img.height());

  FeatureVector fv;
  fv.values.assign(lomo_dim(cfg, img.width(), img.height()), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(std::max(cfg.hsv_bins.count(), kSiltpCodes)));

  RgbImage level = multiscale_retinex(img, cfg.retinex);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < geometry.size(); ++l) {
    if (l > 0) level = average_pool_2x2(level);
    const LevelGeometry& g = geometry[l];

    std::vector<CodeImage> planes;
    planes.push_back(hsv_bin_codes(rgb_to_hsv(level), cfg.hsv_bins));
    const GrayImage gray = to_gray(level);
    for (const auto& s : cfg.siltp_scales) planes.push_back(siltp_codes(gray, s.radius, s.tau));

    for (int b = 0; b < g.bands; ++b) {
      for (std::size_t p = 0; p < planes.size(); ++p) {
        const auto len = static_cast<std::size_t>(planes[p].n_codes);
        pool_band(planes[p], b * cfg.stride, cfg.window, cfg.stride, g.windows_per_band, counts,
                  fv.values.data() + offset);
        BlockInfo info;
        info.level = static_cast<int>(l);
        info.band = b;
        info.kind = p == 0 ? BlockKind::kHsv : BlockKind::kSiltp;
        info.scale_index = p == 0 ? 0 : static_cast<int>(p - 1);
        info.offset = offset;
        info.length = len;
        fv.layout.push_back(info);
        offset += len;
      }
    }
  }

  if (finalize) finalize_lomo(fv);
  return fv;
}

void finalize_lomo(FeatureVector& fv) {
  for (double& v : fv.values) v = std::log(v + 1.0);
  for (BlockKind kind : {BlockKind::kHsv, BlockKind::kSiltp}) {
    double sq = 0.0;
    for (const auto& blk : fv.layout) {
      if (blk.kind != kind) continue;
      for (std::size_t i = blk.offset; i < blk.offset + blk.length; ++i) sq += fv.values[i] * fv.values[i];
    }
    if (sq <= 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (const auto& blk : fv.layout) {
      if (blk.kind != kind) continue;
      for (std::size_t i = blk.offset; i < blk.offset + blk.length; ++i) fv.values[i] *= inv;
    }
  }
}

}  // namespace reid
