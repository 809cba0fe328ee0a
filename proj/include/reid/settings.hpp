#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "reid/eval.hpp"
#include "reid/lomo.hpp"
#include "reid/xqda.hpp"

namespace reid {

using ConfigDigest = std::array<std::uint8_t, 32>;

/// Every tunable of the toolchain, loadable from a flat "key = value" file.
///
/// Keys: width, height, window, stride, pyramid_levels, siltp_scales
/// ("3:0.3,5:0.3"), hsv_bins ("8,8,8"), retinex_sigmas ("5,20"),
/// retinex_low, retinex_high, regularizer, max_dims ("none" or an integer),
/// eigen_threshold, trials, train_fraction, train_count ("none" or an
/// integer), shot (single|multi), seed, pca_dims, metric_reg, threads.
struct Settings {
  int width = 48;
  int height = 128;
  LomoConfig lomo;
  XqdaConfig xqda;
  ProtocolConfig protocol;
  int pca_dims = 100;
  double metric_reg = 0.001;
  int threads = 0;  // 0 = hardware concurrency

  /// Throws UsageError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  /// Canonical text of everything that shapes a descriptor.
  std::string feature_canonical() const;
  /// SHA-256 of feature_canonical().
  ConfigDigest feature_digest() const;
};

Settings load_settings(const std::filesystem::path& path);

std::string to_hex(const ConfigDigest& digest);

}  // namespace reid
