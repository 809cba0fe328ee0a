#include "reid/retinex.hpp"

#include <algorithm>
#include <cmath>

#include "reid/error.hpp"

namespace reid {

void RetinexConfig::validate() const {
  if (sigmas.empty()) {
    throw UsageError("retinex needs at least one surround scale");
  }
  for (double s : sigmas) {
    if (!(s > 0.0)) throw UsageError("retinex scales must be positive");
  }
  if (!(output_low < output_high)) {
    throw UsageError("retinex output_low must be below output_high");
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) {
    throw UsageError("gaussian sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double v = std::exp(-0.5 * i * i / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

std::vector<double> gaussian_blur(const std::vector<double>& plane, int width, int height,
                                  const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(plane.size());
  std::vector<double> out(plane.size());
  std::vector<double> line;

  // Horizontal pass over a replicate-padded copy of each row.
  line.resize(static_cast<std::size_t>(width + 2 * radius));
  for (int y = 0; y < height; ++y) {
    const double* row = plane.data() + static_cast<std::size_t>(y) * width;
    for (int i = 0; i < width + 2 * radius; ++i) {
      line[static_cast<std::size_t>(i)] = row[std::clamp(i - radius, 0, width - 1)];
    }
    double* dst = tmp.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kernel.size(); ++k) acc += kernel[k] * line[x + k];
      dst[x] = acc;
    }
  }

  line.resize(static_cast<std::size_t>(height + 2 * radius));
  for (int x = 0; x < width; ++x) {
    for (int i = 0; i < height + 2 * radius; ++i) {
      line[static_cast<std::size_t>(i)] =
          tmp[static_cast<std::size_t>(std::clamp(i - radius, 0, height - 1)) * width + x];
    }
    for (int y = 0; y < height; ++y) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kernel.size(); ++k) acc += kernel[k] * line[y + k];
      out[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

RgbImage multiscale_retinex(const RgbImage& img, const RetinexConfig& cfg, bool* degenerate) {
  cfg.validate();
  const int w = img.width(), h = img.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;

  std::vector<std::vector<double>> kernels;
  for (double s : cfg.sigmas) kernels.push_back(gaussian_kernel(s));

  std::vector<double> response(n * 3, 0.0);
  std::vector<double> plane(n);
  const double weight = 1.0 / static_cast<double>(cfg.sigmas.size());
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) plane[i] = img.data()[i * 3 + c];
    for (const auto& k : kernels) {
      const auto surround = gaussian_blur(plane, w, h, k);
      for (std::size_t i = 0; i < n; ++i) {
        response[i * 3 + c] += weight * (std::log(plane[i] + 1.0) - std::log(surround[i] + 1.0));
      }
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(response.begin(), response.end());
  const double lo = *lo_it, hi = *hi_it;
  if (degenerate) *degenerate = false;
  RgbImage out(w, h);
  // A flat response has no range to stretch; a relative guard keeps
  // round-off noise in the surround from being amplified to full scale.
  if (!(hi - lo > 1e-12 * std::max(1.0, std::fabs(hi)))) {
    std::fill(out.data().begin(), out.data().end(), 0.5 * (cfg.output_low + cfg.output_high));
    if (degenerate) *degenerate = true;
    return out;
  }
  const double gain = (cfg.output_high - cfg.output_low) / (hi - lo);
  auto& dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = std::clamp(cfg.output_low + gain * (response[i] - lo), cfg.output_low,
                        cfg.output_high);
  }
  return out;
}

}  // namespace reid
