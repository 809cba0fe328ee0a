#pragma once

#include <vector>

#include "reid/image.hpp"

namespace reid {

struct RetinexConfig {
  std::vector<double> sigmas{5.0, 20.0};
  double output_low = 0.0;
  double output_high = 255.0;

  void validate() const;
};

/// Normalized 1-D Gaussian of radius ceil(3*sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Replicate-padded separable Gaussian blur of one plane (row-major).
std::vector<double> gaussian_blur(const std::vector<double>& plane, int width, int height,
                                  const std::vector<double>& kernel);

/// Multiscale center/surround Retinex with one linear stretch shared by all
/// three channels. When the pooled response is flat the result is a constant
/// mid-range image and *degenerate (if given) is set.
RgbImage multiscale_retinex(const RgbImage& img, const RetinexConfig& cfg,
                            bool* degenerate = nullptr);

}  // namespace reid
