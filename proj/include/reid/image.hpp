#pragma once

#include <array>
#include <filesystem>
#include <vector>

namespace reid {

/// Interleaved RGB raster, row-major, channel values in [0, 255].
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c) { return data_[index(x, y) + c]; }
  double at(int x, int y, int c) const { return data_[index(x, y) + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Single-channel luminance raster in [0, 255].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }

  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

class HsvImage {
 public:
  HsvImage() = default;
  HsvImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  Hsv& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const Hsv& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Hsv> data_;
};

/// Decodes a PNG (8-bit gray/RGB/RGBA, alpha dropped) or binary PPM (P6,
/// maxval 255). Throws DataError naming the path on any failure.
RgbImage load_image(const std::filesystem::path& path);

/// Writes a P6 PPM, or a PNG when the extension is ".png". Values are rounded
/// and clamped to [0, 255].
void save_image(const RgbImage& img, const std::filesystem::path& path);

RgbImage resize_bilinear(const RgbImage& img, int width, int height);

Hsv rgb_to_hsv(double r, double g, double b);
std::array<double, 3> hsv_to_rgb(const Hsv& hsv);
HsvImage rgb_to_hsv(const RgbImage& img);

/// Mean of R, G and B per pixel.
GrayImage to_gray(const RgbImage& img);

/// Non-overlapping 2x2 block means; a trailing odd row/column is dropped.
RgbImage average_pool_2x2(const RgbImage& img);

}  // namespace reid
