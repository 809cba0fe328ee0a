#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "reid/image.hpp"
#include "reid/linalg.hpp"

namespace reid::test {

// Fresh per-process scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("reid_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline RgbImage random_image(std::mt19937_64& rng, int w, int h, double lo = 0.0, double hi = 255.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RgbImage img(w, h);
  for (auto& v : img.data()) v = u(rng);
  return img;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
  const double scale = b.norm();
  return scale == 0.0 ? (a - b).norm() : (a - b).norm() / scale;
}

}  // namespace reid::test
