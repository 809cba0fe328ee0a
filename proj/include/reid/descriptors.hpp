#pragma once

#include <cstdint>
#include <vector>

#include "reid/image.hpp"

namespace reid {

/// Per-pixel discrete pattern codes in [0, n_codes).
struct CodeImage {
  int width = 0;
  int height = 0;
  int n_codes = 0;
  std::vector<std::uint16_t> codes;

  std::uint16_t at(int x, int y) const {
    return codes[static_cast<std::size_t>(y) * width + x];
  }
};

using Histogram = std::vector<double>;

/// Number of codes produced by the 4-neighbour ternary pattern (3^4).
inline constexpr int kSiltpCodes = 81;

/// Scale-invariant local ternary pattern over the 4-neighbourhood at
/// distance `radius`, digits ordered [right, down, left, up] with weights
/// 1, 3, 9, 27. A neighbour above (1+tau)*center yields 1, below
/// (1-tau)*center yields 2. Borders are replicate-padded.
CodeImage siltp_codes(const GrayImage& img, int radius, double tau);

struct HsvBins {
  int h = 8;
  int s = 8;
  int v = 8;

  int count() const { return h * s * v; }
};

/// Joint HSV bin index: h_bin * (s*v) + s_bin * v + v_bin.
CodeImage hsv_bin_codes(const HsvImage& img, const HsvBins& bins = {});

/// Code counts inside [x0, x0+w) x [y0, y0+h); divided by w*h if normalize.
Histogram window_histogram(const CodeImage& codes, int x0, int y0, int w, int h, bool normalize);

}  // namespace reid
