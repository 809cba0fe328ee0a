#include "reid/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reid/error.hpp"

namespace reid {

CodeImage siltp_codes(const GrayImage& img, int radius, double tau) {
  if (radius < 1) {
    throw UsageError("SILTP radius must be positive, got " + std::to_string(radius));
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw UsageError("SILTP tau must lie in (0, 1)");
  }
  const int w = img.width(), h = img.height();
  CodeImage out{w, h, kSiltpCodes, std::vector<std::uint16_t>(static_cast<std::size_t>(w) * h)};

  // Band edges are widened by a relative 1e-12 so that values lying exactly on
  // an edge in real arithmetic stay "inside" after any rescaling of the image.
  constexpr double kEdgeSlack = 1e-12;
  const double up_scale = (1.0 + tau) * (1.0 + kEdgeSlack);
  const double down_scale = (1.0 - tau) * (1.0 - kEdgeSlack);
  for (int y = 0; y < h; ++y) {
    const int yu = std::max(y - radius, 0);
    const int yd = std::min(y + radius, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xl = std::max(x - radius, 0);
      const int xr = std::min(x + radius, w - 1);
      const double center = img.at(x, y);
      const double upper = up_scale * center;
      const double lower = down_scale * center;
      const double neighbours[4] = {img.at(xr, y), img.at(x, yd), img.at(xl, y), img.at(x, yu)};
      int code = 0;
      int weight = 1;
      for (double v : neighbours) {
        if (v > upper) {
          code += weight;
        } else if (v < lower) {
          code += 2 * weight;
        }
        weight *= 3;
      }
      out.codes[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint16_t>(code);
    }
  }
  return out;
}

CodeImage hsv_bin_codes(const HsvImage& img, const HsvBins& bins) {
  if (bins.h < 1 || bins.s < 1 || bins.v < 1 || bins.count() > 65535) {
    throw UsageError("invalid HSV bin counts");
  }
  const int w = img.width(), h = img.height();
  CodeImage out{w, h, bins.count(), std::vector<std::uint16_t>(static_cast<std::size_t>(w) * h)};
  const double h_width = 360.0 / bins.h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Hsv& p = img.at(x, y);
      const int hb = std::clamp(static_cast<int>(std::floor(p.h / h_width)), 0, bins.h - 1);
      const int sb = std::clamp(static_cast<int>(std::floor(p.s * bins.s)), 0, bins.s - 1);
      const int vb = std::clamp(static_cast<int>(std::floor(p.v * bins.v)), 0, bins.v - 1);
      out.codes[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint16_t>((hb * bins.s + sb) * bins.v + vb);
    }
  }
  return out;
}

Histogram window_histogram(const CodeImage& codes, int x0, int y0, int w, int h, bool normalize) {
  if (w < 1 || h < 1 || x0 < 0 || y0 < 0 || x0 + w > codes.width || y0 + h > codes.height) {
    throw UsageError("histogram window [" + std::to_string(x0) + "," + std::to_string(y0) + " " +
                     std::to_string(w) + "x" + std::to_string(h) + "] outside " +
                     std::to_string(codes.width) + "x" + std::to_string(codes.height) + " image");
  }
  Histogram hist(static_cast<std::size_t>(codes.n_codes), 0.0);
  for (int y = y0; y < y0 + h; ++y) {
    const std::uint16_t* row = codes.codes.data() + static_cast<std::size_t>(y) * codes.width;
    for (int x = x0; x < x0 + w; ++x) hist[row[x]] += 1.0;
  }
  if (normalize) {
    const double area = static_cast<double>(w) * h;
    for (double& b : hist) b /= area;
  }
  return hist;
}

}  // namespace reid
