#include <cmath>
#include <numeric>

#include "doctest.h"
#include "reid/error.hpp"
#include "reid/retinex.hpp"
#include "support.hpp"

using namespace reid;

namespace {

double max_abs_diff(const RgbImage& a, const RgbImage& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

// Direct 2-D convolution with replicate borders; independent of the
// separable implementation.
std::vector<double> blur_2d(const std::vector<double>& plane, int w, int h, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> out(plane.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0, norm = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const double g = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
          const int sx = std::clamp(x + dx, 0, w - 1), sy = std::clamp(y + dy, 0, h - 1);
          acc += g * plane[static_cast<std::size_t>(sy * w + sx)];
          norm += g;
        }
      }
      out[static_cast<std::size_t>(y * w + x)] = acc / norm;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("Gaussian kernel is normalized and symmetric") {
  for (double sigma : {0.5, 1.0, 5.0, 20.0}) {
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(std::ceil(3 * sigma));
    REQUIRE(k.size() == static_cast<std::size_t>(2 * r + 1));
    CHECK(std::abs(std::accumulate(k.begin(), k.end(), 0.0) - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
  }
  CHECK_THROWS_AS(gaussian_kernel(0.0), UsageError);
  CHECK_THROWS_AS(gaussian_kernel(-1.0), UsageError);
}

TEST_CASE("separable blur equals direct 2-D convolution") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 255);
  const int w = 13, h = 9;
  std::vector<double> plane(static_cast<std::size_t>(w * h));
  for (auto& v : plane) v = u(rng);
  for (double sigma : {1.0, 2.5}) {
    const auto fast = gaussian_blur(plane, w, h, gaussian_kernel(sigma));
    const auto slow = blur_2d(plane, w, h, sigma);
    for (std::size_t i = 0; i < plane.size(); ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-10));
  }
}

TEST_CASE("blur keeps constant planes constant") {
  std::vector<double> plane(40, 12.5);
  for (double v : gaussian_blur(plane, 8, 5, gaussian_kernel(5.0))) CHECK(v == doctest::Approx(12.5));
}

TEST_CASE("constant image takes the degenerate path") {
  bool degenerate = false;
  const RgbImage out = multiscale_retinex(RgbImage(20, 30, 90.0), RetinexConfig{}, &degenerate);
  CHECK(degenerate);
  for (double v : out.data()) CHECK(v == 127.5);
}

TEST_CASE("output spans the configured range") {
  std::mt19937_64 rng(2);
  const RgbImage img = test::random_image(rng, 24, 40);
  bool degenerate = true;
  const RgbImage out = multiscale_retinex(img, RetinexConfig{}, &degenerate);
  CHECK_FALSE(degenerate);
  const auto [lo, hi] = std::minmax_element(out.data().begin(), out.data().end());
  CHECK(*lo == doctest::Approx(0.0));
  CHECK(*hi == doctest::Approx(255.0));

  RetinexConfig narrow;
  narrow.output_low = 10;
  narrow.output_high = 20;
  const RgbImage n = multiscale_retinex(img, narrow);
  for (double v : n.data()) {
    CHECK(v >= 10.0);
    CHECK(v <= 20.0);
  }
}

TEST_CASE("halving the gain changes the output by at most one gray level") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 5; ++i) {
    const RgbImage img = test::random_image(rng, 32, 32, 64.0, 255.0);
    RgbImage half = img;
    for (auto& v : half.data()) v *= 0.5;
    CHECK(max_abs_diff(multiscale_retinex(img, {}), multiscale_retinex(half, {})) <= 1.0);
  }
}

TEST_CASE("single-scale output matches a direct evaluation") {
  std::mt19937_64 rng(4);
  const RgbImage img = test::random_image(rng, 10, 8);
  RetinexConfig cfg;
  cfg.sigmas = {1.5};
  const RgbImage out = multiscale_retinex(img, cfg);

  const std::size_t n = 80;
  std::vector<double> resp(n * 3);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> plane(n);
    for (std::size_t i = 0; i < n; ++i) plane[i] = img.data()[i * 3 + c];
    const auto s = blur_2d(plane, 10, 8, 1.5);
    for (std::size_t i = 0; i < n; ++i) resp[i * 3 + c] = std::log(plane[i] + 1) - std::log(s[i] + 1);
  }
  const auto [lo, hi] = std::minmax_element(resp.begin(), resp.end());
  for (std::size_t i = 0; i < resp.size(); ++i) {
    CHECK(out.data()[i] == doctest::Approx(255.0 * (resp[i] - *lo) / (*hi - *lo)).epsilon(1e-9));
  }
}

TEST_CASE("invalid configurations are rejected") {
  RetinexConfig cfg;
  cfg.sigmas = {};
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.sigmas = {5, -1};
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.output_low = 200;
  cfg.output_high = 100;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}
