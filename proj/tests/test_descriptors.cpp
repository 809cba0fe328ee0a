#include "doctest.h"
#include "reid/descriptors.hpp"
#include "reid/error.hpp"
#include "support.hpp"

using namespace reid;

namespace {

GrayImage random_gray(std::mt19937_64& rng, int w, int h, bool integral) {
  std::uniform_real_distribution<double> u(0.0, 255.0);
  GrayImage g(w, h);
  for (auto& v : g.data()) v = integral ? std::floor(u(rng)) : u(rng);
  return g;
}

// Ternary digit of one neighbour, straight from the definition.
int digit(double neighbour, double center, double tau) {
  if (neighbour > (1 + tau) * center) return 1;
  if (neighbour < (1 - tau) * center) return 2;
  return 0;
}

}  // namespace

TEST_CASE("SILTP of a constant image is all zeros") {
  const CodeImage c = siltp_codes(GrayImage(12, 9, 42.0), 3, 0.3);
  CHECK(c.n_codes == kSiltpCodes);
  for (auto v : c.codes) CHECK(v == 0);
}

TEST_CASE("SILTP hand-evaluated pixel") {
  // 3x3 with radius 1: centre 100, right 140, down 100, left 60, up 100.
  GrayImage g(3, 3, 100.0);
  g.at(2, 1) = 140;
  g.at(0, 1) = 60;
  const CodeImage c = siltp_codes(g, 1, 0.3);
  CHECK(c.at(1, 1) == 19);
}

TEST_CASE("SILTP matches the definition on random images away from band edges") {
  std::mt19937_64 rng(17);
  const GrayImage g = random_gray(rng, 20, 15, false);
  const int r = 3;
  const double tau = 0.3;
  const CodeImage c = siltp_codes(g, r, tau);
  for (int y = 0; y < 15; ++y) {
    for (int x = 0; x < 20; ++x) {
      const double center = g.at(x, y);
      const int nb[4][2] = {{std::min(x + r, 19), y}, {x, std::min(y + r, 14)}, {std::max(x - r, 0), y},
                            {x, std::max(y - r, 0)}};
      int code = 0, w = 1;
      for (auto& p : nb) {
        code += w * digit(g.at(p[0], p[1]), center, tau);
        w *= 3;
      }
      CHECK(c.at(x, y) == code);
    }
  }
}

TEST_CASE("SILTP codes are invariant to scaling") {
  std::mt19937_64 rng(23);
  for (bool integral : {true, false}) {
    const GrayImage g = random_gray(rng, 64, 64, integral);
    const CodeImage base = siltp_codes(g, 3, 0.3);
    for (double k : {0.5, 2.0, 3.0, 3.7}) {
      GrayImage s = g;
      for (auto& v : s.data()) v *= k;
      CHECK(siltp_codes(s, 3, 0.3).codes == base.codes);
    }
  }
}

TEST_CASE("SILTP rejects bad parameters") {
  GrayImage g(4, 4, 1.0);
  CHECK_THROWS_AS(siltp_codes(g, 0, 0.3), UsageError);
  CHECK_THROWS_AS(siltp_codes(g, 1, 0.0), UsageError);
  CHECK_THROWS_AS(siltp_codes(g, 1, 1.0), UsageError);
}

TEST_CASE("HSV bin codes") {
  HsvImage img(3, 1);
  img.at(0, 0) = {0, 0, 0};
  img.at(1, 0) = {359.9, 1, 1};
  img.at(2, 0) = {90, 0.5, 0.25};
  const CodeImage c = hsv_bin_codes(img);
  CHECK(c.n_codes == 512);
  CHECK(c.at(0, 0) == 0);
  CHECK(c.at(1, 0) == 511);
  CHECK(c.at(2, 0) == 162);
}

TEST_CASE("HSV binning reaches every code on a dense grid") {
  const int n = 16;
  HsvImage img(n * n * n, 1);
  int x = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) img.at(x++, 0) = {(a + 0.5) * 360.0 / n, (b + 0.5) / n, (d + 0.5) / n};
  const CodeImage c = hsv_bin_codes(img);
  std::vector<int> seen(512, 0);
  for (auto v : c.codes) {
    REQUIRE(v < 512);
    seen[v] = 1;
  }
  CHECK(std::count(seen.begin(), seen.end(), 1) == 512);
}

TEST_CASE("window histogram of a constant-code window is an indicator") {
  CodeImage c{10, 10, 81, std::vector<std::uint16_t>(100, 7)};
  const Histogram h = window_histogram(c, 0, 0, 10, 10, true);
  for (int i = 0; i < 81; ++i) CHECK(h[static_cast<std::size_t>(i)] == (i == 7 ? 1.0 : 0.0));
}

TEST_CASE("window histogram mass and brute-force tally") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> code(0, 80);
  CodeImage c{30, 25, 81, {}};
  for (int i = 0; i < 30 * 25; ++i) c.codes.push_back(static_cast<std::uint16_t>(code(rng)));

  std::uniform_int_distribution<int> pos(0, 15);
  for (int trial = 0; trial < 50; ++trial) {
    const int x0 = pos(rng), y0 = pos(rng);
    const int w = 1 + pos(rng) % (30 - x0), h = 1 + pos(rng) % (25 - y0);
    const Histogram raw = window_histogram(c, x0, y0, w, h, false);
    std::vector<double> tally(81, 0.0);
    for (int y = y0; y < y0 + h; ++y)
      for (int x = x0; x < x0 + w; ++x) tally[c.at(x, y)] += 1.0;
    CHECK(raw == tally);
    const Histogram norm = window_histogram(c, x0, y0, w, h, true);
    double total = 0;
    for (double v : norm) total += v;
    CHECK(total == doctest::Approx(1.0));
  }
  double sum = 0;
  for (double v : window_histogram(c, 0, 0, 10, 10, false)) sum += v;
  CHECK(sum == 100.0);
}

TEST_CASE("window outside the image is rejected") {
  CodeImage c{10, 10, 81, std::vector<std::uint16_t>(100, 0)};
  CHECK_THROWS_AS(window_histogram(c, 5, 0, 10, 10, false), UsageError);
  CHECK_THROWS_AS(window_histogram(c, -1, 0, 2, 2, false), UsageError);
  CHECK_THROWS_AS(window_histogram(c, 0, 0, 0, 2, false), UsageError);
}
