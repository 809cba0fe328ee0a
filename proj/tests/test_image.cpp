#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "reid/error.hpp"
#include "reid/image.hpp"
#include "support.hpp"

using namespace reid;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST_CASE("single-pixel PPM loads") {
  const auto dir = test::scratch_dir("img");
  write_bytes(dir / "red.ppm", std::string("P6\n1 1\n255\n") + '\xff' + '\0' + '\0');
  const RgbImage img = load_image(dir / "red.ppm");
  CHECK(img.width() == 1);
  CHECK(img.height() == 1);
  CHECK(img.at(0, 0, 0) == 255.0);
  CHECK(img.at(0, 0, 1) == 0.0);
  CHECK(img.at(0, 0, 2) == 0.0);
}

TEST_CASE("PPM header comments are skipped") {
  const auto dir = test::scratch_dir("img");
  write_bytes(dir / "c.ppm", std::string("P6\n# made by hand\n1 1\n255\n") + "\x01\x02\x03");
  const RgbImage img = load_image(dir / "c.ppm");
  CHECK(img.at(0, 0, 2) == 3.0);
}

TEST_CASE("truncated PPM payload is a corrupt-file error naming the path") {
  const auto dir = test::scratch_dir("img");
  const auto path = dir / "short.ppm";
  write_bytes(path, std::string("P6\n4 4\n255\n") + "abc");
  try {
    load_image(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("short.ppm") != std::string::npos);
    CHECK(msg.find("corrupt") != std::string::npos);
  }
}

TEST_CASE("missing and garbage files are data errors") {
  const auto dir = test::scratch_dir("img");
  CHECK_THROWS_AS(load_image(dir / "nope.png"), DataError);
  write_bytes(dir / "junk.png", "not an image at all");
  CHECK_THROWS_AS(load_image(dir / "junk.png"), DataError);
  write_bytes(dir / "deep.ppm", "P6\n1 1\n65535\n\0\0\0\0\0\0");
  CHECK_THROWS_AS(load_image(dir / "deep.ppm"), DataError);
}

TEST_CASE("PNG and PPM round trips preserve 8-bit content") {
  const auto dir = test::scratch_dir("img");
  std::mt19937_64 rng(7);
  RgbImage img = test::random_image(rng, 128, 48);
  for (auto& v : img.data()) v = std::round(v);
  for (const char* name : {"a.png", "a.ppm"}) {
    save_image(img, dir / name);
    const RgbImage back = load_image(dir / name);
    REQUIRE(back.width() == 128);
    REQUIRE(back.height() == 48);
    CHECK(back.data() == img.data());
  }
}

TEST_CASE("resize to the same size is the identity") {
  std::mt19937_64 rng(1);
  const RgbImage img = test::random_image(rng, 9, 13);
  CHECK(resize_bilinear(img, 9, 13).data() == img.data());
}

TEST_CASE("constant image stays constant at any size") {
  const RgbImage img(2, 2, 77.0);
  for (auto [w, h] : {std::pair{1, 1}, {5, 3}, {48, 128}}) {
    const RgbImage out = resize_bilinear(img, w, h);
    for (double v : out.data()) CHECK(v == doctest::Approx(77.0).epsilon(1e-12));
  }
}

TEST_CASE("4x4 checkerboard halves to 2x2 block means") {
  RgbImage img(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = ((x + y) % 2) ? 255.0 : 0.0;
  const RgbImage out = resize_bilinear(img, 2, 2);
  // Each output centre lies on the shared corner of a 2x2 block: equal
  // quarter weights on two black and two white pixels.
  for (double v : out.data()) CHECK(v == doctest::Approx(127.5));
}

TEST_CASE("bilinear resize matches a hand-written interpolation") {
  std::mt19937_64 rng(3);
  const RgbImage img = test::random_image(rng, 7, 5);
  const int W = 11, H = 4;
  const RgbImage out = resize_bilinear(img, W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double sx = std::clamp((x + 0.5) * 7.0 / W - 0.5, 0.0, 6.0);
      const double sy = std::clamp((y + 0.5) * 5.0 / H - 0.5, 0.0, 4.0);
      const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, 6), y1 = std::min(y0 + 1, 4);
      const double fx = sx - x0, fy = sy - y0;
      for (int c = 0; c < 3; ++c) {
        const double expect = (1 - fy) * ((1 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c)) +
                              fy * ((1 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c));
        CHECK(out.at(x, y, c) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("HSV of reference colours") {
  Hsv red = rgb_to_hsv(255, 0, 0);
  CHECK(red.h == 0.0);
  CHECK(red.s == 1.0);
  CHECK(red.v == 1.0);

  Hsv gray = rgb_to_hsv(128, 128, 128);
  CHECK(gray.h == 0.0);
  CHECK(gray.s == 0.0);
  CHECK(gray.v == doctest::Approx(128.0 / 255.0));

  Hsv cyan = rgb_to_hsv(0, 255, 255);
  CHECK(cyan.h == doctest::Approx(180.0));
  CHECK(cyan.s == 1.0);
  CHECK(cyan.v == 1.0);

  CHECK(rgb_to_hsv(0, 0, 0).h == 0.0);
  CHECK(rgb_to_hsv(0, 0, 0).s == 0.0);
}

TEST_CASE("HSV conversion inverts and stays in range") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  for (int i = 0; i < 2000; ++i) {
    const double r = u(rng), g = u(rng), b = u(rng);
    const Hsv hsv = rgb_to_hsv(r, g, b);
    REQUIRE(hsv.h >= 0.0);
    REQUIRE(hsv.h < 360.0);
    REQUIRE(hsv.s >= 0.0);
    REQUIRE(hsv.s <= 1.0);
    REQUIRE(hsv.v >= 0.0);
    REQUIRE(hsv.v <= 1.0);
    const auto back = hsv_to_rgb(hsv);
    CHECK(back[0] == doctest::Approx(r).epsilon(1e-9));
    CHECK(back[1] == doctest::Approx(g).epsilon(1e-9));
    CHECK(back[2] == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("2x2 pooling halves each level") {
  RgbImage img(48, 128);
  RgbImage a = average_pool_2x2(img);
  CHECK(a.width() == 24);
  CHECK(a.height() == 64);
  RgbImage b = average_pool_2x2(a);
  CHECK(b.width() == 12);
  CHECK(b.height() == 32);

  RgbImage odd(5, 3);
  CHECK(average_pool_2x2(odd).width() == 2);
  CHECK(average_pool_2x2(odd).height() == 1);
  CHECK_THROWS_AS(average_pool_2x2(RgbImage(1, 4)), UsageError);
}

TEST_CASE("2x2 pooling averages each block") {
  RgbImage img(2, 2);
  for (int c = 0; c < 3; ++c) {
    img.at(0, 0, c) = 0;
    img.at(1, 0, c) = 0;
    img.at(0, 1, c) = 100;
    img.at(1, 1, c) = 100;
  }
  const RgbImage out = average_pool_2x2(img);
  for (double v : out.data()) CHECK(v == 50.0);

  const RgbImage flat = average_pool_2x2(RgbImage(6, 4, 31.0));
  for (double v : flat.data()) CHECK(v == 31.0);
}

TEST_CASE("pooling preserves the mean of even-sized images") {
  std::mt19937_64 rng(5);
  const RgbImage img = test::random_image(rng, 16, 10);
  const RgbImage out = average_pool_2x2(img);
  double a = 0, b = 0;
  for (double v : img.data()) a += v;
  for (double v : out.data()) b += v;
  CHECK(b * 4 == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("gray is the channel mean") {
  RgbImage img(1, 1);
  img.at(0, 0, 0) = 30;
  img.at(0, 0, 1) = 60;
  img.at(0, 0, 2) = 90;
  CHECK(to_gray(img).at(0, 0) == doctest::Approx(60.0));
}
