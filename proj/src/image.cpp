#include "reid/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "reid/error.hpp"

namespace reid {

RgbImage::RgbImage(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw UsageError("image dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * height * 3, fill);
}

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw UsageError("image dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

HsvImage::HsvImage(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw UsageError("image dimensions must be positive");
  }
  data_.resize(static_cast<std::size_t>(width) * height);
}

namespace {

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open image " + quoted(path));
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
bool next_token(const std::vector<unsigned char>& buf, std::size_t& pos, std::string& tok) {
  tok.clear();
  while (pos < buf.size()) {
    if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(buf[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  while (pos < buf.size() && !std::isspace(buf[pos]) && buf[pos] != '#') {
    tok.push_back(static_cast<char>(buf[pos++]));
  }
  return !tok.empty();
}

int parse_header_int(const std::string& tok, const std::filesystem::path& path) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(ch); }) ||
      tok.size() > 9) {
    throw DataError("corrupt PPM header in " + quoted(path));
  }
  return std::stoi(tok);
}

RgbImage decode_ppm(const std::vector<unsigned char>& buf, const std::filesystem::path& path) {
  std::size_t pos = 2;
  std::string tok;
  int dims[3];
  for (int& v : dims) {
    if (!next_token(buf, pos, tok)) {
      throw DataError("corrupt PPM header in " + quoted(path));
    }
    v = parse_header_int(tok, path);
  }
  const int width = dims[0], height = dims[1], maxval = dims[2];
  if (width < 1 || height < 1) {
    throw DataError("corrupt PPM header in " + quoted(path) + ": zero dimension");
  }
  if (maxval != 255) {
    throw DataError("unsupported PPM maxval " + std::to_string(maxval) + " in " + quoted(path));
  }
  if (pos >= buf.size() || !std::isspace(buf[pos])) {
    throw DataError("corrupt PPM header in " + quoted(path));
  }
  ++pos;
  const std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (buf.size() - pos < need) {
    throw DataError("corrupt PPM " + quoted(path) + ": truncated pixel data");
  }
  RgbImage img(width, height);
  std::transform(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                 buf.begin() + static_cast<std::ptrdiff_t>(pos + need), img.data().begin(),
                 [](unsigned char b) { return static_cast<double>(b); });
  return img;
}

RgbImage decode_png(const std::vector<unsigned char>& buf, const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, buf.data(), buf.size())) {
    throw DataError("corrupt PNG " + quoted(path) + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGBA;
  std::vector<png_byte> pixels(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, pixels.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw DataError("corrupt PNG " + quoted(path) + ": " + msg);
  }
  RgbImage img(static_cast<int>(png.width), static_cast<int>(png.height));
  auto& out = img.data();
  const std::size_t count = static_cast<std::size_t>(png.width) * png.height;
  for (std::size_t i = 0; i < count; ++i) {
    for (int c = 0; c < 3; ++c) out[i * 3 + c] = pixels[i * 4 + c];
  }
  return img;
}

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw DataError("cannot open image " + quoted(path) + ": no such file");
  }
  const auto buf = read_file(path);
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (buf.size() >= 8 && std::equal(std::begin(kPngSig), std::end(kPngSig), buf.begin())) {
    return decode_png(buf, path);
  }
  if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '6') {
    return decode_ppm(buf, path);
  }
  throw DataError("unsupported image format in " + quoted(path) + " (expected PNG or P6 PPM)");
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), to_byte);

  if (path.extension() == ".png") {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
      throw DataError("cannot write " + quoted(path) + ": " + png.message);
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + quoted(path));
  }
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw DataError("cannot write " + quoted(path));
  }
}

RgbImage resize_bilinear(const RgbImage& img, int width, int height) {
  if (width < 1 || height < 1) {
    throw UsageError("resize target dimensions must be positive");
  }
  if (width == img.width() && height == img.height()) {
    return img;
  }
  // Pixel centers aligned: source coordinate = (dst + 0.5) * scale - 0.5.
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  struct Tap {
    int i0, i1;
    double w1;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(static_cast<std::size_t>(n_out));
    for (int i = 0; i < n_out; ++i) {
      double src = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(n_in - 1));
      int i0 = static_cast<int>(std::floor(src));
      int i1 = std::min(i0 + 1, n_in - 1);
      t[static_cast<std::size_t>(i)] = {i0, i1, src - i0};
    }
    return t;
  };
  const auto tx = taps(width, img.width(), sx);
  const auto ty = taps(height, img.height(), sy);

  RgbImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const Tap& a = ty[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const Tap& b = tx[static_cast<std::size_t>(x)];
      for (int c = 0; c < 3; ++c) {
        double top = img.at(b.i0, a.i0, c) * (1.0 - b.w1) + img.at(b.i1, a.i0, c) * b.w1;
        double bot = img.at(b.i0, a.i1, c) * (1.0 - b.w1) + img.at(b.i1, a.i1, c) * b.w1;
        out.at(x, y, c) = std::clamp(top * (1.0 - a.w1) + bot * a.w1, 0.0, 255.0);
      }
    }
  }
  return out;
}

Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  Hsv out;
  out.v = mx / 255.0;
  if (mx <= 0.0) {
    return out;
  }
  const double delta = mx - mn;
  out.s = delta / mx;
  if (delta <= 0.0) {
    return out;
  }
  double h;
  if (mx == r) {
    h = 60.0 * (g - b) / delta;
  } else if (mx == g) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

std::array<double, 3> hsv_to_rgb(const Hsv& hsv) {
  const double v = hsv.v * 255.0;
  const double chroma = v * hsv.s;
  const double hp = hsv.h / 60.0;
  const double x = chroma * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  const double m = v - chroma;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
  }
  return {r + m, g + m, b + m};
}

HsvImage rgb_to_hsv(const RgbImage& img) {
  HsvImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = rgb_to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
    }
  }
  return out;
}

GrayImage to_gray(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  const auto& in = img.data();
  auto& g = out.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = (in[i * 3] + in[i * 3 + 1] + in[i * 3 + 2]) / 3.0;
  }
  return out;
}

RgbImage average_pool_2x2(const RgbImage& img) {
  if (img.width() < 2 || img.height() < 2) {
    throw UsageError("average_pool_2x2 needs an image of at least 2x2 pixels");
  }
  RgbImage out(img.width() / 2, img.height() / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = (img.at(2 * x, 2 * y, c) + img.at(2 * x + 1, 2 * y, c) +
                           img.at(2 * x, 2 * y + 1, c) + img.at(2 * x + 1, 2 * y + 1, c)) /
                          4.0;
      }
    }
  }
  return out;
}

}  // namespace reid
