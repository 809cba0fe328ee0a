#include "reid/settings.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "reid/error.hpp"

namespace reid {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0) {
    throw UsageError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return x;
}

double parse_real(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno != 0) {
    throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return x;
}

int parse_small_int(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < -1'000'000'000LL || x > 1'000'000'000LL) {
    throw UsageError("config key '" + key + "': value out of range");
  }
  return static_cast<int>(x);
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void Settings::set(const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  if (key == "width") {
    width = parse_small_int(key, v);
  } else if (key == "height") {
    height = parse_small_int(key, v);
  } else if (key == "window") {
    lomo.window = parse_small_int(key, v);
  } else if (key == "stride") {
    lomo.stride = parse_small_int(key, v);
  } else if (key == "pyramid_levels") {
    lomo.pyramid_levels = parse_small_int(key, v);
  } else if (key == "siltp_scales") {
    lomo.siltp_scales.clear();
    for (const auto& item : split(v, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw UsageError("siltp_scales entries must look like radius:tau, got '" + item + "'");
      }
      lomo.siltp_scales.push_back({parse_small_int(key, trim(item.substr(0, colon))),
                                   parse_real(key, trim(item.substr(colon + 1)))});
    }
  } else if (key == "hsv_bins") {
    const auto parts = split(v, ',');
    if (parts.size() != 3) throw UsageError("hsv_bins needs three comma-separated counts");
    lomo.hsv_bins = {parse_small_int(key, parts[0]), parse_small_int(key, parts[1]),
                     parse_small_int(key, parts[2])};
  } else if (key == "retinex_sigmas") {
    lomo.retinex.sigmas.clear();
    for (const auto& item : split(v, ',')) lomo.retinex.sigmas.push_back(parse_real(key, item));
  } else if (key == "retinex_low") {
    lomo.retinex.output_low = parse_real(key, v);
  } else if (key == "retinex_high") {
    lomo.retinex.output_high = parse_real(key, v);
  } else if (key == "regularizer") {
    xqda.regularizer = parse_real(key, v);
  } else if (key == "max_dims") {
    if (v == "none") {
      xqda.max_dims.reset();
    } else {
      xqda.max_dims = parse_small_int(key, v);
    }
  } else if (key == "eigen_threshold") {
    xqda.eigen_threshold = parse_real(key, v);
  } else if (key == "trials") {
    protocol.trials = parse_small_int(key, v);
  } else if (key == "train_fraction") {
    protocol.train_fraction = parse_real(key, v);
  } else if (key == "train_count") {
    if (v == "none") {
      protocol.train_count.reset();
    } else {
      protocol.train_count = parse_small_int(key, v);
    }
  } else if (key == "shot") {
    if (v == "single") {
      protocol.shot = ShotMode::kSingle;
    } else if (v == "multi") {
      protocol.shot = ShotMode::kMulti;
    } else {
      throw UsageError("shot must be 'single' or 'multi', got '" + v + "'");
    }
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw UsageError("seed must be non-negative");
    protocol.seed = static_cast<std::uint64_t>(s);
  } else if (key == "pca_dims") {
    pca_dims = parse_small_int(key, v);
  } else if (key == "metric_reg") {
    metric_reg = parse_real(key, v);
  } else if (key == "threads") {
    threads = parse_small_int(key, v);
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

void Settings::validate() const {
  if (width < 1 || height < 1 || width > 65535 || height > 65535) {
    throw UsageError("image geometry must be within 1..65535 pixels");
  }
  lomo.validate();
  lomo_geometry(lomo, width, height);
  xqda.validate();
  protocol.validate();
  if (pca_dims < 1) throw UsageError("pca_dims must be at least 1");
  if (!(metric_reg >= 0.0)) throw UsageError("metric_reg must be non-negative");
  if (threads < 0) throw UsageError("threads must be non-negative");
}

std::string Settings::feature_canonical() const {
  std::ostringstream os;
  os << "lomo-features-v1;width=" << width << ";height=" << height << ";window=" << lomo.window
     << ";stride=" << lomo.stride << ";levels=" << lomo.pyramid_levels << ";siltp=";
  for (const auto& s : lomo.siltp_scales) os << s.radius << ':' << real(s.tau) << ',';
  os << ";hsv=" << lomo.hsv_bins.h << ',' << lomo.hsv_bins.s << ',' << lomo.hsv_bins.v
     << ";retinex=";
  for (double s : lomo.retinex.sigmas) os << real(s) << ',';
  os << ";range=" << real(lomo.retinex.output_low) << ',' << real(lomo.retinex.output_high);
  return os.str();
}

ConfigDigest Settings::feature_digest() const {
  const std::string text = feature_canonical();
  ConfigDigest out{};
  unsigned int len = 0;
  if (!EVP_Digest(text.data(), text.size(), out.data(), &len, EVP_sha256(), nullptr) ||
      len != out.size()) {
    throw NumericError("SHA-256 computation failed");
  }
  return out;
}

Settings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path.string() + "'");
  Settings s;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      s.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  s.validate();
  return s;
}

std::string to_hex(const ConfigDigest& digest) {
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (auto b : digest) {
    out += kHex[b >> 4];
    out += kHex[b & 15];
  }
  return out;
}

}  // namespace reid
