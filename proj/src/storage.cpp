#include "reid/storage.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "reid/error.hpp"

namespace reid {

namespace {

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out(1);
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return out;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <typename T>
  void le(T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }
  void matrix(const Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) f64(m(r, c));
  }
  void text(const std::string& s, const std::filesystem::path& path) {
    if (s.size() > 0xffff) throw DataError("identifier too long for " + quoted(path));
    le(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void flush(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw DataError("cannot write " + quoted(path));
  }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + quoted(path));
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw DataError("truncated file " + quoted(path_));
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T le() {
    using U = std::make_unsigned_t<T>;
    need(sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<U>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  Matrix matrix(std::uint64_t rows, std::uint64_t cols) {
    need(rows * cols * 8);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = f64();
    return m;
  }
  std::string text() { return raw(le<std::uint16_t>()); }
  bool done() const { return pos_ == buf_.size(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<ManifestRow> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + quoted(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError("manifest " + quoted(path) + " is empty");

  const auto header = csv_fields(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : {"image_path", "person_id", "camera_id"}) {
    if (!col.count(name)) {
      throw DataError("manifest " + quoted(path) + " header lacks column '" + name + "'");
    }
  }
  const std::size_t ip = col["image_path"], pp = col["person_id"], cp = col["camera_id"];
  const std::size_t need = std::max({ip, pp, cp}) + 1;

  const auto base = path.parent_path();
  std::vector<ManifestRow> rows;
  std::set<std::filesystem::path> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = csv_fields(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() < need) throw DataError(where + ": expected at least " + std::to_string(need) + " fields");
    if (f[ip].empty() || f[pp].empty() || f[cp].empty()) throw DataError(where + ": empty field");
    std::filesystem::path img = f[ip];
    if (img.is_relative()) img = base / img;
    img = img.lexically_normal();
    if (!seen.insert(img).second) throw DataError(where + ": duplicate image path " + quoted(img));
    rows.push_back({img, f[pp], f[cp]});
  }
  if (rows.empty()) throw DataError("manifest " + quoted(path) + " lists no images");
  return rows;
}

void write_feature_cache(const FeatureCache& cache, const std::filesystem::path& path) {
  Writer w;
  w.bytes("LOMO", 4);
  w.le(FeatureCache::kVersion);
  w.le(cache.dim);
  w.le(static_cast<std::uint32_t>(cache.records.size()));
  w.le(cache.width);
  w.le(cache.height);
  w.bytes(cache.digest.data(), cache.digest.size());
  for (const auto& rec : cache.records) {
    if (rec.values.size() != cache.dim) {
      throw DataError("feature record length " + std::to_string(rec.values.size()) +
                      " differs from cache dimension " + std::to_string(cache.dim));
    }
    w.text(rec.person_id, path);
    w.text(rec.camera_id, path);
    for (float v : rec.values) w.f32(v);
  }
  w.flush(path);
}

FeatureCache read_feature_cache(const std::filesystem::path& path) {
  Reader r(path);
  if (r.raw(4) != "LOMO") throw DataError(quoted(path) + " is not a feature cache (bad magic)");
  const auto version = r.le<std::uint16_t>();
  if (version != FeatureCache::kVersion) {
    throw DataError("unsupported feature cache version " + std::to_string(version) + " in " + quoted(path));
  }
  FeatureCache cache;
  cache.dim = r.le<std::uint32_t>();
  const auto count = r.le<std::uint32_t>();
  cache.width = r.le<std::uint16_t>();
  cache.height = r.le<std::uint16_t>();
  const std::string digest = r.raw(cache.digest.size());
  std::memcpy(cache.digest.data(), digest.data(), cache.digest.size());
  cache.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    CacheRecord rec;
    rec.person_id = r.text();
    rec.camera_id = r.text();
    r.need(static_cast<std::size_t>(cache.dim) * 4);
    rec.values.resize(cache.dim);
    for (float& v : rec.values) v = r.f32();
    cache.records.push_back(std::move(rec));
  }
  if (!r.done()) throw DataError("trailing bytes after feature cache records in " + quoted(path));
  return cache;
}

void save_model(const XqdaModel& model, const std::filesystem::path& path) {
  Writer w;
  w.bytes("XQDA", 4);
  w.le(kXqdaFileVersion);
  w.le(static_cast<std::uint32_t>(model.W.rows()));
  w.le(static_cast<std::uint32_t>(model.W.cols()));
  w.f64(model.regularizer);
  w.matrix(model.W);
  w.matrix(model.M);
  w.matrix(model.eigenvalues);
  w.flush(path);
}

void save_model(const MetricModel& model, const std::filesystem::path& path) {
  Writer w;
  w.bytes("XQDA", 4);
  w.le(kMetricFileVersion);
  w.le(static_cast<std::uint8_t>(model.kind == MetricKind::kKissme ? 1 : 2));
  const auto p = static_cast<std::uint32_t>(model.M.rows());
  w.le(static_cast<std::uint32_t>(model.pca ? model.pca->mean.size() : p));
  w.le(p);
  w.f64(model.regularizer);
  w.le(static_cast<std::uint8_t>(model.pca ? 1 : 0));
  if (model.pca) {
    w.matrix(model.pca->mean);
    w.matrix(model.pca->basis);
  }
  w.matrix(model.M);
  w.flush(path);
}

AnyModel load_model(const std::filesystem::path& path) {
  Reader r(path);
  if (r.raw(4) != "XQDA") throw DataError(quoted(path) + " is not a model file (bad magic)");
  const auto version = r.le<std::uint16_t>();
  if (version == kXqdaFileVersion) {
    const auto d = r.le<std::uint32_t>();
    const auto rank = r.le<std::uint32_t>();
    const double reg = r.f64();
    if (d == 0 || rank == 0 || rank > d) throw DataError("corrupt model dimensions in " + quoted(path));
    Matrix W = r.matrix(d, rank);
    Matrix M = r.matrix(rank, rank);
    Vector eig = r.matrix(rank, 1);
    if (!r.done()) throw DataError("trailing bytes in model file " + quoted(path));
    return make_xqda_model(std::move(W), std::move(M), std::move(eig), reg);
  }
  if (version == kMetricFileVersion) {
    const auto tag = r.le<std::uint8_t>();
    if (tag != 1 && tag != 2) throw DataError("unknown metric tag in " + quoted(path));
    const auto d = r.le<std::uint32_t>();
    const auto p = r.le<std::uint32_t>();
    const double reg = r.f64();
    const auto has_pca = r.le<std::uint8_t>();
    if (d == 0 || p == 0 || p > d || (!has_pca && p != d)) {
      throw DataError("corrupt model dimensions in " + quoted(path));
    }
    std::optional<PcaModel> pca;
    if (has_pca) {
      PcaModel m;
      m.mean = r.matrix(d, 1);
      m.basis = r.matrix(d, p);
      pca = std::move(m);
    }
    Matrix M = r.matrix(p, p);
    if (!r.done()) throw DataError("trailing bytes in model file " + quoted(path));
    return make_metric_model(tag == 1 ? MetricKind::kKissme : MetricKind::kMahalanobis,
                             std::move(pca), std::move(M), reg);
  }
  throw DataError("unsupported model file version " + std::to_string(version) + " in " + quoted(path));
}

}  // namespace reid
