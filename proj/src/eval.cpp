#include "reid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "reid/error.hpp"

namespace reid {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  return std::mt19937_64(splitmix64(seed + splitmix64(static_cast<std::uint64_t>(trial))));
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw UsageError("uniform_below: empty range");
  // Reject the partial block at the top of the 64-bit range.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

void ProtocolConfig::validate() const {
  if (trials < 1) throw UsageError("trials must be at least 1");
  if (train_count && *train_count < 0) throw UsageError("train_count must be non-negative");
  if (!train_count && !(train_fraction >= 0.0 && train_fraction < 1.0)) {
    throw UsageError("train_fraction must lie in [0, 1)");
  }
}

IdentitySplit split_identities(const std::vector<int>& ids, const ProtocolConfig& cfg, int trial) {
  cfg.validate();
  std::vector<int> pool(ids.begin(), ids.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  const std::size_t n_train =
      cfg.train_count ? static_cast<std::size_t>(*cfg.train_count)
                      : static_cast<std::size_t>(std::floor(cfg.train_fraction * pool.size()));
  if (n_train > pool.size() || pool.size() - n_train < 2) {
    throw UsageError("identity split infeasible: " + std::to_string(pool.size()) +
                     " identities, " + std::to_string(n_train) +
                     " for training leaves fewer than 2 for testing");
  }

  auto rng = trial_rng(cfg.seed, trial);
  for (std::size_t i = pool.size() - 1; i > 0; --i) {
    std::swap(pool[i], pool[uniform_below(rng, i + 1)]);
  }
  IdentitySplit out;
  out.train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train), pool.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

CmcCurve cmc(const Matrix& scores, const std::vector<int>& probe_ids,
             const std::vector<int>& gallery_ids) {
  if (scores.rows() != static_cast<Eigen::Index>(probe_ids.size()) ||
      scores.cols() != static_cast<Eigen::Index>(gallery_ids.size())) {
    throw UsageError("score matrix shape does not match probe/gallery id counts");
  }
  if (probe_ids.empty()) throw UsageError("cmc needs at least one probe");

  // Distinct gallery identities in order of first appearance.
  std::map<int, std::size_t> slot;
  std::vector<int> identities;
  for (int id : gallery_ids) {
    if (slot.emplace(id, identities.size()).second) identities.push_back(id);
  }
  const std::size_t n_ids = identities.size();
  std::vector<std::size_t> hits(n_ids, 0);

  std::vector<double> best(n_ids);
  std::vector<Eigen::Index> best_col(n_ids);
  for (Eigen::Index p = 0; p < scores.rows(); ++p) {
    const auto it = slot.find(probe_ids[static_cast<std::size_t>(p)]);
    if (it == slot.end()) {
      throw DataError("probe identity " + std::to_string(probe_ids[static_cast<std::size_t>(p)]) +
                      " has no gallery entry");
    }
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    std::fill(best_col.begin(), best_col.end(), scores.cols());
    for (Eigen::Index g = 0; g < scores.cols(); ++g) {
      const std::size_t k = slot[gallery_ids[static_cast<std::size_t>(g)]];
      if (best_col[k] == scores.cols() || scores(p, g) < best[k]) {
        best[k] = scores(p, g);
        best_col[k] = g;
      }
    }
    const std::size_t target = it->second;
    std::size_t rank = 1;
    for (std::size_t k = 0; k < n_ids; ++k) {
      if (k == target) continue;
      if (best[k] < best[target] || (best[k] == best[target] && best_col[k] < best_col[target])) {
        ++rank;
      }
    }
    ++hits[rank - 1];
  }

  CmcCurve out;
  out.rates.resize(n_ids);
  std::size_t cum = 0;
  for (std::size_t k = 0; k < n_ids; ++k) {
    cum += hits[k];
    out.rates[k] = static_cast<double>(cum) / static_cast<double>(probe_ids.size());
  }
  return out;
}

namespace {

class XqdaScorer : public Scorer {
 public:
  explicit XqdaScorer(XqdaModel m) : model_(std::move(m)) {}
  Matrix scores(const Matrix& probes, const Matrix& gallery) const override {
    return pairwise_distances(model_, probes, gallery);
  }

 private:
  XqdaModel model_;
};

class MetricScorer : public Scorer {
 public:
  explicit MetricScorer(MetricModel m) : model_(std::move(m)) {}
  Matrix scores(const Matrix& probes, const Matrix& gallery) const override {
    return pairwise_distances(model_, probes, gallery);
  }

 private:
  MetricModel model_;
};

class FunctionScorer : public Scorer {
 public:
  using Fn = Matrix (*)(const Matrix&, const Matrix&);
  explicit FunctionScorer(Fn fn) : fn_(fn) {}
  Matrix scores(const Matrix& probes, const Matrix& gallery) const override {
    return fn_(probes, gallery);
  }

 private:
  Fn fn_;
};

}  // namespace

std::shared_ptr<const Scorer> make_scorer(XqdaModel model) {
  return std::make_shared<XqdaScorer>(std::move(model));
}

std::shared_ptr<const Scorer> make_scorer(MetricModel model) {
  return std::make_shared<MetricScorer>(std::move(model));
}

MethodKind parse_method(const std::string& name) {
  static const std::map<std::string, MethodKind> kNames = {
      {"xqda", MethodKind::kXqda},           {"kissme", MethodKind::kKissme},
      {"mahalanobis", MethodKind::kMahalanobis}, {"euclidean", MethodKind::kEuclidean},
      {"cosine", MethodKind::kCosine}};
  const auto it = kNames.find(name);
  if (it == kNames.end()) {
    throw UsageError("unknown method '" + name +
                     "' (expected xqda, kissme, mahalanobis, euclidean or cosine)");
  }
  return it->second;
}

const char* method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::kXqda: return "xqda";
    case MethodKind::kKissme: return "kissme";
    case MethodKind::kMahalanobis: return "mahalanobis";
    case MethodKind::kEuclidean: return "euclidean";
    case MethodKind::kCosine: return "cosine";
  }
  return "?";
}

void ProtocolData::validate() const {
  const auto n = static_cast<std::size_t>(features.cols());
  if (person.size() != n || view.size() != n) {
    throw DataError("protocol data: label arrays do not match the sample count");
  }
}

double rate_at(const std::vector<double>& rates, int rank) {
  if (rates.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(std::clamp<int>(rank, 1, static_cast<int>(rates.size())));
  return rates[idx - 1];
}

namespace {

struct TrialSets {
  CrossViewDataset train;
  Matrix probes;
  std::vector<int> probe_ids;
  Matrix gallery;
  std::vector<int> gallery_ids;
  std::vector<Eigen::Index> gallery_columns;
};

Matrix gather(const Matrix& features, const std::vector<Eigen::Index>& cols) {
  Matrix out(features.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = features.col(cols[i]);
  return out;
}

TrialSets build_trial(const ProtocolData& data, const IdentitySplit& split,
                      const ProtocolConfig& cfg, int trial) {
  const std::set<int> train(split.train.begin(), split.train.end());
  const std::set<int> test(split.test.begin(), split.test.end());
  std::vector<Eigen::Index> tx, tz, probe_cols;
  std::map<int, std::vector<Eigen::Index>> gallery_by_id;
  TrialSets out;
  for (Eigen::Index i = 0; i < data.features.cols(); ++i) {
    const int id = data.person[static_cast<std::size_t>(i)];
    const int v = data.view[static_cast<std::size_t>(i)];
    if (v != 0 && v != 1) continue;
    if (train.count(id)) {
      if (v == 0) {
        tx.push_back(i);
        out.train.y.push_back(id);
      } else {
        tz.push_back(i);
        out.train.l.push_back(id);
      }
    } else if (test.count(id)) {
      if (v == 0) {
        probe_cols.push_back(i);
        out.probe_ids.push_back(id);
      } else {
        gallery_by_id[id].push_back(i);
      }
    }
  }
  out.train.X = gather(data.features, tx);
  out.train.Z = gather(data.features, tz);
  out.probes = gather(data.features, probe_cols);

  // Separate stream from the split so gallery sampling never perturbs it.
  auto rng = trial_rng(splitmix64(cfg.seed ^ 0x6a09e667f3bcc909ULL), trial);
  for (const auto& [id, cols] : gallery_by_id) {
    if (cfg.shot == ShotMode::kSingle) {
      out.gallery_columns.push_back(cols[uniform_below(rng, cols.size())]);
      out.gallery_ids.push_back(id);
    } else {
      for (auto c : cols) {
        out.gallery_columns.push_back(c);
        out.gallery_ids.push_back(id);
      }
    }
  }
  out.gallery = gather(data.features, out.gallery_columns);
  return out;
}

std::shared_ptr<const Scorer> train_method(const MethodSpec& spec, const CrossViewDataset& ds) {
  if (spec.pretrained) return spec.pretrained;
  const int max_pca =
      static_cast<int>(std::min<Eigen::Index>(ds.X.rows(), ds.X.cols() + ds.Z.cols() - 1));
  const int p = std::clamp(spec.pca_dims, 1, max_pca);
  switch (spec.kind) {
    case MethodKind::kXqda: return make_scorer(train_xqda(ds, spec.xqda));
    case MethodKind::kKissme: return make_scorer(train_kissme(ds, p, spec.metric_reg));
    case MethodKind::kMahalanobis:
      return make_scorer(train_mahalanobis_genuine(ds, p, spec.metric_reg));
    case MethodKind::kEuclidean: return std::make_shared<FunctionScorer>(&euclidean_scores);
    case MethodKind::kCosine: return std::make_shared<FunctionScorer>(&cosine_scores);
  }
  throw UsageError("unknown method");
}

void summarize(MethodResult& r) {
  const std::size_t len = r.trials.front().rates.size();
  const double n = static_cast<double>(r.trials.size());
  r.mean.assign(len, 0.0);
  r.stddev.assign(len, 0.0);
  for (const auto& t : r.trials) {
    for (std::size_t k = 0; k < len; ++k) r.mean[k] += t.rates[k] / n;
  }
  if (r.trials.size() < 2) return;
  for (const auto& t : r.trials) {
    for (std::size_t k = 0; k < len; ++k) r.stddev[k] += std::pow(t.rates[k] - r.mean[k], 2);
  }
  for (double& s : r.stddev) s = std::sqrt(s / (n - 1.0));
}

void fnv1a(std::uint64_t& h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

ProtocolReport run_protocol(const ProtocolData& data, const std::vector<MethodSpec>& methods,
                            const ProtocolConfig& cfg, const std::vector<int>& sweep_dims,
                            const XqdaConfig& sweep_cfg) {
  data.validate();
  cfg.validate();
  if (methods.empty() && sweep_dims.empty()) {
    throw UsageError("no methods to evaluate");
  }

  std::set<int> in_probe, in_gallery;
  for (std::size_t i = 0; i < data.person.size(); ++i) {
    if (data.view[i] == 0) in_probe.insert(data.person[i]);
    if (data.view[i] == 1) in_gallery.insert(data.person[i]);
  }
  std::vector<int> ids;
  std::set_intersection(in_probe.begin(), in_probe.end(), in_gallery.begin(), in_gallery.end(),
                        std::back_inserter(ids));

  const int feature_dim = static_cast<int>(data.features.rows());
  std::vector<int> dims;
  for (int r : sweep_dims) dims.push_back(std::clamp(r, 1, feature_dim));

  ProtocolReport report;
  report.config = cfg;
  report.gallery_hash = 0xcbf29ce484222325ULL;
  for (const auto& m : methods) {
    report.methods.push_back({m.label.empty() ? method_name(m.kind) : m.label, {}, {}, {}});
  }
  for (int r : dims) report.methods.push_back({"xqda r=" + std::to_string(r), {}, {}, {}});

  for (int t = 0; t < cfg.trials; ++t) {
    const IdentitySplit split = split_identities(ids, cfg, t);
    const TrialSets sets = build_trial(data, split, cfg, t);
    for (auto c : sets.gallery_columns) fnv1a(report.gallery_hash, static_cast<std::uint64_t>(c));
    report.gallery_size = static_cast<int>(split.test.size());

    std::size_t slot = 0;
    for (const auto& m : methods) {
      const auto scorer = train_method(m, sets.train);
      report.methods[slot++].trials.push_back(
          cmc(scorer->scores(sets.probes, sets.gallery), sets.probe_ids, sets.gallery_ids));
    }
    if (!dims.empty()) {
      const XqdaProblem problem = prepare_xqda({sets.train});
      const GeneralizedEigen eig = solve_generalized_eigen(problem.cov, sweep_cfg.regularizer);
      for (int r : dims) {
        const XqdaModel model =
            lift_xqda_model(build_xqda_model(eig, std::min<int>(r, static_cast<int>(eig.values.size()))),
                            problem.basis);
        report.methods[slot++].trials.push_back(
            cmc(pairwise_distances(model, sets.probes, sets.gallery), sets.probe_ids,
                sets.gallery_ids));
      }
    }
  }

  for (auto& m : report.methods) summarize(m);
  const std::size_t first_sweep = methods.size();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const MethodResult& m = report.methods[first_sweep + i];
    report.sweep.push_back({dims[i], rate_at(m.mean, 1), m.stddev.empty() ? 0.0 : m.stddev[0],
                            rate_at(m.mean, 10), rate_at(m.mean, 20)});
  }
  return report;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string report_csv(const ProtocolReport& report) {
  std::ostringstream os;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(report.gallery_hash));
  os << "# trials=" << report.config.trials << " seed=" << report.config.seed
     << " shot=" << (report.config.shot == ShotMode::kSingle ? "single" : "multi")
     << " gallery_identities=" << report.gallery_size << " gallery_hash=" << hash << "\n";
  os << "method,rank,mean_rate,std_rate\n";
  for (const auto& m : report.methods) {
    for (std::size_t k = 0; k < m.mean.size(); ++k) {
      os << m.label << ',' << (k + 1) << ',' << fmt("%.6f", m.mean[k]) << ','
         << fmt("%.6f", m.stddev[k]) << '\n';
    }
  }
  return os.str();
}

std::string sweep_csv(const ProtocolReport& report) {
  std::ostringstream os;
  os << "dims,rank1_mean,rank1_std,rank10_mean,rank20_mean\n";
  for (const auto& row : report.sweep) {
    os << row.dims << ',' << fmt("%.6f", row.rank1_mean) << ',' << fmt("%.6f", row.rank1_std) << ','
       << fmt("%.6f", row.rank10_mean) << ',' << fmt("%.6f", row.rank20_mean) << '\n';
  }
  return os.str();
}

std::string report_svg(const ProtocolReport& report) {
  constexpr double kW = 640, kH = 480, kLeft = 60, kRight = 180, kTop = 30, kBottom = 50;
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  std::size_t max_rank = 1;
  for (const auto& m : report.methods) max_rank = std::max(max_rank, m.mean.size());
  auto px = [&](std::size_t rank) {
    return max_rank == 1 ? kLeft : kLeft + plot_w * static_cast<double>(rank - 1) / static_cast<double>(max_rank - 1);
  };
  auto py = [&](double rate) { return kTop + plot_h * (1.0 - rate); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n"
     << "<text x=\"" << kLeft << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">CMC ("
     << report.config.trials << " trials)</text>\n";
  // axes and grid
  os << "<g stroke=\"#000\" stroke-width=\"1\">\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
     << py(0) << "\"/>\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft << "\" y2=\"" << py(1)
     << "\"/>\n</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 10; i += 2) {
    const double rate = i / 10.0;
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt("%.1f", py(rate) + 4)
       << "\" text-anchor=\"end\">" << i * 10 << "%</text>\n";
  }
  os << "<text x=\"" << kLeft << "\" y=\"" << kH - 25 << "\" text-anchor=\"middle\">1</text>\n"
     << "<text x=\"" << kLeft + plot_w << "\" y=\"" << kH - 25 << "\" text-anchor=\"middle\">"
     << max_rank << "</text>\n"
     << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 10
     << "\" text-anchor=\"middle\">Rank</text>\n</g>\n";

  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    const auto& m = report.methods[i];
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < m.mean.size(); ++k) {
      if (k) os << ' ';
      os << fmt("%.2f", px(k + 1)) << ',' << fmt("%.2f", py(m.mean[k]));
    }
    os << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(i + 1);
    os << "<text x=\"" << kLeft + plot_w + 12 << "\" y=\"" << ly
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
       << xml_escape(m.label) << ' ' << fmt("%.2f", 100.0 * rate_at(m.mean, 1)) << "%</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace reid
