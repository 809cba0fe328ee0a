#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "reid/baselines.hpp"
#include "reid/linalg.hpp"
#include "reid/xqda.hpp"

namespace reid {

/// SplitMix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// The generator for trial `trial` of a run seeded with `seed`: a
/// std::mt19937_64 seeded with splitmix64(seed + splitmix64(trial)).
std::mt19937_64 trial_rng(std::uint64_t seed, int trial);

/// Uniform integer in [0, bound) by rejection sampling, independent of the
/// standard library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

enum class ShotMode { kSingle, kMulti };

struct ProtocolConfig {
  int trials = 10;
  double train_fraction = 0.5;
  std::optional<int> train_count;  // overrides train_fraction when set
  ShotMode shot = ShotMode::kSingle;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IdentitySplit {
  std::vector<int> train;
  std::vector<int> test;
};

/// Seeded Fisher-Yates shuffle of the sorted distinct ids; the first
/// train_count (or floor(fraction * count)) become training identities.
/// Both halves are returned sorted.
IdentitySplit split_identities(const std::vector<int>& ids, const ProtocolConfig& cfg, int trial);

struct CmcCurve {
  std::vector<double> rates;  // rates[k-1] = fraction of probes matched within rank k
};

/// Scores are p x g, lower is better. Each gallery identity is represented by
/// its best (minimum) score; ties go to the identity whose best entry comes
/// first in gallery order.
CmcCurve cmc(const Matrix& scores, const std::vector<int>& probe_ids,
             const std::vector<int>& gallery_ids);

/// Anything that can score probe columns against gallery columns.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual Matrix scores(const Matrix& probes, const Matrix& gallery) const = 0;
};

std::shared_ptr<const Scorer> make_scorer(XqdaModel model);
std::shared_ptr<const Scorer> make_scorer(MetricModel model);

enum class MethodKind { kXqda, kKissme, kMahalanobis, kEuclidean, kCosine };

/// Parses "xqda", "kissme", "mahalanobis", "euclidean" or "cosine".
MethodKind parse_method(const std::string& name);
const char* method_name(MethodKind kind);

struct MethodSpec {
  MethodKind kind = MethodKind::kXqda;
  XqdaConfig xqda;
  int pca_dims = 100;     // clamped to what each training split supports
  double metric_reg = 0.001;
  std::shared_ptr<const Scorer> pretrained;  // when set, no per-trial training
  std::string label;                         // defaults to the method name
};

/// Columns of `features` are samples; view 0 is the probe camera, view 1 the
/// gallery camera, anything else is ignored.
struct ProtocolData {
  Matrix features;
  std::vector<int> person;
  std::vector<int> view;

  void validate() const;
};

struct MethodResult {
  std::string label;
  std::vector<CmcCurve> trials;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation, 0 for a single trial
};

struct SweepRow {
  int dims = 0;
  double rank1_mean = 0.0;
  double rank1_std = 0.0;
  double rank10_mean = 0.0;
  double rank20_mean = 0.0;
};

struct ProtocolReport {
  ProtocolConfig config;
  std::vector<MethodResult> methods;
  std::vector<SweepRow> sweep;
  std::uint64_t gallery_hash = 0;  // FNV-1a over every trial's gallery column order
  int gallery_size = 0;
};

/// Per trial: split identities, train each method on the training identities,
/// score test probes against the test gallery and compute the CMC. With
/// non-empty `sweep_dims` an XQDA model is additionally evaluated at each
/// listed subspace dimension (clamped to the feature dimension).
ProtocolReport run_protocol(const ProtocolData& data, const std::vector<MethodSpec>& methods,
                            const ProtocolConfig& cfg, const std::vector<int>& sweep_dims = {},
                            const XqdaConfig& sweep_cfg = {});

/// Rate at rank k (1-based), saturating at the last rank.
double rate_at(const std::vector<double>& rates, int rank);

/// "# ..." provenance lines, then method,rank,mean_rate,std_rate.
std::string report_csv(const ProtocolReport& report);
/// dims,rank1_mean,rank1_std,rank10_mean,rank20_mean
std::string sweep_csv(const ProtocolReport& report);
/// Stand-alone SVG with one CMC polyline per method.
std::string report_svg(const ProtocolReport& report);

}  // namespace reid
