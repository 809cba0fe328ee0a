#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reid/linalg.hpp"
#include "reid/xqda.hpp"

namespace reid {

struct PcaModel {
  Vector mean;   // d
  Matrix basis;  // d x p, orthonormal columns, descending variance
  Vector variances;

  /// basis^T (samples - mean)
  Matrix transform(const Matrix& samples) const;
};

/// Principal components of the columns of `samples` (d x N).
PcaModel pca_fit(const Matrix& samples, int p);

enum class MetricKind { kKissme, kMahalanobis };

const char* metric_name(MetricKind kind);

/// Mahalanobis-type metric in an optional PCA space: scores are
/// (x-z)^T P M P^T (x-z) with P the PCA basis (identity when absent).
struct MetricModel {
  MetricKind kind = MetricKind::kKissme;
  std::optional<PcaModel> pca;
  Matrix M;
  double regularizer = 0.0;
  QuadraticForm form;

  int input_dim() const { return static_cast<int>(form.input_dim()); }
};

MetricModel make_metric_model(MetricKind kind, std::optional<PcaModel> pca, Matrix M,
                              double regularizer);

/// PCA on both views jointly, then (sigma_I + reg I)^-1 - (sigma_E + reg I)^-1.
MetricModel train_kissme(const CrossViewDataset& ds, int p, double reg);

/// PCA on both views jointly, then (sigma_I + reg I)^-1.
MetricModel train_mahalanobis_genuine(const CrossViewDataset& ds, int p, double reg);

/// Multi-camera variants: one PCA over every sample of every part, then the
/// per-part covariances pooled by pair count.
MetricModel train_kissme(const std::vector<CrossViewDataset>& parts, int p, double reg);
MetricModel train_mahalanobis_genuine(const std::vector<CrossViewDataset>& parts, int p, double reg);

double distance(const MetricModel& model, const Eigen::Ref<const Vector>& x,
                const Eigen::Ref<const Vector>& z);
Matrix pairwise_distances(const MetricModel& model, const Matrix& probes, const Matrix& gallery);

/// Squared Euclidean distances, p x g.
Matrix euclidean_scores(const Matrix& probes, const Matrix& gallery);

/// 1 - cos(x, z), p x g. Zero vectors score 1 against everything.
Matrix cosine_scores(const Matrix& probes, const Matrix& gallery);

}  // namespace reid
