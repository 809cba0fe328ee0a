#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reid/linalg.hpp"

namespace reid {

/// Two-view training data: columns of X (view 1) labelled by y, columns of Z
/// (view 2) labelled by l. Every identity must appear in both views.
struct CrossViewDataset {
  Matrix X;
  Matrix Z;
  std::vector<int> y;
  std::vector<int> l;

  /// Throws DataError when shapes or labels violate the two-view contract.
  void validate() const;
  int class_count() const;
};

/// Zero-mean covariances of intrapersonal and extrapersonal differences
/// x_i - z_j together with the number of pairs behind each.
struct CovariancePair {
  Matrix sigma_I;
  Matrix sigma_E;
  std::uint64_t n_I = 0;
  std::uint64_t n_E = 0;
};

/// O(N d^2) construction from per-class and global column sums.
CovariancePair compute_covariances_fast(const CrossViewDataset& ds);

/// Explicit enumeration of all n*m difference vectors. Refuses more than
/// kNaivePairLimit pairs.
CovariancePair compute_covariances_naive(const CrossViewDataset& ds);
inline constexpr std::uint64_t kNaivePairLimit = 1'000'000;

/// Pair-count weighted union of several covariance estimates (for example
/// one per camera pair).
CovariancePair pool_covariances(const std::vector<CovariancePair>& parts);

struct XqdaConfig {
  double regularizer = 0.001;
  std::optional<int> max_dims;
  double eigen_threshold = 1.0;

  void validate() const;
};

/// Solution of sigma_E w = lambda (sigma_I + reg I) w, all d pairs, sorted by
/// descending eigenvalue, eigenvectors scaled to unit Euclidean length.
struct GeneralizedEigen {
  Vector values;
  Matrix vectors;
  Matrix sigma_I;  // regularized
  Matrix sigma_E;
  double regularizer = 0.0;
};

GeneralizedEigen solve_generalized_eigen(const CovariancePair& cov, double regularizer);

/// Number of leading eigenpairs kept: those above the threshold, capped by
/// max_dims, never fewer than one.
int select_dims(const Vector& eigenvalues, const XqdaConfig& cfg);

struct XqdaModel {
  Matrix W;        // d x r
  Matrix M;        // r x r, inverse projected sigma_I minus inverse projected sigma_E
  Vector eigenvalues;
  double regularizer = 0.0;
  QuadraticForm form;

  int input_dim() const { return static_cast<int>(W.rows()); }
  int dims() const { return static_cast<int>(W.cols()); }
};

/// Model built on the first r eigenvectors of `eig`.
XqdaModel build_xqda_model(const GeneralizedEigen& eig, int r);

/// Assembles a model from stored parts (used when loading from disk).
XqdaModel make_xqda_model(Matrix W, Matrix M, Vector eigenvalues, double regularizer);

/// Covariances ready for the eigenproblem. Every difference x_i - z_j lies in
/// the span of the samples, so when d exceeds the sample count the
/// covariances are expressed in an orthonormal basis of that span (d x k)
/// and the trained model is lifted back with W = basis * W'. Eigenvalues and
/// distances are unchanged; only directions with zero eigenvalue are lost.
struct XqdaProblem {
  std::optional<Matrix> basis;
  CovariancePair cov;
};

/// One camera pair per part; covariances are pooled by pair count.
XqdaProblem prepare_xqda(const std::vector<CrossViewDataset>& parts);

/// Maps a model trained in prepare_xqda's reduced coordinates to input space.
XqdaModel lift_xqda_model(const XqdaModel& reduced, const std::optional<Matrix>& basis);

XqdaModel train_xqda(const CovariancePair& cov, const XqdaConfig& cfg);
XqdaModel train_xqda(const CrossViewDataset& ds, const XqdaConfig& cfg);
XqdaModel train_xqda(const std::vector<CrossViewDataset>& parts, const XqdaConfig& cfg);

Vector project(const XqdaModel& model, const Eigen::Ref<const Vector>& v);
double distance(const XqdaModel& model, const Eigen::Ref<const Vector>& x,
                const Eigen::Ref<const Vector>& z);
/// probes: d x p, gallery: d x g; returns p x g.
Matrix pairwise_distances(const XqdaModel& model, const Matrix& probes, const Matrix& gallery);

}  // namespace reid
