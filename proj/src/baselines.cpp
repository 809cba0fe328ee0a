#include "reid/baselines.hpp"

#include <string>

#include "reid/error.hpp"

namespace reid {

Matrix PcaModel::transform(const Matrix& samples) const {
  if (samples.rows() != mean.size()) {
    throw UsageError("PCA input dimension mismatch");
  }
  return basis.transpose() * (samples.colwise() - mean);
}

PcaModel pca_fit(const Matrix& samples, int p) {
  const Eigen::Index d = samples.rows(), n = samples.cols();
  if (n < 2) {
    throw UsageError("PCA needs at least two samples");
  }
  if (p < 1 || p > std::min<Eigen::Index>(d, n - 1)) {
    throw UsageError("PCA dimension " + std::to_string(p) + " outside [1, " +
                     std::to_string(std::min<Eigen::Index>(d, n - 1)) + "]");
  }
  PcaModel out;
  out.mean = samples.rowwise().mean();
  const Matrix centered = samples.colwise() - out.mean;
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
  out.basis = svd.matrixU().leftCols(p);
  out.variances = svd.singularValues().head(p).array().square() / static_cast<double>(n - 1);
  return out;
}

const char* metric_name(MetricKind kind) {
  return kind == MetricKind::kKissme ? "kissme" : "mahalanobis";
}

MetricModel make_metric_model(MetricKind kind, std::optional<PcaModel> pca, Matrix M,
                              double regularizer) {
  if (M.rows() != M.cols() || (pca && pca->basis.cols() != M.rows())) {
    throw DataError("inconsistent metric model shapes");
  }
  MetricModel out;
  out.kind = kind;
  out.form = pca ? QuadraticForm(pca->basis, M)
                 : QuadraticForm(Matrix::Identity(M.rows(), M.rows()), M);
  out.pca = std::move(pca);
  out.M = std::move(M);
  out.regularizer = regularizer;
  return out;
}

namespace {

struct PcaSpace {
  PcaModel pca;
  CovariancePair cov;
};

PcaSpace covariances_in_pca_space(const std::vector<CrossViewDataset>& parts, int p) {
  if (parts.empty()) throw DataError("no training data");
  Eigen::Index total = 0;
  for (const auto& ds : parts) {
    ds.validate();
    if (ds.X.rows() != parts[0].X.rows()) throw DataError("training parts differ in dimension");
    total += ds.X.cols() + ds.Z.cols();
  }
  Matrix all(parts[0].X.rows(), total);
  Eigen::Index at = 0;
  for (const auto& ds : parts) {
    all.middleCols(at, ds.X.cols()) = ds.X;
    at += ds.X.cols();
    all.middleCols(at, ds.Z.cols()) = ds.Z;
    at += ds.Z.cols();
  }
  PcaSpace out{pca_fit(all, p), {}};
  std::vector<CovariancePair> covs;
  for (const auto& ds : parts) {
    covs.push_back(compute_covariances_fast(
        CrossViewDataset{out.pca.transform(ds.X), out.pca.transform(ds.Z), ds.y, ds.l}));
  }
  out.cov = pool_covariances(covs);
  return out;
}

Matrix regularized_inverse(const Matrix& sigma, double reg, const char* what) {
  const Eigen::Index n = sigma.rows();
  Eigen::LLT<Matrix> llt(sigma + reg * Matrix::Identity(n, n));
  if (llt.info() != Eigen::Success) {
    throw NumericError(std::string(what) + " covariance is singular after regularization");
  }
  return symmetrized(llt.solve(Matrix::Identity(n, n)));
}

}  // namespace

MetricModel train_kissme(const std::vector<CrossViewDataset>& parts, int p, double reg) {
  if (!(reg >= 0.0)) throw UsageError("regularizer must be non-negative");
  PcaSpace space = covariances_in_pca_space(parts, p);
  Matrix M = regularized_inverse(space.cov.sigma_I, reg, "intrapersonal") -
             regularized_inverse(space.cov.sigma_E, reg, "extrapersonal");
  return make_metric_model(MetricKind::kKissme, std::move(space.pca), std::move(M), reg);
}

MetricModel train_mahalanobis_genuine(const std::vector<CrossViewDataset>& parts, int p,
                                      double reg) {
  if (!(reg >= 0.0)) throw UsageError("regularizer must be non-negative");
  PcaSpace space = covariances_in_pca_space(parts, p);
  Matrix M = regularized_inverse(space.cov.sigma_I, reg, "intrapersonal");
  return make_metric_model(MetricKind::kMahalanobis, std::move(space.pca), std::move(M), reg);
}

MetricModel train_kissme(const CrossViewDataset& ds, int p, double reg) {
  return train_kissme(std::vector<CrossViewDataset>{ds}, p, reg);
}

MetricModel train_mahalanobis_genuine(const CrossViewDataset& ds, int p, double reg) {
  return train_mahalanobis_genuine(std::vector<CrossViewDataset>{ds}, p, reg);
}

double distance(const MetricModel& model, const Eigen::Ref<const Vector>& x,
                const Eigen::Ref<const Vector>& z) {
  return model.form.distance(x, z);
}

Matrix pairwise_distances(const MetricModel& model, const Matrix& probes, const Matrix& gallery) {
  return model.form.pairwise_projected(model.form.project(probes), model.form.project(gallery));
}

namespace {

void check_dims(const Matrix& probes, const Matrix& gallery) {
  if (probes.rows() != gallery.rows()) {
    throw UsageError("probe and gallery feature dimensions differ (" +
                     std::to_string(probes.rows()) + " vs " + std::to_string(gallery.rows()) + ")");
  }
}

}  // namespace

Matrix euclidean_scores(const Matrix& probes, const Matrix& gallery) {
  check_dims(probes, gallery);
  Matrix out(probes.cols(), gallery.cols());
  for (Eigen::Index j = 0; j < gallery.cols(); ++j) {
    for (Eigen::Index i = 0; i < probes.cols(); ++i) {
      out(i, j) = (probes.col(i) - gallery.col(j)).squaredNorm();
    }
  }
  return out;
}

Matrix cosine_scores(const Matrix& probes, const Matrix& gallery) {
  check_dims(probes, gallery);
  const Vector pn = probes.colwise().norm().transpose();
  const Vector gn = gallery.colwise().norm().transpose();
  const Matrix dots = probes.transpose() * gallery;
  Matrix out(probes.cols(), gallery.cols());
  for (Eigen::Index j = 0; j < gallery.cols(); ++j) {
    for (Eigen::Index i = 0; i < probes.cols(); ++i) {
      const double denom = pn(i) * gn(j);
      out(i, j) = denom > 0.0 ? 1.0 - dots(i, j) / denom : 1.0;
    }
  }
  return out;
}

}  // namespace reid
